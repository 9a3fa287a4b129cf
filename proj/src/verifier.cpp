#include "byrne/verifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

#include "byrne/error.hpp"
#include "byrne/sexpr.hpp"

namespace byrne {

namespace {

struct Span {
    const Node* node;
    std::size_t begin;
    std::size_t end;
};

struct Flat {
    std::string text;
    std::vector<Span> spans;
};

void flatten(const std::vector<Node>& nodes, Flat& flat) {
    for (const auto& n : nodes) {
        if (n.is_text()) {
            flat.text += n.text;
            continue;
        }
        const std::size_t index = flat.spans.size();
        flat.spans.push_back({&n, flat.text.size(), 0});
        flatten(n.children, flat);
        flat.spans[index].end = flat.text.size();
    }
}

struct WordSpan {
    std::size_t begin;
    std::size_t end;
    double onset = 0.0;
    double duration = 0.0;
};

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

// Words are whitespace-separated; phrase and sentence edges also end a word.
std::vector<WordSpan> find_words(const std::string& text, const std::vector<bool>& edge) {
    std::vector<WordSpan> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t b = i;
        bool has_word_byte = false;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && (i == b || !edge[i])) {
            has_word_byte |= is_word_byte(text[i++]);
        }
        if (i > b && has_word_byte) words.push_back({b, i});
    }
    return words;
}

class Timing {
public:
    Timing(std::vector<WordSpan> words, std::vector<std::size_t> breaks, const StyleFile& style) : words_(std::move(words)) {
        std::sort(breaks.begin(), breaks.end());
        // Breaks at a word's start position are heard before the word.
        double cursor = 0.0;
        std::size_t b = 0;
        auto take_breaks_up_to = [&](std::size_t limit) {
            while (b < breaks.size() && breaks[b] <= limit) {
                marks_.push_back({breaks[b++], cursor});
                cursor += style.break_ms;
            }
        };
        for (auto& w : words_) {
            take_breaks_up_to(w.begin);
            marks_.push_back({w.begin, cursor});
            w.onset = cursor;
            w.duration = style.word_ms();
            cursor += w.duration;
        }
        take_breaks_up_to(std::string::npos);
        total_ = cursor;
    }

    const std::vector<WordSpan>& words() const { return words_; }
    double total() const { return total_; }

    /// Time once everything before text position `pos` has been spoken.
    double at(std::size_t pos) const {
        for (const auto& [p, t] : marks_) {
            if (p >= pos) return t;
        }
        return total_;
    }

    /// [onset, end) of the words overlapping [begin, end), or a point.
    std::pair<double, double> span(std::size_t begin, std::size_t end) const {
        const WordSpan* first = nullptr;
        const WordSpan* last = nullptr;
        for (const auto& w : words_) {
            if (w.begin < end && w.end > begin) {
                if (first == nullptr) first = &w;
                last = &w;
            }
        }
        if (first == nullptr) {
            const double t = at(begin);
            return {t, t};
        }
        return {first->onset, last->onset + last->duration};
    }

private:
    std::vector<WordSpan> words_;
    std::vector<std::pair<std::size_t, double>> marks_;  // (text position, start time) in speaking order
    double total_ = 0.0;
};

double level_of(const Node& n) {
    const std::string* v = n.attr("LEVEL");
    if (v == nullptr) return 1.0;
    double d = 1.0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), d);
    if (ec != std::errc() || p != v->data() + v->size()) {
        throw VerificationError("LEVEL=\"" + *v + "\" on <" + n.tag + "> is not a number");
    }
    return d;
}

double round3(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 1000.0) / 1000.0; }

std::vector<Node> project_speech(const std::vector<Node>& nodes, const StyleFile& style) {
    std::vector<Node> out;
    for (const auto& n : nodes) {
        if (n.is_text()) {
            out.push_back(n);
            continue;
        }
        const TagInfo* info = find_tag(n.tag);
        switch (info->category) {
            case TagCategory::Expression:
            case TagCategory::ActionUnit:
                for (auto& c : project_speech(n.children, style)) out.push_back(std::move(c));
                break;
            case TagCategory::AuralEvent: {
                const std::string& name = *n.attr("NAME");
                auto it = style.aural.find(name);
                if (it == style.aural.end()) throw VerificationError("style defines no sound for aural event '" + name + "'");
                out.push_back(Node::make_element("AUDIO", {{"SRC", it->second}}));
                break;
            }
            default: {
                Node copy = Node::make_element(n.tag, n.attrs, project_speech(n.children, style));
                out.push_back(std::move(copy));
                break;
            }
        }
    }
    normalize(out);
    return out;
}

std::int64_t ms(double v) { return static_cast<std::int64_t>(std::llround(v)); }

}  // namespace

bool timeline_before(const TimelineEvent& a, const TimelineEvent& b) {
    return std::tie(a.onset_ms, a.kind, a.action_unit, a.viseme, a.duration_ms, a.intensity) <
           std::tie(b.onset_ms, b.kind, b.action_unit, b.viseme, b.duration_ms, b.intensity);
}

std::vector<TimelineEvent> lip_sync(const std::vector<TimedWord>& words,
                                    const std::map<std::string, std::string>& visemes) {
    std::vector<TimelineEvent> out;
    for (const auto& word : words) {
        std::vector<std::string_view> classes;
        for (char raw : word.text) {
            const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
            if (c < 'a' || c > 'z') continue;
            std::string_view cls;
            switch (c) {
                case 'a': cls = "a"; break;
                case 'e': cls = "e"; break;
                case 'i': cls = "i"; break;
                case 'o': cls = "o"; break;
                case 'u': cls = "u"; break;
                case 'm':
                case 'b':
                case 'p': cls = "mbp"; break;
                case 'f':
                case 'v': cls = "fv"; break;
                case 'w': cls = "w"; break;
                case 'h':
                case 'l': continue;
                default: cls = "wide"; break;
            }
            if (classes.empty() || classes.back() != cls) classes.push_back(cls);
        }
        if (classes.empty()) classes.push_back("wide");

        const auto cap = std::max<std::size_t>(1, static_cast<std::size_t>(word.duration_ms / 60.0));
        if (classes.size() > cap) {
            std::vector<std::string_view> kept;
            for (std::size_t i = 0; i < cap; ++i) kept.push_back(classes[i * classes.size() / cap]);
            classes = std::move(kept);
        }

        const double step = word.duration_ms / static_cast<double>(classes.size());
        for (std::size_t i = 0; i < classes.size(); ++i) {
            TimelineEvent e;
            e.kind = TimelineEvent::Kind::Viseme;
            const std::string cls(classes[i]);
            auto it = visemes.find(cls);
            e.viseme = it == visemes.end() ? cls : it->second;
            e.onset_ms = ms(word.onset_ms + step * static_cast<double>(i));
            e.duration_ms = ms(word.onset_ms + step * static_cast<double>(i + 1)) - e.onset_ms;
            out.push_back(std::move(e));
        }
    }
    return out;
}

OutputBundle verify_and_split(const SeemlDocument& doc, const StyleFile& style) {
    Flat flat;
    flatten(doc.roots, flat);

    std::vector<std::size_t> breaks;
    std::vector<bool> edge(flat.text.size() + 1, false);
    bool facial = false;
    for (const auto& s : flat.spans) {
        if (s.node->is("BREAK")) breaks.push_back(s.begin);
        if (s.node->is("seg") || s.node->is("su") || s.node->is("BREAK")) edge[s.begin] = edge[s.end] = true;
        const TagCategory cat = find_tag(s.node->tag)->category;
        facial |= cat == TagCategory::Expression || cat == TagCategory::ActionUnit;
    }
    const Timing timing(find_words(flat.text, edge), std::move(breaks), style);
    if (facial && timing.words().empty()) {
        throw VerificationError("facial markup in an utterance with no words to anchor it");
    }

    OutputBundle bundle;
    bundle.total_duration_ms = ms(timing.total());
    for (const auto& w : timing.words()) {
        bundle.words.push_back({flat.text.substr(w.begin, w.end - w.begin), w.onset, w.duration});
    }

    auto add_au = [&](int au, double intensity, double onset, double end, bool point) {
        TimelineEvent e;
        e.kind = TimelineEvent::Kind::ActionUnit;
        e.action_unit = au;
        e.intensity = round3(intensity);
        e.onset_ms = ms(onset);
        const double stop = point ? std::min(onset + style.point_ms, timing.total()) : end;
        e.duration_ms = ms(stop) - e.onset_ms;
        bundle.face_timeline.push_back(e);
    };

    for (const auto& s : flat.spans) {
        const Node& n = *s.node;
        const auto [onset, end] = timing.span(s.begin, s.end);
        const bool point = s.begin == s.end || onset == end;
        if (n.is("AU")) {
            add_au(std::stoi(*n.attr("NUM")), level_of(n), onset, end, point);
        } else if (n.is("EXPR")) {
            const std::string& name = *n.attr("NAME");
            auto it = style.expressions.find(name);
            if (it == style.expressions.end()) throw VerificationError("style does not define expression '" + name + "'");
            const double level = level_of(n);
            for (const auto& w : it->second) add_au(w.action_unit, w.weight * level, onset, end, point);
        } else if (n.is("seg")) {
            bundle.phrase_ends_ms.push_back(ms(end));
        }
    }
    std::sort(bundle.phrase_ends_ms.begin(), bundle.phrase_ends_ms.end());
    bundle.phrase_ends_ms.erase(std::unique(bundle.phrase_ends_ms.begin(), bundle.phrase_ends_ms.end()),
                                bundle.phrase_ends_ms.end());

    for (auto& v : lip_sync(bundle.words, style.visemes)) bundle.face_timeline.push_back(std::move(v));
    std::stable_sort(bundle.face_timeline.begin(), bundle.face_timeline.end(), timeline_before);

    std::vector<Node> speech = project_speech(doc.roots, style);
    if (style.base_pitch || style.pitch_range) {
        Attributes pitch;
        if (style.base_pitch) pitch.emplace("BASE", *style.base_pitch);
        if (style.pitch_range) pitch.emplace("RANGE", *style.pitch_range);
        speech = {Node::make_element("PITCH", std::move(pitch), std::move(speech))};
    }
    bundle.speech_script = serialize_seeml(SeemlDocument{{Node::make_element("SABLE", {}, std::move(speech))}});
    return bundle;
}

std::string write_face_timeline(const std::vector<TimelineEvent>& events) {
    std::string out = "#byrne-facs v1\n";
    char buf[32];
    for (const auto& e : events) {
        out += std::to_string(e.onset_ms);
        if (e.kind == TimelineEvent::Kind::ActionUnit) {
            std::snprintf(buf, sizeof buf, "%.3f", e.intensity);
            out += "\tAU\t" + std::to_string(e.action_unit) + "\t" + buf;
        } else {
            out += "\tVIS\t" + e.viseme + "\t-";
        }
        out += "\t" + std::to_string(e.duration_ms) + "\n";
    }
    return out;
}

std::vector<TimelineEvent> read_face_timeline(std::string_view text) {
    std::vector<TimelineEvent> events;
    int line_no = 0;
    bool header = false;
    std::size_t pos = 0;
    auto to_int = [&](std::string_view s) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("bad integer '" + std::string(s) + "'", line_no);
        return v;
    };
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!header) {
            if (line != "#byrne-facs v1") throw ParseError("missing #byrne-facs v1 header", line_no);
            header = true;
            continue;
        }
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string_view> fields;
        for (std::size_t b = 0;;) {
            const auto tab = line.find('\t', b);
            fields.push_back(line.substr(b, tab == std::string_view::npos ? std::string_view::npos : tab - b));
            if (tab == std::string_view::npos) break;
            b = tab + 1;
        }
        if (fields.size() != 5) throw ParseError("expected 5 tab-separated fields", line_no);
        TimelineEvent e;
        e.onset_ms = to_int(fields[0]);
        e.duration_ms = to_int(fields[4]);
        if (fields[1] == "AU") {
            e.kind = TimelineEvent::Kind::ActionUnit;
            e.action_unit = static_cast<int>(to_int(fields[2]));
            auto [p, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), e.intensity);
            if (ec != std::errc()) throw ParseError("bad intensity", line_no);
        } else if (fields[1] == "VIS") {
            e.kind = TimelineEvent::Kind::Viseme;
            e.viseme = std::string(fields[2]);
            e.intensity = 1.0;
        } else {
            throw ParseError("unknown event kind '" + std::string(fields[1]) + "'", line_no);
        }
        events.push_back(std::move(e));
    }
    if (!header) throw ParseError("missing #byrne-facs v1 header", 1);
    return events;
}

}  // namespace byrne
