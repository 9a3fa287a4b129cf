#include "byrne/markup.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

#include "byrne/error.hpp"
#include "byrne/sexpr.hpp"

namespace byrne {

namespace {

struct Numeric {
    double value;
    bool is_signed;
    std::string unit;
};

std::optional<Numeric> parse_numeric(std::string_view s) {
    if (s.empty()) return std::nullopt;
    Numeric n{0.0, s.front() == '+' || s.front() == '-', ""};
    if (s.back() == '%') {
        n.unit = "%";
        s.remove_suffix(1);
    }
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '.')) return std::nullopt;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n.value, std::chars_format::fixed);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    if (negative) n.value = -n.value;
    return n;
}

// Attributes that name what a tag is rather than how much of it.
bool is_identifier_attr(const std::string& name) { return name == "NUM"; }

std::optional<Numeric> parameter_value(const std::string& name, const std::string& value) {
    if (is_identifier_attr(name)) return std::nullopt;
    return parse_numeric(value);
}

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

bool iequal_at(std::string_view text, std::size_t pos, std::string_view word) {
    if (pos + word.size() > text.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != std::tolower(static_cast<unsigned char>(word[i]))) {
            return false;
        }
    }
    return true;
}

std::string trim_copy(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

// Splits one text node around whole-word occurrences of `word`.
void wrap_in_text(const std::string& text, const std::string& word, const Node& wrapper, std::vector<Node>& out) {
    std::size_t last = 0;
    for (std::size_t i = 0; i + word.size() <= text.size();) {
        const bool starts = i == 0 || !is_word_byte(text[i - 1]);
        const bool ends = i + word.size() == text.size() || !is_word_byte(text[i + word.size()]);
        if (starts && ends && iequal_at(text, i, word)) {
            if (i > last) out.push_back(Node::make_text(text.substr(last, i - last)));
            Node w = wrapper;
            w.children.push_back(Node::make_text(text.substr(i, word.size())));
            out.push_back(std::move(w));
            i += word.size();
            last = i;
        } else {
            ++i;
        }
    }
    if (last < text.size()) out.push_back(Node::make_text(text.substr(last)));
}

std::vector<Node> wrap_words(std::vector<Node> nodes, const std::string& word, const Node& wrapper) {
    std::vector<Node> out;
    for (auto& n : nodes) {
        if (n.is_text()) {
            wrap_in_text(n.text, word, wrapper, out);
        } else if (n.is("w") && iequal_at(trim_copy(plain_text(n)), 0, word) &&
                   trim_copy(plain_text(n)).size() == word.size()) {
            Node w = wrapper;
            w.children.push_back(std::move(n));
            out.push_back(std::move(w));
        } else {
            n.children = wrap_words(std::move(n.children), word, wrapper);
            out.push_back(std::move(n));
        }
    }
    return out;
}

std::vector<Node> wrap_phrases(std::vector<Node> nodes, const Node& wrapper) {
    std::vector<Node> out;
    for (auto& n : nodes) {
        if (n.is("seg")) {
            Node w = wrapper;
            w.children.push_back(std::move(n));
            out.push_back(std::move(w));
        } else {
            if (n.is_element()) n.children = wrap_phrases(std::move(n.children), wrapper);
            out.push_back(std::move(n));
        }
    }
    return out;
}

// --- combination rules ---------------------------------------------------

bool identical(const Node& a, const std::string& identity) { return a.is_element() && tag_identity(a) == identity; }

bool contains_identical(const std::vector<Node>& nodes, const std::string& identity) {
    for (const auto& n : nodes) {
        if (!n.is_element()) continue;
        if (identical(n, identity) || contains_identical(n.children, identity)) return true;
    }
    return false;
}

// Removes every descendant identical to the enclosing element, keeping its content.
std::vector<Node> strip_identical(std::vector<Node> nodes, const std::string& identity) {
    std::vector<Node> out;
    for (auto& n : nodes) {
        if (!n.is_element()) {
            out.push_back(std::move(n));
            continue;
        }
        auto children = strip_identical(std::move(n.children), identity);
        if (identical(n, identity)) {
            for (auto& c : children) out.push_back(std::move(c));
        } else {
            n.children = std::move(children);
            out.push_back(std::move(n));
        }
    }
    return out;
}

Node summed(const Node& outer, Node inner) {
    for (auto& [name, value] : inner.attrs) {
        const auto a = parameter_value(name, value);
        const std::string* ov = outer.attr(name);
        if (!a || ov == nullptr) continue;
        const auto b = parameter_value(name, *ov);
        if (!b) continue;
        value = format_delta(a->value + b->value, a->unit);
    }
    return inner;
}

// Pushes the delta tag `outer` down over `nodes` so that it never encloses an
// identical tag: identical delta descendants absorb its change, everything
// else is wrapped in copies of it.
std::vector<Node> distribute(const Node& outer, const std::string& identity, std::vector<Node> nodes) {
    std::vector<Node> out;
    std::vector<Node> run;
    auto flush = [&] {
        if (run.empty()) return;
        Node copy = Node::make_element(outer.tag, outer.attrs, std::move(run));
        run.clear();
        normalize(copy.children);
        out.push_back(std::move(copy));
    };
    for (auto& n : nodes) {
        if (identical(n, identity)) {
            if (is_delta_tag(n)) {
                flush();
                out.push_back(summed(outer, std::move(n)));
            } else {
                for (auto& c : n.children) run.push_back(std::move(c));
            }
        } else if (n.is_element() && contains_identical(n.children, identity)) {
            flush();
            n.children = distribute(outer, identity, std::move(n.children));
            out.push_back(std::move(n));
        } else {
            run.push_back(std::move(n));
        }
    }
    flush();
    return out;
}

std::vector<Node> merge_list(std::vector<Node> nodes) {
    std::vector<Node> out;
    for (auto& n : nodes) {
        if (!n.is_element()) {
            out.push_back(std::move(n));
            continue;
        }
        n.children = merge_list(std::move(n.children));
        const std::string identity = tag_identity(n);
        if (!contains_identical(n.children, identity)) {
            out.push_back(std::move(n));
        } else if (is_delta_tag(n)) {
            auto children = std::move(n.children);
            n.children.clear();
            for (auto& piece : distribute(n, identity, std::move(children))) out.push_back(std::move(piece));
        } else {
            n.children = strip_identical(std::move(n.children), identity);
            out.push_back(std::move(n));
        }
    }
    normalize(out);
    return out;
}

}  // namespace

void MarkupDirective::validate() const {
    if (scope.kind == DirectiveScope::Kind::LexicalTrigger) {
        if (scope.word.empty()) throw DirectiveError("lexical trigger needs a word");
        for (char c : scope.word) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                throw DirectiveError("lexical trigger '" + scope.word + "' must be a single word");
            }
        }
    }
    auto check_intensity = [&] {
        if (!(intensity >= 0.0 && intensity <= 1.0)) {
            throw DirectiveError("intensity " + format_number(intensity) + " outside [0, 1]");
        }
    };
    switch (kind) {
        case Kind::FacialExpression:
            if (!is_expression_name(name)) throw DirectiveError("unknown facial expression '" + name + "'");
            if (scope.is_point()) throw DirectiveError("facial expression '" + name + "' needs a span, not a point");
            check_intensity();
            break;
        case Kind::ActionUnit:
            if (action_unit < 1 || action_unit > kMaxActionUnit) {
                throw DirectiveError("action unit " + std::to_string(action_unit) + " outside 1.." +
                                     std::to_string(kMaxActionUnit));
            }
            check_intensity();
            break;
        case Kind::AuralEvent:
            if (name.empty()) throw DirectiveError("aural event needs a name");
            if (!scope.is_point()) throw DirectiveError("aural event '" + name + "' must be placed at start or end");
            break;
        case Kind::SpeechTag: {
            const TagInfo* info = find_tag(name);
            if (info == nullptr || (info->category != TagCategory::Sable && info->category != TagCategory::Affect) ||
                info->name == "SABLE") {
                throw DirectiveError("'" + name + "' is not a speech tag");
            }
            if (info->always_empty != scope.is_point()) {
                throw DirectiveError(std::string(info->name) +
                                     (info->always_empty ? " must be placed at start or end" : " needs a span, not a point"));
            }
            try {
                validate_element(make_element());
            } catch (const ParseError& e) {
                throw DirectiveError(e.what());
            }
            break;
        }
    }
}

Node MarkupDirective::make_element() const {
    switch (kind) {
        case Kind::FacialExpression:
            return Node::make_element("EXPR", {{"LEVEL", format_number(intensity)}, {"NAME", name}});
        case Kind::ActionUnit:
            return Node::make_element("AU", {{"LEVEL", format_number(intensity)}, {"NUM", std::to_string(action_unit)}});
        case Kind::AuralEvent: return Node::make_element("EVENT", {{"NAME", name}});
        case Kind::SpeechTag: {
            const TagInfo* info = find_tag(name);
            Attributes upper;
            for (const auto& [k, v] : attrs) {
                std::string key = k;
                for (auto& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                upper.emplace(std::move(key), v);
            }
            return Node::make_element(info ? std::string(info->name) : name, std::move(upper));
        }
    }
    return Node::make_element(name);
}

SeemlDocument apply_directives(SeemlDocument doc, const std::vector<MarkupDirective>& directives) {
    for (const auto& d : directives) {
        d.validate();
        Node wrapper = d.make_element();
        switch (d.scope.kind) {
            case DirectiveScope::Kind::Utterance:
                wrapper.children = std::move(doc.roots);
                doc.roots = {std::move(wrapper)};
                break;
            case DirectiveScope::Kind::EveryPhrase: doc.roots = wrap_phrases(std::move(doc.roots), wrapper); break;
            case DirectiveScope::Kind::LexicalTrigger:
                doc.roots = wrap_words(std::move(doc.roots), d.scope.word, wrapper);
                break;
            case DirectiveScope::Kind::PointStart: doc.roots.insert(doc.roots.begin(), std::move(wrapper)); break;
            case DirectiveScope::Kind::PointEnd: doc.roots.push_back(std::move(wrapper)); break;
        }
        normalize(doc.roots);
    }
    return doc;
}

std::string tag_identity(const Node& element) {
    std::string plain;
    std::string numeric;
    for (const auto& [name, value] : element.attrs) {
        if (auto n = parameter_value(name, value)) {
            numeric += " " + name + "#" + n->unit;
        } else {
            plain += " " + name + "=" + value;
        }
    }
    return element.tag + plain + " |" + numeric;
}

bool is_delta_tag(const Node& element) {
    bool any = false;
    for (const auto& [name, value] : element.attrs) {
        if (auto n = parameter_value(name, value)) {
            if (!n->is_signed) return false;
            any = true;
        }
    }
    return any;
}

SeemlDocument merge_tags(SeemlDocument doc) {
    doc.roots = merge_list(std::move(doc.roots));
    return doc;
}

std::string format_delta(double value, std::string_view unit) {
    double rounded = std::round(value * 1e6) / 1e6;
    if (rounded == 0.0) rounded = 0.0;
    return (rounded >= 0.0 ? "+" : "") + format_number(rounded) + std::string(unit);
}

}  // namespace byrne
