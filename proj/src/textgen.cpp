#include "byrne/textgen.hpp"

#include <cctype>
#include <limits>

namespace byrne {

namespace {

bool is_slot_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

// Calls on_slot(name) for every slot and on_text(chunk) for the text between.
template <typename OnText, typename OnSlot>
void scan_slots(const std::string& text, OnText&& on_text, OnSlot&& on_slot) {
    std::size_t last = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '?') continue;
        std::size_t j = i + 1;
        while (j < text.size() && is_slot_char(text[j])) ++j;
        while (j > i + 1 && text[j - 1] == '-') --j;
        if (j == i + 1) continue;
        on_text(text.substr(last, i - last));
        on_slot(text.substr(i + 1, j - i - 1));
        last = j;
        i = j - 1;
    }
    on_text(text.substr(last));
}

void collect_slots(const std::vector<Node>& nodes, std::set<std::string>& out, bool& stray) {
    for (const auto& n : nodes) {
        if (n.is_text()) {
            scan_slots(
                n.text, [&](const std::string& chunk) { stray |= chunk.find('?') != std::string::npos; },
                [&](const std::string& name) { out.insert(name); });
        } else {
            collect_slots(n.children, out, stray);
        }
    }
}

void fill(std::vector<Node>& nodes, const Bindings& bindings, const NameTable& names) {
    for (auto& n : nodes) {
        if (n.is_element()) {
            fill(n.children, bindings, names);
            continue;
        }
        std::string out;
        scan_slots(
            n.text, [&](const std::string& chunk) { out += chunk; },
            [&](const std::string& name) {
                auto it = bindings.find(name);
                if (it == bindings.end()) throw InstantiationError("unbound template slot ?" + name);
                out += render_term(it->second, names);
            });
        n.text = std::move(out);
    }
}

}  // namespace

std::set<std::string> slot_variables(const SeemlDocument& doc) {
    std::set<std::string> out;
    bool stray = false;
    collect_slots(doc.roots, out, stray);
    return out;
}

std::vector<Diagnostic> validate_template(const Template& t) {
    std::vector<Diagnostic> diags;
    const std::string where = "template '" + t.id + "': ";
    if (t.preconditions.empty()) diags.push_back({t.line, where + "needs at least one precondition"});

    std::set<std::string> bound;
    for (const auto& p : t.preconditions) collect_variables(p, bound);
    std::set<std::string> used;
    bool stray = false;
    collect_slots(t.body.roots, used, stray);
    for (const auto& v : used) {
        if (!bound.contains(v)) diags.push_back({t.line, where + "unbound variable ?" + v});
    }
    if (stray) diags.push_back({t.line, where + "stray '?' in text"});

    bool has_seg = false;
    for_each_element(t.body.roots, [&](const Node& n) { has_seg |= n.is("seg"); });
    if (!has_seg) diags.push_back({t.line, where + "body has no <seg> phrase"});
    return diags;
}

TemplateUsage UsageHistory::usage(const std::string& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? TemplateUsage{} : it->second;
}

UsageHistory record_usage(UsageHistory history, const std::string& id, double now) {
    auto& u = history.entries_[id];
    ++u.use_count;
    u.last_used = now;
    return history;
}

std::vector<Bindings> template_bindings(const Template& t, const GameFact& fact, std::span<const Fact> statics) {
    if (t.preconditions.empty()) return {};
    const Sexpr target = fact.fact.to_sexpr();
    Bindings seed;
    if (!unify(t.preconditions.front(), target, seed)) return {};
    std::vector<Sexpr> kb{target};
    for (const auto& s : statics) kb.push_back(s.to_sexpr());
    return match_all(std::span(t.preconditions).subspan(1), kb, seed);
}

TemplateChoice select_template(const GameFact& fact, std::span<const Template> templates, const UsageHistory& history,
                               double now, std::span<const Fact> statics, double use_penalty) {
    TemplateChoice best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& t : templates) {
        auto bindings = template_bindings(t, fact, statics);
        if (bindings.empty()) continue;
        const TemplateUsage u = history.usage(t.id);
        const double recency = u.last_used ? now - *u.last_used : std::numeric_limits<double>::infinity();
        const double score = recency - use_penalty * u.use_count;
        if (best.chosen == nullptr || score > best_score || (score == best_score && t.id < best.chosen->id)) {
            best.chosen = &t;
            best.bindings = std::move(bindings.front());
            best_score = score;
        }
    }
    if (best.chosen == nullptr) throw CoverageError(fact.predicate());
    return best;
}

std::string render_term(const Sexpr& term, const NameTable& names) {
    switch (term.kind()) {
        case Sexpr::Kind::Symbol: {
            auto it = names.find(term.text());
            return it == names.end() ? term.text() : it->second;
        }
        case Sexpr::Kind::Number: return format_number(term.number_value());
        case Sexpr::Kind::String: return term.text();
        default: return to_string(term);
    }
}

SeemlDocument instantiate(const Template& t, const Bindings& bindings, const NameTable& names) {
    SeemlDocument doc = t.body;
    fill(doc.roots, bindings, names);
    normalize(doc.roots);
    return doc;
}

}  // namespace byrne
