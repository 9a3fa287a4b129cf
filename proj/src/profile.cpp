#include "byrne/profile.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace byrne {

namespace {

[[noreturn]] void syntax(const Sexpr& at, const std::string& message) { throw ParseError(message, at.line()); }

const std::string& head_of(const Sexpr& form) {
    if (!form.is_list() || form.items().empty() || !form.items().front().is_symbol()) {
        syntax(form, "expected a (form ...) but got " + to_string(form));
    }
    return form.items().front().text();
}

/// Splits the items after the head into keyword arguments and sub-forms.
struct FormParts {
    std::vector<std::pair<std::string, const Sexpr*>> keywords;
    std::vector<const Sexpr*> positional;
};

FormParts parts_of(const Sexpr& form, std::size_t first = 1) {
    FormParts parts;
    const auto& items = form.items();
    for (std::size_t i = first; i < items.size(); ++i) {
        if (items[i].is_keyword()) {
            if (i + 1 >= items.size()) syntax(items[i], "missing value for " + items[i].text() + ":");
            parts.keywords.emplace_back(items[i].text(), &items[i + 1]);
            ++i;
        } else {
            parts.positional.push_back(&items[i]);
        }
    }
    return parts;
}

const Sexpr* keyword(const FormParts& parts, std::string_view key) {
    for (const auto& [k, v] : parts.keywords) {
        if (k == key) return v;
    }
    return nullptr;
}

void reject_unknown_keywords(const FormParts& parts, std::initializer_list<std::string_view> allowed, const Sexpr& form) {
    for (const auto& [k, v] : parts.keywords) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            syntax(*v, "unexpected " + k + ": in (" + head_of(form) + " ...)");
        }
    }
}

std::string symbol_arg(const Sexpr* v, const Sexpr& form, const std::string& what) {
    if (v == nullptr || !(v->is_symbol() || v->is_string())) syntax(form, head_of(form) + " needs " + what);
    return v->text();
}

std::vector<Sexpr> tail(const Sexpr& form) { return {form.items().begin() + 1, form.items().end()}; }

// --- directives ------------------------------------------------------------

DirectiveScope parse_scope(const Sexpr& s) {
    if (s.is_symbol()) {
        const std::string& t = s.text();
        if (t == "utterance") return {DirectiveScope::Kind::Utterance, {}};
        if (t == "phrase") return {DirectiveScope::Kind::EveryPhrase, {}};
        if (t == "start") return {DirectiveScope::Kind::PointStart, {}};
        if (t == "end") return {DirectiveScope::Kind::PointEnd, {}};
    } else if (s.is_list() && s.items().size() == 2 && s.items()[0].is_symbol("word") &&
               (s.items()[1].is_symbol() || s.items()[1].is_string())) {
        return {DirectiveScope::Kind::LexicalTrigger, s.items()[1].text()};
    }
    syntax(s, "scope must be utterance, phrase, start, end or (word <w>), got " + to_string(s));
}

Sexpr scope_sexpr(const DirectiveScope& s) {
    switch (s.kind) {
        case DirectiveScope::Kind::Utterance: return Sexpr::symbol("utterance");
        case DirectiveScope::Kind::EveryPhrase: return Sexpr::symbol("phrase");
        case DirectiveScope::Kind::PointStart: return Sexpr::symbol("start");
        case DirectiveScope::Kind::PointEnd: return Sexpr::symbol("end");
        case DirectiveScope::Kind::LexicalTrigger:
            return Sexpr::list({Sexpr::symbol("word"), Sexpr::string(s.word)});
    }
    return Sexpr::symbol("utterance");
}

std::string attr_value(const Sexpr& v) {
    if (v.is_number()) return format_number(v.number_value());
    if (v.is_symbol() || v.is_string()) return v.text();
    syntax(v, "attribute value must be a symbol, string or number");
}

MarkupDirective parse_directive(const Sexpr& form) {
    const std::string& head = head_of(form);
    if (form.items().size() < 2) syntax(form, "(" + head + " ...) needs a name");
    const Sexpr& name = form.items()[1];
    const FormParts parts = parts_of(form, 2);
    if (!parts.positional.empty()) syntax(*parts.positional.front(), "unexpected " + to_string(*parts.positional.front()));

    MarkupDirective d;
    if (const Sexpr* s = keyword(parts, "scope")) d.scope = parse_scope(*s);
    auto level = [&] {
        const Sexpr* l = keyword(parts, "level");
        if (l == nullptr) return 1.0;
        if (!l->is_number()) syntax(*l, "level: must be a number");
        return l->number_value();
    };

    if (head == "expr") {
        reject_unknown_keywords(parts, {"level", "scope"}, form);
        d.kind = MarkupDirective::Kind::FacialExpression;
        d.name = symbol_arg(&name, form, "an expression name");
        d.intensity = level();
    } else if (head == "au") {
        reject_unknown_keywords(parts, {"level", "scope"}, form);
        d.kind = MarkupDirective::Kind::ActionUnit;
        if (!name.is_number() || name.number_value() != static_cast<int>(name.number_value())) {
            syntax(name, "au needs an integer action unit");
        }
        d.action_unit = static_cast<int>(name.number_value());
        d.intensity = level();
    } else if (head == "aural") {
        reject_unknown_keywords(parts, {"scope"}, form);
        d.kind = MarkupDirective::Kind::AuralEvent;
        d.name = symbol_arg(&name, form, "an event name");
    } else if (head == "speech") {
        d.kind = MarkupDirective::Kind::SpeechTag;
        d.name = symbol_arg(&name, form, "a tag name");
        for (auto& c : d.name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        for (const auto& [k, v] : parts.keywords) {
            if (k == "scope") continue;
            std::string key = k;
            for (auto& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            d.attrs.emplace(std::move(key), attr_value(*v));
        }
    } else {
        syntax(form, "unknown directive '" + head + "'");
    }
    return d;
}

Sexpr directive_sexpr(const MarkupDirective& d) {
    std::vector<Sexpr> items;
    switch (d.kind) {
        case MarkupDirective::Kind::FacialExpression:
            items = {Sexpr::symbol("expr"), Sexpr::symbol(d.name), Sexpr::keyword("level"), Sexpr::number(d.intensity)};
            break;
        case MarkupDirective::Kind::ActionUnit:
            items = {Sexpr::symbol("au"), Sexpr::number(d.action_unit), Sexpr::keyword("level"),
                     Sexpr::number(d.intensity)};
            break;
        case MarkupDirective::Kind::AuralEvent: items = {Sexpr::symbol("aural"), Sexpr::symbol(d.name)}; break;
        case MarkupDirective::Kind::SpeechTag:
            items = {Sexpr::symbol("speech"), Sexpr::symbol(d.name)};
            for (const auto& [k, v] : d.attrs) {
                std::string key = k;
                for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                items.push_back(Sexpr::keyword(key));
                items.push_back(Sexpr::string(v));
            }
            break;
    }
    items.push_back(Sexpr::keyword("scope"));
    items.push_back(scope_sexpr(d.scope));
    return Sexpr::list(std::move(items));
}

// --- top-level forms -------------------------------------------------------

EmotionRule parse_rule(const Sexpr& form) {
    EmotionRule rule;
    const FormParts parts = parts_of(form);
    reject_unknown_keywords(parts, {}, form);
    for (const Sexpr* sub : parts.positional) {
        const std::string& h = head_of(*sub);
        if (h == "pre") {
            rule.preconditions = tail(*sub);
        } else if (h == "add") {
            for (const auto& s : tail(*sub)) rule.additions.push_back(EmotionSchema::parse(s));
        } else if (h == "del") {
            rule.deletions = tail(*sub);
        } else {
            syntax(*sub, "unexpected (" + h + " ...) in emotion-rule");
        }
    }
    return rule;
}

BehaviorSpec parse_behavior(const Sexpr& form) {
    BehaviorSpec b;
    b.line = form.line();
    const FormParts parts = parts_of(form);
    reject_unknown_keywords(parts, {"id", "group"}, form);
    b.id = symbol_arg(keyword(parts, "id"), form, "id:");
    b.group = symbol_arg(keyword(parts, "group"), form, "group:");
    for (const Sexpr* sub : parts.positional) {
        const std::string& h = head_of(*sub);
        if (h == "motivated-by") {
            const auto& items = sub->items();
            for (std::size_t i = 1; i < items.size(); ++i) {
                if (items[i].is_keyword()) {
                    if (items[i].text() != "target" || b.motivated_by.empty() || i + 1 >= items.size()) {
                        syntax(items[i], "target: must follow an emotion type");
                    }
                    b.motivated_by.back().target = items[++i];
                    continue;
                }
                auto type = items[i].is_symbol() ? parse_emotion_type(items[i].text()) : std::nullopt;
                if (!type) syntax(items[i], "unknown emotion type " + to_string(items[i]));
                b.motivated_by.push_back({*type, std::nullopt});
            }
        } else if (h == "pre") {
            b.preconditions = tail(*sub);
        } else if (h == "children") {
            for (const auto& c : tail(*sub)) {
                if (!c.is_symbol()) syntax(c, "child ids must be symbols");
                b.children.push_back(c.text());
            }
        } else if (h == "directives") {
            for (const auto& d : tail(*sub)) b.directives.push_back(parse_directive(d));
        } else {
            syntax(*sub, "unexpected (" + h + " ...) in behavior");
        }
    }
    return b;
}

Template parse_template(const Sexpr& form) {
    Template t;
    t.line = form.line();
    const FormParts parts = parts_of(form);
    reject_unknown_keywords(parts, {"id"}, form);
    t.id = symbol_arg(keyword(parts, "id"), form, "id:");
    bool has_text = false;
    for (const Sexpr* sub : parts.positional) {
        const std::string& h = head_of(*sub);
        if (h == "pre") {
            t.preconditions = tail(*sub);
        } else if (h == "text") {
            if (sub->items().size() != 2 || !sub->items()[1].is_string()) syntax(*sub, "expected (text \"...\")");
            t.body_text = sub->items()[1].text();
            has_text = true;
        } else {
            syntax(*sub, "unexpected (" + h + " ...) in template");
        }
    }
    if (!has_text) syntax(form, "template '" + t.id + "' has no (text ...)");
    return t;
}

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

CharacterProfile load_profile(std::string_view text) {
    CharacterProfile p;
    std::vector<Sexpr> forms;
    try {
        forms = read_sexprs(text);
        for (const auto& form : forms) {
            const std::string& head = head_of(form);
            if (head == "static") {
                if (form.items().size() != 2) syntax(form, "expected (static <fact>)");
                Fact f = fact_from_sexpr(form.items()[1]);
                if (!f.to_sexpr().is_ground()) syntax(form, "static facts cannot contain variables");
                if (std::find(p.statics.begin(), p.statics.end(), f) == p.statics.end()) p.statics.push_back(std::move(f));
            } else if (head == "names") {
                for (const auto& entry : tail(form)) {
                    if (!entry.is_list() || entry.items().size() != 2 || !entry.items()[0].is_symbol() ||
                        !entry.items()[1].is_string()) {
                        syntax(entry, "expected (<id> \"<display name>\")");
                    }
                    p.name_table[entry.items()[0].text()] = entry.items()[1].text();
                }
            } else if (head == "params") {
                const FormParts parts = parts_of(form);
                reject_unknown_keywords(parts, {"lambda"}, form);
                if (const Sexpr* l = keyword(parts, "lambda")) {
                    if (!l->is_number() || l->number_value() < 0.0) syntax(*l, "lambda: must be a non-negative number");
                    p.lambda_use_penalty = l->number_value();
                }
            } else if (head == "emotion-rule") {
                p.emotion_rules.push_back(parse_rule(form));
            } else if (head == "behavior") {
                p.behaviors.push_back(parse_behavior(form));
            } else if (head == "template") {
                p.templates.push_back(parse_template(form));
            } else {
                syntax(form, "unknown profile form '" + head + "'");
            }
        }
    } catch (const ParseError& e) {
        throw ProfileError({{e.line(), e.what()}});
    }

    std::vector<Diagnostic> diags;
    std::size_t rule_index = 0;
    for (const auto& rule : p.emotion_rules) {
        ++rule_index;
        for (const auto& v : rule.unbound_variables()) {
            diags.push_back({0, "emotion-rule #" + std::to_string(rule_index) + ": unbound variable ?" + v});
        }
    }
    for (auto& d : validate_behaviors(p.behaviors)) diags.push_back(std::move(d));

    std::set<std::string> template_ids;
    for (auto& t : p.templates) {
        if (!template_ids.insert(t.id).second) diags.push_back({t.line, "duplicate template id '" + t.id + "'"});
        try {
            t.body = parse_seeml(t.body_text);
        } catch (const ParseError& e) {
            diags.push_back({t.line, "template '" + t.id + "': " + e.what()});
            continue;
        }
        for (auto& d : validate_template(t)) diags.push_back(std::move(d));
    }
    if (!diags.empty()) throw ProfileError(std::move(diags));
    return p;
}

std::string dump_profile(const CharacterProfile& profile) {
    std::ostringstream out;
    if (profile.lambda_use_penalty != kDefaultUsePenaltySeconds) {
        out << "(params lambda: " << format_number(profile.lambda_use_penalty) << ")\n";
    }
    if (!profile.name_table.empty()) {
        out << "(names";
        for (const auto& [id, name] : profile.name_table) {
            out << "\n  " << to_string(Sexpr::list({Sexpr::symbol(id), Sexpr::string(name)}));
        }
        out << ")\n";
    }
    for (const auto& s : profile.statics) out << "(static " << to_string(s) << ")\n";
    for (const auto& r : profile.emotion_rules) {
        out << "(emotion-rule\n  (pre";
        for (const auto& p : r.preconditions) out << " " << to_string(p);
        out << ")\n  (add";
        for (const auto& a : r.additions) out << "\n    " << to_string(a.to_sexpr());
        out << ")\n  (del";
        for (const auto& d : r.deletions) out << " " << to_string(d);
        out << "))\n";
    }
    for (const auto& b : profile.behaviors) {
        out << "(behavior id: " << b.id << " group: " << b.group;
        if (!b.motivated_by.empty()) {
            out << "\n  (motivated-by";
            for (const auto& m : b.motivated_by) {
                out << " " << to_string(m.type);
                if (m.target) out << " target: " << to_string(*m.target);
            }
            out << ")";
        }
        if (!b.preconditions.empty()) {
            out << "\n  (pre";
            for (const auto& p : b.preconditions) out << " " << to_string(p);
            out << ")";
        }
        if (!b.children.empty()) {
            out << "\n  (children";
            for (const auto& c : b.children) out << " " << c;
            out << ")";
        }
        if (!b.directives.empty()) {
            out << "\n  (directives";
            for (const auto& d : b.directives) out << "\n    " << to_string(directive_sexpr(d));
            out << ")";
        }
        out << ")\n";
    }
    for (const auto& t : profile.templates) {
        out << "(template id: " << t.id << "\n  (pre";
        for (const auto& p : t.preconditions) out << " " << to_string(p);
        out << ")\n  (text " << to_string(Sexpr::string(serialize_seeml(t.body))) << "))\n";
    }
    return out.str();
}

StyleFile load_style(std::string_view text) {
    StyleFile style;
    std::set<std::string> sections_seen;
    std::string section;
    int line_no = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw StyleError("style line " + std::to_string(line_no) + ": " + msg);
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section != "expressions" && section != "aural" && section != "speech" && section != "visemes") {
                fail("unknown section [" + section + "]");
            }
            if (!sections_seen.insert(section).second) fail("duplicate section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (section.empty()) fail("key '" + key + "' outside any section");

        if (section == "expressions") {
            if (!is_expression_name(key)) fail("unknown expression '" + key + "'");
            std::vector<StyleFile::ActionUnitWeight> aus;
            std::istringstream words(value);
            std::string tok;
            while (words >> tok) {
                const auto colon = tok.find(':');
                if (tok.size() < 3 || (tok[0] != 'A' && tok[0] != 'a') || (tok[1] != 'U' && tok[1] != 'u') ||
                    colon == std::string::npos) {
                    fail("expected AU<k>:<weight>, got '" + tok + "'");
                }
                const auto au = to_double(std::string_view(tok).substr(2, colon - 2));
                const auto w = to_double(std::string_view(tok).substr(colon + 1));
                if (!au || *au != static_cast<int>(*au) || *au < 1 || *au > kMaxActionUnit) {
                    fail("action unit in '" + tok + "' outside 1.." + std::to_string(kMaxActionUnit));
                }
                if (!w || *w < 0.0 || *w > 1.0) fail("weight in '" + tok + "' outside [0, 1]");
                aus.push_back({static_cast<int>(*au), *w});
            }
            if (aus.empty()) fail("expression '" + key + "' maps to no action units");
            style.expressions[key] = std::move(aus);
        } else if (section == "aural") {
            style.aural[key] = value;
        } else if (section == "visemes") {
            if (std::find(kVisemeClasses.begin(), kVisemeClasses.end(), key) == kVisemeClasses.end()) {
                fail("unknown letter class '" + key + "'");
            }
            style.visemes[key] = value;
        } else {
            auto number = [&]() {
                auto v = to_double(value);
                if (!v) fail(key + " must be a number");
                return *v;
            };
            if (key == "words_per_minute") {
                style.words_per_minute = number();
                if (!(style.words_per_minute > 0.0)) fail("words_per_minute must be positive");
            } else if (key == "break_ms") {
                style.break_ms = number();
                if (style.break_ms < 0.0) fail("break_ms must not be negative");
            } else if (key == "point_ms") {
                style.point_ms = number();
                if (style.point_ms < 0.0) fail("point_ms must not be negative");
            } else if (key == "base_pitch") {
                style.base_pitch = value;
            } else if (key == "pitch_range") {
                style.pitch_range = value;
            } else {
                fail("unknown speech setting '" + key + "'");
            }
        }
    }
    for (const char* required : {"expressions", "speech"}) {
        if (!sections_seen.contains(required)) throw StyleError(std::string("style is missing section [") + required + "]");
    }
    for (auto name : kExpressionNames) {
        if (!style.expressions.contains(std::string(name))) {
            throw StyleError("style does not define expression '" + std::string(name) + "'");
        }
    }
    return style;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace byrne
