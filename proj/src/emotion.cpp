#include "byrne/emotion.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "byrne/error.hpp"

namespace byrne {

namespace {

constexpr std::array<std::pair<EmotionType, std::string_view>, 7> kEmotionNames{{
    {EmotionType::Fear, "fear"},
    {EmotionType::Anger, "anger"},
    {EmotionType::Sadness, "sadness"},
    {EmotionType::Happiness, "happiness"},
    {EmotionType::Disgust, "disgust"},
    {EmotionType::Surprise, "surprise"},
    {EmotionType::Interest, "interest"},
}};

Sexpr nil() { return Sexpr::symbol("nil"); }

std::optional<Sexpr> optional_target(const Sexpr* value) {
    if (value == nullptr || value->is_symbol("nil")) return std::nullopt;
    return *value;
}

std::vector<Sexpr> knowledge(const FactBoard& facts, std::span<const Fact> statics, const EmotionPool& pool) {
    std::vector<Sexpr> out;
    out.reserve(facts.size() + statics.size() + pool.size());
    for (const auto& [key, f] : facts.entries()) out.push_back(f.fact.to_sexpr());
    for (const auto& s : statics) out.push_back(s.to_sexpr());
    for (const auto& e : pool.structures()) out.push_back(e.to_sexpr());
    return out;
}

}  // namespace

std::string_view to_string(EmotionType type) {
    for (const auto& [t, name] : kEmotionNames) {
        if (t == type) return name;
    }
    return "?";
}

std::optional<EmotionType> parse_emotion_type(std::string_view name) {
    for (const auto& [t, n] : kEmotionNames) {
        if (n == name) return t;
    }
    return std::nullopt;
}

double DecayFunction::operator()(double t) const {
    double v = 1.0;
    switch (form) {
        case Form::Reciprocal: v = 1.0 / t; break;
        case Form::Exponential: v = std::exp(-rate * (t - 1.0)); break;
        case Form::Linear: v = 1.0 - rate * (t - 1.0); break;
        case Form::Constant: v = 1.0; break;
    }
    return std::clamp(v, 0.0, 1.0);
}

DecayFunction DecayFunction::parse(const Sexpr& expr) {
    if (!expr.is_symbol()) throw ParseError("decay must be 1/t, exp:<rate>, linear:<rate> or constant", expr.line());
    const std::string& s = expr.text();
    if (s == "1/t") return {Form::Reciprocal, 0.0};
    if (s == "constant") return {Form::Constant, 0.0};
    for (auto [prefix, form] : {std::pair{std::string_view("exp:"), Form::Exponential},
                                std::pair{std::string_view("linear:"), Form::Linear}}) {
        if (s.starts_with(prefix)) {
            const Sexpr rate = read_sexpr(std::string_view(s).substr(prefix.size()), expr.line());
            if (!rate.is_number() || rate.number_value() < 0.0) {
                throw ParseError("decay rate must be a non-negative number in '" + s + "'", expr.line());
            }
            return {form, rate.number_value()};
        }
    }
    throw ParseError("unknown decay function '" + s + "'", expr.line());
}

std::string DecayFunction::to_string() const {
    switch (form) {
        case Form::Reciprocal: return "1/t";
        case Form::Exponential: return "exp:" + format_number(rate);
        case Form::Linear: return "linear:" + format_number(rate);
        case Form::Constant: return "constant";
    }
    return "constant";
}

Sexpr EmotionStructure::to_sexpr() const {
    return Sexpr::list({Sexpr::symbol("emotion"), Sexpr::keyword("type"), Sexpr::symbol(std::string(byrne::to_string(type))),
                        Sexpr::keyword("target"), target.value_or(nil()), Sexpr::keyword("cause"), cause});
}

std::string EmotionStructure::identity() const { return byrne::to_string(to_sexpr()); }

double intensity_at(const EmotionStructure& e, double now) {
    if (now < e.created_at) {
        throw ClockError("emotion created at " + format_number(e.created_at) + " evaluated at " + format_number(now));
    }
    const double t = std::max(1.0, now - e.created_at);
    if (e.decay.form == DecayFunction::Form::Reciprocal) return e.base_intensity / t;
    return e.base_intensity * e.decay(t);
}

EmotionSchema EmotionSchema::parse(const Sexpr& expr) {
    if (!expr.is_list() || expr.items().empty() || !expr.items().front().is_keyword()) {
        throw ParseError("expected (type: ... intensity: ... cause: ... decay: ...)", expr.line());
    }
    if (expr.items().size() % 2 != 0) throw ParseError("dangling keyword in emotion schema", expr.line());
    for (std::size_t i = 0; i < expr.items().size(); i += 2) {
        static const std::set<std::string> known{"type", "intensity", "target", "cause", "decay"};
        const auto& k = expr.items()[i];
        if (!k.is_keyword() || !known.contains(k.text())) {
            throw ParseError("unexpected " + byrne::to_string(k) + " in emotion schema", k.line());
        }
    }
    EmotionSchema s;
    const Sexpr* type = expr.find_keyword("type");
    if (type == nullptr || !type->is_symbol()) throw ParseError("emotion schema needs type:", expr.line());
    auto parsed = parse_emotion_type(type->text());
    if (!parsed) throw ParseError("unknown emotion type '" + type->text() + "'", type->line());
    s.type = *parsed;

    const Sexpr* intensity = expr.find_keyword("intensity");
    if (intensity == nullptr || !intensity->is_number() || intensity->number_value() <= 0.0 ||
        intensity->number_value() > 10.0) {
        throw ParseError("intensity: must be a number in (0, 10]", expr.line());
    }
    s.intensity = intensity->number_value();
    s.target = optional_target(expr.find_keyword("target"));

    const Sexpr* cause = expr.find_keyword("cause");
    if (cause == nullptr || !(cause->is_list() || cause->is_variable())) {
        throw ParseError("emotion schema needs cause: (<fact>) or a variable bound to one", expr.line());
    }
    s.cause = *cause;

    const Sexpr* decay = expr.find_keyword("decay");
    if (decay == nullptr) throw ParseError("emotion schema needs decay:", expr.line());
    s.decay = DecayFunction::parse(*decay);
    return s;
}

Sexpr EmotionSchema::to_sexpr() const {
    return Sexpr::list({Sexpr::keyword("type"), Sexpr::symbol(std::string(byrne::to_string(type))),
                        Sexpr::keyword("intensity"), Sexpr::number(intensity), Sexpr::keyword("target"),
                        target.value_or(nil()), Sexpr::keyword("cause"), cause, Sexpr::keyword("decay"),
                        Sexpr::symbol(decay.to_string())});
}

EmotionStructure EmotionSchema::instantiate(const Bindings& bindings, double now) const {
    EmotionStructure e;
    e.type = type;
    e.base_intensity = intensity;
    if (target) e.target = substitute(*target, bindings);
    e.cause = substitute(cause, bindings);
    e.decay = decay;
    e.created_at = now;
    return e;
}

std::set<std::string> EmotionRule::unbound_variables() const {
    std::set<std::string> bound;
    for (const auto& p : preconditions) collect_variables(p, bound);
    std::set<std::string> used;
    for (const auto& a : additions) collect_variables(a.to_sexpr(), used);
    for (const auto& d : deletions) collect_variables(d, used);
    std::set<std::string> out;
    std::set_difference(used.begin(), used.end(), bound.begin(), bound.end(), std::inserter(out, out.end()));
    return out;
}

void EmotionPool::insert(EmotionStructure e) {
    if (std::find(structures_.begin(), structures_.end(), e) == structures_.end()) structures_.push_back(std::move(e));
}

std::vector<Bindings> match_rule(const EmotionRule& rule, const FactBoard& facts, std::span<const Fact> statics,
                                 const EmotionPool& pool) {
    const auto kb = knowledge(facts, statics, pool);
    return match_all(rule.preconditions, kb);
}

EmotionPool apply_rules(EmotionPool pool, const FactBoard& facts, std::span<const Fact> statics,
                        std::span<const EmotionRule> rules, double now) {
    std::set<std::string> latched;
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const auto& rule = rules[r];
        for (const auto& binding : match_rule(rule, facts, statics, pool)) {
            for (const auto& pattern : rule.deletions) {
                const Sexpr p = substitute(pattern, binding);
                std::erase_if(pool.structures_, [&](const EmotionStructure& e) {
                    Bindings scratch;
                    return unify(p, e.to_sexpr(), scratch);
                });
            }
            for (const auto& schema : rule.additions) {
                EmotionStructure e = schema.instantiate(binding, now);
                std::string latch = std::to_string(r) + " " + e.identity();
                const bool was_latched = pool.latched_.contains(latch);
                latched.insert(std::move(latch));
                if (was_latched) continue;
                const bool present = std::any_of(pool.structures_.begin(), pool.structures_.end(),
                                                 [&](const EmotionStructure& x) { return x.identity() == e.identity(); });
                if (!present) pool.structures_.push_back(std::move(e));
            }
        }
    }
    pool.latched_ = std::move(latched);
    return pool;
}

EmotionPool decay_pool(EmotionPool pool, double now) {
    std::erase_if(pool.structures_, [now](const EmotionStructure& e) { return intensity_at(e, now) < 1.0; });
    return pool;
}

}  // namespace byrne
