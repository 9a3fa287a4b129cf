#pragma once

// Emotion structures, generation rules and the decaying emotion pool.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "byrne/fact_feed.hpp"
#include "byrne/sexpr.hpp"
#include "byrne/unify.hpp"

namespace byrne {

enum class EmotionType { Fear, Anger, Sadness, Happiness, Disgust, Surprise, Interest };

std::string_view to_string(EmotionType type);
std::optional<EmotionType> parse_emotion_type(std::string_view name);

/// Decay multiplier over elapsed seconds. Written in profiles as
/// `1/t`, `exp:<rate>`, `linear:<rate>` or `constant`.
struct DecayFunction {
    enum class Form { Reciprocal, Exponential, Linear, Constant };

    Form form = Form::Reciprocal;
    double rate = 0.0;

    /// Multiplier at `t` seconds (callers pass t >= 1). Always in [0, 1].
    double operator()(double t) const;

    static DecayFunction parse(const Sexpr& expr);
    std::string to_string() const;

    friend bool operator==(const DecayFunction&, const DecayFunction&) = default;
};

struct EmotionStructure {
    EmotionType type = EmotionType::Interest;
    double base_intensity = 1.0;
    std::optional<Sexpr> target;
    Sexpr cause;
    DecayFunction decay;
    double created_at = 0.0;

    /// `(emotion type: <t> target: <x|nil> cause: <c>)`, the form rule
    /// preconditions and deletion patterns match against.
    Sexpr to_sexpr() const;

    /// Type, target and cause; what re-firing deduplicates on.
    std::string identity() const;

    friend bool operator==(const EmotionStructure&, const EmotionStructure&) = default;
};

/// base_intensity * decay(max(1, now - created_at)). Throws ClockError if
/// now precedes creation.
double intensity_at(const EmotionStructure& e, double now);

/// Uninstantiated emotion in a rule's add list, e.g.
/// `(type: happiness intensity: 8 target: nil cause: (scores team: ?team) decay: 1/t)`.
struct EmotionSchema {
    EmotionType type = EmotionType::Interest;
    double intensity = 1.0;
    std::optional<Sexpr> target;
    Sexpr cause;
    DecayFunction decay;

    static EmotionSchema parse(const Sexpr& expr);
    Sexpr to_sexpr() const;
    EmotionStructure instantiate(const Bindings& bindings, double now) const;

    friend bool operator==(const EmotionSchema&, const EmotionSchema&) = default;
};

struct EmotionRule {
    std::vector<Sexpr> preconditions;
    std::vector<EmotionSchema> additions;
    std::vector<Sexpr> deletions;

    /// Variables used in additions/deletions that no precondition binds.
    std::set<std::string> unbound_variables() const;

    friend bool operator==(const EmotionRule&, const EmotionRule&) = default;
};

class EmotionPool {
public:
    const std::vector<EmotionStructure>& structures() const noexcept { return structures_; }
    bool empty() const noexcept { return structures_.empty(); }
    std::size_t size() const noexcept { return structures_.size(); }

    /// Adds unless an identical structure is already present.
    void insert(EmotionStructure e);

    friend bool operator==(const EmotionPool&, const EmotionPool&) = default;

private:
    friend EmotionPool apply_rules(EmotionPool, const FactBoard&, std::span<const Fact>,
                                   std::span<const EmotionRule>, double);
    friend EmotionPool decay_pool(EmotionPool, double);

    std::vector<EmotionStructure> structures_;
    // (rule index, emotion identity) pairs produced by the previous
    // apply_rules call. A pair only adds its structure again after a call
    // in which it was not produced.
    std::set<std::string> latched_;
};

/// Every binding satisfying all preconditions over board facts, statics and
/// the pool's structures, in canonical order.
std::vector<Bindings> match_rule(const EmotionRule& rule, const FactBoard& facts, std::span<const Fact> statics,
                                 const EmotionPool& pool);

/// Fires rules in order. Per rule, bindings are computed first; then for
/// each binding deletions run before additions.
EmotionPool apply_rules(EmotionPool pool, const FactBoard& facts, std::span<const Fact> statics,
                        std::span<const EmotionRule> rules, double now);

/// Drops every structure whose intensity at `now` is below 1.
EmotionPool decay_pool(EmotionPool pool, double now);

}  // namespace byrne
