#pragma once

// Emotion-expressing behaviours: activation from the emotion pool,
// arbitration within mutually inconsistent groups, and expansion to markup.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "byrne/emotion.hpp"
#include "byrne/error.hpp"
#include "byrne/markup.hpp"

namespace byrne {

struct Motivation {
    EmotionType type = EmotionType::Interest;
    std::optional<Sexpr> target;  // pattern; absent matches any target

    friend bool operator==(const Motivation&, const Motivation&) = default;
};

/// A node in the behaviour hierarchy. Internal nodes list children; leaves
/// carry markup directives. Behaviours sharing a group are mutually
/// inconsistent.
struct BehaviorSpec {
    std::string id;
    std::string group;
    std::vector<Motivation> motivated_by;
    std::vector<Sexpr> preconditions;  // over static characteristics
    std::vector<std::string> children;
    std::vector<MarkupDirective> directives;
    int line = 0;

    bool is_leaf() const noexcept { return children.empty(); }

    friend bool operator==(const BehaviorSpec& a, const BehaviorSpec& b) {
        return a.id == b.id && a.group == b.group && a.motivated_by == b.motivated_by &&
               a.preconditions == b.preconditions && a.children == b.children && a.directives == b.directives;
    }
};

struct ActivatedBehavior {
    BehaviorSpec spec;
    double activation = 0.0;
    std::vector<EmotionStructure> motivating;
};

/// Structural problems: duplicate ids, dangling children, cycles, nodes with
/// both or neither of children/directives, invalid directives.
std::vector<Diagnostic> validate_behaviors(std::span<const BehaviorSpec> specs);

/// A spec activates when every motivation matches at least one pool
/// structure and its static preconditions hold. Activation is the summed
/// intensity of all matching structures; with several static bindings the
/// strongest is used. Specs without motivations never activate by themselves.
std::vector<ActivatedBehavior> activate_behaviors(std::span<const BehaviorSpec> specs, const EmotionPool& pool,
                                                  std::span<const Fact> statics, double now);

/// Keeps the strongest behaviour per group (ties: smallest id), in input order.
std::vector<ActivatedBehavior> arbitrate(const std::vector<ActivatedBehavior>& activated);

/// Depth-first leaf directives of each winner, duplicates kept.
std::vector<MarkupDirective> expand(const std::vector<ActivatedBehavior>& winners, std::span<const BehaviorSpec> specs);

}  // namespace byrne
