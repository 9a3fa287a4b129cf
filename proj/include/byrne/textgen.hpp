#pragma once

// Template-based surface generation for a selected fact.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "byrne/error.hpp"
#include "byrne/fact_feed.hpp"
#include "byrne/seeml.hpp"
#include "byrne/unify.hpp"

namespace byrne {

inline constexpr double kDefaultUsePenaltySeconds = 5.0;

/// The first precondition must match the fact itself; the rest may match
/// the fact or the character's static facts. The body is a SEEML fragment
/// with `?variable` slots in its text.
struct Template {
    std::string id;
    std::vector<Sexpr> preconditions;
    std::string body_text;
    SeemlDocument body;
    int line = 0;

    friend bool operator==(const Template& a, const Template& b) {
        return a.id == b.id && a.preconditions == b.preconditions && a.body == b.body;
    }
};

/// Problems with a template's shape. The body must already be parsed.
std::vector<Diagnostic> validate_template(const Template& t);

/// `?name` slots used in a document's text.
std::set<std::string> slot_variables(const SeemlDocument& doc);

struct TemplateUsage {
    int use_count = 0;
    std::optional<double> last_used;

    friend bool operator==(const TemplateUsage&, const TemplateUsage&) = default;
};

class UsageHistory {
public:
    TemplateUsage usage(const std::string& id) const;
    const std::map<std::string, TemplateUsage>& entries() const noexcept { return entries_; }

    friend UsageHistory record_usage(UsageHistory history, const std::string& id, double now);
    friend bool operator==(const UsageHistory&, const UsageHistory&) = default;

private:
    std::map<std::string, TemplateUsage> entries_;
};

UsageHistory record_usage(UsageHistory history, const std::string& id, double now);

/// Bindings under which `t` describes `fact`, in canonical order.
std::vector<Bindings> template_bindings(const Template& t, const GameFact& fact, std::span<const Fact> statics);

struct TemplateChoice {
    const Template* chosen = nullptr;
    Bindings bindings;
};

/// Among matching templates maximises
///   (now - last_used, or +inf if never used) - use_penalty * use_count,
/// ties to the smallest id. Throws CoverageError when nothing matches.
TemplateChoice select_template(const GameFact& fact, std::span<const Template> templates, const UsageHistory& history,
                               double now, std::span<const Fact> statics = {},
                               double use_penalty = kDefaultUsePenaltySeconds);

using NameTable = std::map<std::string, std::string>;

/// Symbols, numbers and strings render as text; symbols found in `names`
/// render as their display name.
std::string render_term(const Sexpr& term, const NameTable& names);

/// Fills the body's slots. Throws InstantiationError on an unbound slot.
SeemlDocument instantiate(const Template& t, const Bindings& bindings, const NameTable& names = {});

}  // namespace byrne
