#pragma once

// One-way pattern matching of s-expression patterns against ground terms.
//
// Keyword lists (`(head key: v ...)` or headless `(key: v ...)`) match when
// the heads agree and every keyword in the pattern is present in the target
// with a matching value; extra target keywords are ignored. Other lists match
// positionally.

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "byrne/sexpr.hpp"

namespace byrne {

using Bindings = std::map<std::string, Sexpr>;

/// Extends `bindings` so that `pattern` matches the ground `target`.
/// On failure returns false and leaves `bindings` unspecified.
bool unify(const Sexpr& pattern, const Sexpr& target, Bindings& bindings);

/// Replaces bound variables. Throws InstantiationError on an unbound one.
Sexpr substitute(const Sexpr& expr, const Bindings& bindings);

/// All bindings under which every pattern matches some element of `facts`,
/// deduplicated and in canonical (rendered) order.
std::vector<Bindings> match_all(std::span<const Sexpr> patterns, std::span<const Sexpr> facts,
                                const Bindings& seed = {});

void collect_variables(const Sexpr& expr, std::set<std::string>& out);

/// Canonical rendering, e.g. `{?team=a ?x=(1 2)}`.
std::string to_string(const Bindings& bindings);

}  // namespace byrne
