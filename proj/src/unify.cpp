#include "byrne/unify.hpp"

#include <algorithm>

#include "byrne/error.hpp"

namespace byrne {

namespace {

bool is_keyword_list(const Sexpr& e) {
    const auto& items = e.items();
    if (items.empty()) return false;
    std::size_t i = items.front().is_keyword() ? 0 : 1;
    if ((items.size() - i) % 2 != 0) return false;
    for (; i < items.size(); i += 2) {
        if (!items[i].is_keyword()) return false;
    }
    return true;
}

bool unify_keyword_lists(const Sexpr& pattern, const Sexpr& target, Bindings& b) {
    const auto& p = pattern.items();
    const auto& t = target.items();
    const bool p_headless = p.front().is_keyword();
    const bool t_headless = t.front().is_keyword();
    if (p_headless != t_headless) return false;
    std::size_t i = 0;
    if (!p_headless) {
        if (!unify(p.front(), t.front(), b)) return false;
        i = 1;
    }
    for (; i < p.size(); i += 2) {
        const Sexpr* value = target.find_keyword(p[i].text());
        if (value == nullptr || !unify(p[i + 1], *value, b)) return false;
    }
    return true;
}

void search(std::span<const Sexpr> patterns, std::size_t index, std::span<const Sexpr> facts,
            const Bindings& current, std::vector<Bindings>& out) {
    if (index == patterns.size()) {
        out.push_back(current);
        return;
    }
    for (const auto& fact : facts) {
        Bindings next = current;
        if (unify(patterns[index], fact, next)) search(patterns, index + 1, facts, next, out);
    }
}

}  // namespace

bool unify(const Sexpr& pattern, const Sexpr& target, Bindings& bindings) {
    if (pattern.is_variable()) {
        auto it = bindings.find(pattern.text());
        if (it != bindings.end()) return it->second == target;
        bindings.emplace(pattern.text(), target);
        return true;
    }
    if (pattern.kind() != target.kind()) return false;
    if (!pattern.is_list()) return pattern == target;

    const bool kp = is_keyword_list(pattern);
    const bool kt = is_keyword_list(target);
    if (kp && kt) return unify_keyword_lists(pattern, target, bindings);
    if (pattern.items().size() != target.items().size()) return false;
    for (std::size_t i = 0; i < pattern.items().size(); ++i) {
        if (!unify(pattern.items()[i], target.items()[i], bindings)) return false;
    }
    return true;
}

Sexpr substitute(const Sexpr& expr, const Bindings& bindings) {
    if (expr.is_variable()) {
        auto it = bindings.find(expr.text());
        if (it == bindings.end()) throw InstantiationError("unbound variable ?" + expr.text());
        return it->second;
    }
    if (!expr.is_list()) return expr;
    std::vector<Sexpr> items;
    items.reserve(expr.items().size());
    for (const auto& item : expr.items()) items.push_back(substitute(item, bindings));
    return Sexpr::list(std::move(items), expr.line());
}

std::vector<Bindings> match_all(std::span<const Sexpr> patterns, std::span<const Sexpr> facts, const Bindings& seed) {
    std::vector<Bindings> found;
    search(patterns, 0, facts, seed, found);
    std::vector<std::pair<std::string, Bindings>> keyed;
    keyed.reserve(found.size());
    for (auto& b : found) keyed.emplace_back(to_string(b), std::move(b));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                keyed.end());
    std::vector<Bindings> out;
    out.reserve(keyed.size());
    for (auto& [k, b] : keyed) out.push_back(std::move(b));
    return out;
}

void collect_variables(const Sexpr& expr, std::set<std::string>& out) {
    if (expr.is_variable()) out.insert(expr.text());
    for (const auto& item : expr.items()) collect_variables(item, out);
}

std::string to_string(const Bindings& bindings) {
    std::string out = "{";
    bool first = true;
    for (const auto& [name, value] : bindings) {
        if (!first) out += ' ';
        first = false;
        out += "?" + name + "=" + to_string(value);
    }
    return out + "}";
}

}  // namespace byrne
