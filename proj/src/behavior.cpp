#include "byrne/behavior.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace byrne {

namespace {

const BehaviorSpec* find_spec(std::span<const BehaviorSpec> specs, const std::string& id) {
    for (const auto& s : specs) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

void expand_into(const BehaviorSpec& spec, std::span<const BehaviorSpec> specs, std::vector<std::string>& path,
                 std::vector<MarkupDirective>& out) {
    if (std::find(path.begin(), path.end(), spec.id) != path.end()) {
        throw Error("behaviour cycle through '" + spec.id + "'");
    }
    if (spec.is_leaf()) {
        out.insert(out.end(), spec.directives.begin(), spec.directives.end());
        return;
    }
    path.push_back(spec.id);
    for (const auto& child_id : spec.children) {
        const BehaviorSpec* child = find_spec(specs, child_id);
        if (child == nullptr) throw Error("behaviour '" + spec.id + "' has unknown child '" + child_id + "'");
        expand_into(*child, specs, path, out);
    }
    path.pop_back();
}

}  // namespace

std::vector<Diagnostic> validate_behaviors(std::span<const BehaviorSpec> specs) {
    std::vector<Diagnostic> diags;
    std::map<std::string, const BehaviorSpec*> by_id;
    for (const auto& s : specs) {
        if (!by_id.emplace(s.id, &s).second) diags.push_back({s.line, "duplicate behaviour id '" + s.id + "'"});
        if (s.children.empty() == s.directives.empty()) {
            diags.push_back({s.line, "behaviour '" + s.id + "' must have either children or directives"});
        }
        for (const auto& d : s.directives) {
            try {
                d.validate();
            } catch (const DirectiveError& e) {
                diags.push_back({s.line, "behaviour '" + s.id + "': " + e.what()});
            }
        }
    }
    for (const auto& s : specs) {
        for (const auto& c : s.children) {
            if (!by_id.contains(c)) diags.push_back({s.line, "behaviour '" + s.id + "' has unknown child '" + c + "'"});
        }
    }

    // Cycle detection by colouring; reported once per cycle entry point.
    enum class Mark { White, Grey, Black };
    std::map<std::string, Mark> mark;
    std::set<std::string> reported;
    auto visit = [&](auto&& self, const BehaviorSpec& s) -> void {
        mark[s.id] = Mark::Grey;
        for (const auto& c : s.children) {
            auto it = by_id.find(c);
            if (it == by_id.end()) continue;
            const Mark m = mark[c];
            if (m == Mark::Grey) {
                if (reported.insert(c).second) {
                    diags.push_back({s.line, "behaviour cycle: '" + s.id + "' leads back to '" + c + "'"});
                }
            } else if (m == Mark::White) {
                self(self, *it->second);
            }
        }
        mark[s.id] = Mark::Black;
    };
    for (const auto& [id, s] : by_id) {
        if (mark[id] == Mark::White) visit(visit, *s);
    }
    return diags;
}

std::vector<ActivatedBehavior> activate_behaviors(std::span<const BehaviorSpec> specs, const EmotionPool& pool,
                                                  std::span<const Fact> statics, double now) {
    std::vector<Sexpr> static_terms;
    static_terms.reserve(statics.size());
    for (const auto& f : statics) static_terms.push_back(f.to_sexpr());
    const Sexpr nil = Sexpr::symbol("nil");

    std::vector<ActivatedBehavior> out;
    for (const auto& spec : specs) {
        if (spec.motivated_by.empty()) continue;
        const std::vector<Bindings> bindings =
            spec.preconditions.empty() ? std::vector<Bindings>{Bindings{}} : match_all(spec.preconditions, static_terms);

        std::optional<ActivatedBehavior> best;
        for (const auto& binding : bindings) {
            std::vector<std::size_t> matched;
            bool all = true;
            for (const auto& motive : spec.motivated_by) {
                bool found = false;
                for (std::size_t i = 0; i < pool.structures().size(); ++i) {
                    const auto& e = pool.structures()[i];
                    if (e.type != motive.type) continue;
                    if (motive.target) {
                        Bindings scratch = binding;
                        if (!unify(*motive.target, e.target.value_or(nil), scratch)) continue;
                    }
                    found = true;
                    if (std::find(matched.begin(), matched.end(), i) == matched.end()) matched.push_back(i);
                }
                if (!found) {
                    all = false;
                    break;
                }
            }
            if (!all) continue;
            std::sort(matched.begin(), matched.end());
            ActivatedBehavior a{spec, 0.0, {}};
            for (auto i : matched) {
                a.activation += intensity_at(pool.structures()[i], now);
                a.motivating.push_back(pool.structures()[i]);
            }
            if (!best || a.activation > best->activation) best = std::move(a);
        }
        if (best && best->activation > 0.0) out.push_back(std::move(*best));
    }
    return out;
}

std::vector<ActivatedBehavior> arbitrate(const std::vector<ActivatedBehavior>& activated) {
    std::map<std::string, const ActivatedBehavior*> winner;
    for (const auto& a : activated) {
        auto [it, inserted] = winner.emplace(a.spec.group, &a);
        if (inserted) continue;
        const ActivatedBehavior* cur = it->second;
        if (a.activation > cur->activation || (a.activation == cur->activation && a.spec.id < cur->spec.id)) {
            it->second = &a;
        }
    }
    std::vector<ActivatedBehavior> out;
    for (const auto& a : activated) {
        if (winner.at(a.spec.group) == &a) out.push_back(a);
    }
    return out;
}

std::vector<MarkupDirective> expand(const std::vector<ActivatedBehavior>& winners, std::span<const BehaviorSpec> specs) {
    std::vector<MarkupDirective> out;
    std::vector<std::string> path;
    for (const auto& w : winners) expand_into(w.spec, specs, path, out);
    return out;
}

}  // namespace byrne
