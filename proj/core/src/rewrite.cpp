#include "emba/rewrite.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <set>

namespace emba {

std::vector<std::string> Pattern::pattern_vars() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::function<void(const Pattern&)> walk = [&](const Pattern& p) {
        if (p.kind == Kind::Var) {
            if (seen.insert(p.var).second) out.push_back(p.var);
        } else if (p.kind == Kind::Node) {
            for (const auto& c : p.children) walk(c);
        }
    };
    walk(*this);
    return out;
}

ExprPtr Pattern::to_expr(Width w) const {
    switch (kind) {
        case Kind::Var: return Expr::var(var);
        case Kind::Const: return Expr::constant(value, w);
        case Kind::Node:
            return Expr::binary(op, children[0].to_expr(w), children[1].to_expr(w));
    }
    throw std::logic_error("bad pattern");
}

namespace {

// budget caps the substitution lists so pathological graphs (huge classes with
// self-referential nodes) cannot blow up memory; the cut is a deterministic
// prefix of the canonical enumeration order.
void match_into(const EGraph& g, const Pattern& p, EClassId cls, const Subst& cur,
                std::vector<Subst>& out, size_t budget) {
    if (out.size() >= budget) return;
    cls = g.find(cls);
    switch (p.kind) {
        case Pattern::Kind::Var: {
            if (const EClassId* bound = cur.find(p.var)) {
                if (g.find(*bound) == cls) out.push_back(cur);
            } else {
                Subst next = cur;
                next.bind(p.var, cls);
                out.push_back(std::move(next));
            }
            return;
        }
        case Pattern::Kind::Const: {
            for (const auto& n : g.nodes(cls)) {
                if (n.op == Op::Const && n.value == p.value) {
                    out.push_back(cur);
                    return;
                }
            }
            return;
        }
        case Pattern::Kind::Node: {
            for (const auto& n : g.nodes(cls)) {
                if (out.size() >= budget) return;
                if (n.op != p.op) continue;
                std::vector<Subst> partial{cur};
                for (size_t i = 0; i < p.children.size() && !partial.empty(); ++i) {
                    std::vector<Subst> next;
                    for (const auto& s : partial) {
                        if (next.size() >= budget) break;
                        match_into(g, p.children[i], n.children[i], s, next, budget);
                    }
                    partial = std::move(next);
                }
                size_t take = std::min(partial.size(), budget - out.size());
                out.insert(out.end(), partial.begin(), partial.begin() + take);
            }
            return;
        }
    }
}

std::vector<Match> ematch_bounded(const EGraph& g, const Pattern& p, size_t budget,
                                  bool& truncated) {
    std::vector<Match> out;
    for (EClassId cls : g.canonical_classes()) {
        if (out.size() >= budget) {
            truncated = true;
            break;
        }
        std::vector<Subst> substs;
        match_into(g, p, cls, {}, substs, budget - out.size());
        if (substs.size() >= budget - out.size()) truncated = true;
        std::sort(substs.begin(), substs.end());
        substs.erase(std::unique(substs.begin(), substs.end()), substs.end());
        for (auto& s : substs) {
            if (out.size() >= budget) {
                truncated = true;
                break;
            }
            out.push_back({cls, std::move(s)});
        }
    }
    return out;
}

}  // namespace

std::vector<Match> ematch(const EGraph& g, const Pattern& p) {
    bool truncated = false;
    return ematch_bounded(g, p, std::numeric_limits<size_t>::max(), truncated);
}

EClassId instantiate(EGraph& g, const Pattern& p, const Subst& subst) {
    switch (p.kind) {
        case Pattern::Kind::Var:
            return g.find(subst.at(p.var));
        case Pattern::Kind::Const:
            return g.add(ENode::make_const(g.width().truncate(p.value)));
        case Pattern::Kind::Node: {
            EClassId l = instantiate(g, p.children[0], subst);
            EClassId r = instantiate(g, p.children[1], subst);
            return g.add(ENode::make_binary(p.op, l, r));
        }
    }
    throw std::logic_error("bad pattern");
}

const char* rule_group_name(RuleGroup g) {
    switch (g) {
        case RuleGroup::Structural: return "structural";
        case RuleGroup::ArithId: return "arithid";
        case RuleGroup::BoolId: return "boolid";
        case RuleGroup::MbaBridge: return "mbabridge";
        case RuleGroup::ConstFold: return "constfold";
    }
    return "?";
}

std::optional<RuleGroup> rule_group_from_name(const std::string& name) {
    for (RuleGroup g : {RuleGroup::Structural, RuleGroup::ArithId, RuleGroup::BoolId,
                        RuleGroup::MbaBridge, RuleGroup::ConstFold}) {
        if (name == rule_group_name(g)) return g;
    }
    return std::nullopt;
}

RuleSet RuleSet::filtered(const std::vector<RuleGroup>& groups) const {
    RuleSet out;
    for (const auto& r : rules) {
        if (std::find(groups.begin(), groups.end(), r.group) != groups.end())
            out.rules.push_back(r);
    }
    return out;
}

RuleSet RuleSet::without_group(RuleGroup g) const {
    RuleSet out;
    for (const auto& r : rules)
        if (r.group != g) out.rules.push_back(r);
    return out;
}

const Rule* RuleSet::find(const std::string& name) const {
    for (const auto& r : rules)
        if (r.name == name) return &r;
    return nullptr;
}

namespace {

size_t apply_const_fold(EGraph& g) {
    size_t merged = 0;
    for (EClassId cls : g.canonical_classes()) {
        auto v = g.const_value(cls);
        if (!v) continue;
        bool has_const = false;
        for (const auto& n : g.nodes(cls)) {
            if (n.op == Op::Const) {
                has_const = true;
                break;
            }
        }
        if (has_const) continue;
        EClassId cid = g.add(ENode::make_const(*v));
        if (g.merge(cls, cid).second) ++merged;
    }
    return merged;
}

}  // namespace

namespace {

// Upper bound on substitutions collected per saturation iteration, shared
// across rules. Purely a memory guard; a fixed constant keeps runs with the
// same limits reproducible.
constexpr size_t kMatchBudget = 200000;

// node_budget bounds growth during application; 0 disables the cap. The cap
// cuts a deterministic prefix of the match list, so results stay reproducible.
size_t apply_matches_capped(EGraph& g, const Rule& r, const std::vector<Match>& matches,
                            size_t node_budget) {
    if (r.const_fold) return apply_const_fold(g);

    size_t merged = 0;
    for (const auto& m : matches) {
        if (node_budget && g.node_count() > node_budget) break;
        std::optional<Pattern> rhs;
        if (r.dynamic_rhs) {
            rhs = r.dynamic_rhs(g, m.subst);
            if (!rhs) continue;  // guard failed
        } else {
            rhs = r.rhs;
            if (!rhs) throw DynamicRhsError(r.name);
        }
        EClassId made = instantiate(g, *rhs, m.subst);
        if (g.merge(m.eclass, made).second) ++merged;
    }
    return merged;
}

}  // namespace

size_t apply_matches(EGraph& g, const Rule& r, const std::vector<Match>& matches) {
    return apply_matches_capped(g, r, matches, 0);
}

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::Saturated: return "saturated";
        case StopReason::IterationLimit: return "iteration-limit";
        case StopReason::NodeLimit: return "node-limit";
        case StopReason::TimeLimit: return "time-limit";
    }
    return "?";
}

SaturationReport saturate(EGraph& g, const RuleSet& rules, const SaturationLimits& limits) {
    using Clock = std::chrono::steady_clock;
    auto start = Clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    };

    SaturationReport rep;
    rep.nodes_start = g.node_count();
    if (!g.clean()) g.rebuild();

    int iter = 0;
    for (;;) {
        if (iter >= limits.max_iterations) {
            rep.stop_reason = StopReason::IterationLimit;
            break;
        }
        if (g.node_count() > limits.max_nodes) {
            rep.stop_reason = StopReason::NodeLimit;
            break;
        }
        if (elapsed_ms() > limits.max_millis) {
            rep.stop_reason = StopReason::TimeLimit;
            break;
        }

        // Match everything against the frozen clean graph, then apply. The
        // shared match budget bounds the memory held across batches.
        bool truncated = false;
        size_t budget = kMatchBudget;
        std::vector<std::pair<const Rule*, std::vector<Match>>> batches;
        for (const auto& r : rules.rules) {
            if (r.const_fold) continue;
            if (budget == 0) {
                truncated = true;
                break;
            }
            auto ms = ematch_bounded(g, r.lhs, budget, truncated);
            budget -= ms.size();
            batches.emplace_back(&r, std::move(ms));
        }

        size_t merges = 0;
        for (auto& [r, ms] : batches) {
            merges += apply_matches_capped(g, *r, ms, limits.max_nodes);
            ms.clear();
            ms.shrink_to_fit();
        }
        for (const auto& r : rules.rules)
            if (r.const_fold) merges += apply_matches(g, r, {});

        bool node_capped = g.node_count() > limits.max_nodes;
        merges += g.rebuild();
        ++iter;
        // Once the growth cap cuts application short the graph sits at the
        // node limit; rebuilding may compact it slightly below, but further
        // iterations would only churn, so report the limit now.
        if (node_capped) {
            rep.stop_reason = StopReason::NodeLimit;
            break;
        }
        // A zero-merge iteration means saturation, unless the match budget
        // cut the match phase short.
        if (merges == 0 && !truncated) {
            rep.stop_reason = StopReason::Saturated;
            break;
        }
    }

    rep.iterations = iter;
    rep.nodes_end = g.node_count();
    rep.millis = elapsed_ms();
    return rep;
}

}  // namespace emba
