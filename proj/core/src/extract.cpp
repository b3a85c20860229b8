#include "emba/extract.hpp"

#include <limits>
#include <map>
#include <unordered_map>

namespace emba {

namespace {

ExprPtr node_to_expr(const ENode& n, const std::vector<ExprPtr>& children, Width w) {
    switch (n.op) {
        case Op::Const: return Expr::constant(n.value, w);
        case Op::Var: return Expr::var(n.name);
        default: return Expr::binary(n.op, children[0], children[1]);
    }
}

}  // namespace

ExtractionResult extract_best(const EGraph& g, EClassId root, const CostModel& cm) {
    constexpr int64_t kInf = std::numeric_limits<int64_t>::max();
    struct Best {
        int64_t cost = std::numeric_limits<int64_t>::max();
        const ENode* node = nullptr;
    };
    std::unordered_map<EClassId, Best> best;
    auto roots = g.canonical_classes();

    // Bellman-style relaxation to a fixpoint; the graph may be cyclic.
    bool changed = true;
    while (changed) {
        changed = false;
        for (EClassId cls : roots) {
            for (const auto& n : g.nodes(cls)) {
                int64_t cost = cm.node_cost(n.op);
                bool ok = true;
                for (EClassId child : n.children) {
                    auto it = best.find(g.find(child));
                    if (it == best.end() || it->second.cost == kInf) {
                        ok = false;
                        break;
                    }
                    cost += it->second.cost;
                }
                if (!ok) continue;
                Best& cur = best[cls];
                if (cost < cur.cost || (cost == cur.cost && cur.node && n < *cur.node)) {
                    cur.cost = cost;
                    cur.node = &n;
                    changed = true;
                }
            }
        }
    }

    std::function<ExprPtr(EClassId)> build = [&](EClassId cls) -> ExprPtr {
        auto it = best.find(g.find(cls));
        if (it == best.end() || !it->second.node) throw CyclicOnly();
        const ENode& n = *it->second.node;
        std::vector<ExprPtr> kids;
        for (EClassId c : n.children) kids.push_back(build(c));
        return node_to_expr(n, kids, g.width());
    };

    auto it = best.find(g.find(root));
    if (it == best.end() || !it->second.node) throw CyclicOnly();
    return {build(root), it->second.cost};
}

namespace {

struct BruteResult {
    int64_t cost = std::numeric_limits<int64_t>::max();
    const ENode* node = nullptr;
};

// Min cost achievable from cls with terms of depth <= depth; memoized.
BruteResult brute(const EGraph& g, const CostModel& cm, EClassId cls, int depth,
                  std::map<std::pair<EClassId, int>, BruteResult>& memo) {
    if (depth <= 0) return {};
    cls = g.find(cls);
    auto key = std::make_pair(cls, depth);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    BruteResult out;
    for (const auto& n : g.nodes(cls)) {
        int64_t cost = cm.node_cost(n.op);
        bool ok = true;
        for (EClassId c : n.children) {
            auto child = brute(g, cm, c, depth - 1, memo);
            if (!child.node && child.cost == std::numeric_limits<int64_t>::max()) {
                ok = false;
                break;
            }
            cost += child.cost;
        }
        if (!ok) continue;
        if (cost < out.cost || (cost == out.cost && out.node && n < *out.node)) {
            out.cost = cost;
            out.node = &n;
        }
    }
    memo.emplace(key, out);
    return out;
}

ExprPtr brute_build(const EGraph& g, const CostModel& cm, EClassId cls, int depth,
                    std::map<std::pair<EClassId, int>, BruteResult>& memo) {
    auto r = brute(g, cm, cls, depth, memo);
    if (!r.node) throw DepthExhausted();
    std::vector<ExprPtr> kids;
    for (EClassId c : r.node->children) kids.push_back(brute_build(g, cm, c, depth - 1, memo));
    return node_to_expr(*r.node, kids, g.width());
}

}  // namespace

ExtractionResult brute_force_best(const EGraph& g, EClassId root, const CostModel& cm,
                                  int depth_limit) {
    std::map<std::pair<EClassId, int>, BruteResult> memo;
    auto r = brute(g, cm, root, depth_limit, memo);
    if (!r.node) throw DepthExhausted();
    return {brute_build(g, cm, root, depth_limit, memo), r.cost};
}

}  // namespace emba
