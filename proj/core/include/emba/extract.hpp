#pragma once

#include <functional>

#include "emba/egraph.hpp"

namespace emba {

// Per-operator cost; uniform 1 reproduces plain AST size.
struct CostModel {
    std::function<int64_t(Op)> node_cost = [](Op) -> int64_t { return 1; };
};

struct ExtractionResult {
    ExprPtr expr;
    int64_t cost = 0;
};

struct CyclicOnly : std::runtime_error {
    CyclicOnly() : std::runtime_error("e-class has no finite-cost term") {}
};

struct DepthExhausted : std::runtime_error {
    DepthExhausted() : std::runtime_error("no term found within the depth limit") {}
};

// Minimum-cost term representable in root's class, by fixpoint relaxation
// over the (cyclic) e-graph. Ties break to the lower operator tag, then to
// lexicographically smaller child class indices.
ExtractionResult extract_best(const EGraph& g, EClassId root, const CostModel& cm);

// Exhaustive enumeration up to depth_limit; the testing oracle for
// extract_best on small graphs.
ExtractionResult brute_force_best(const EGraph& g, EClassId root, const CostModel& cm,
                                  int depth_limit);

}  // namespace emba
