#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "emba/expr.hpp"

namespace emba {

using EClassId = uint32_t;

// Operator applied to child e-classes. Leaves (Const/Var) have no children;
// all other operators have exactly two.
struct ENode {
    Op op = Op::Const;
    uint64_t value = 0;    // Const only
    std::string name;      // Var only
    std::vector<EClassId> children;

    static ENode make_const(uint64_t v) { return {Op::Const, v, {}, {}}; }
    static ENode make_var(std::string n) { return {Op::Var, 0, std::move(n), {}}; }
    static ENode make_binary(Op op, EClassId l, EClassId r) { return {op, 0, {}, {l, r}}; }

    bool operator==(const ENode& other) const {
        return op == other.op && value == other.value && name == other.name &&
               children == other.children;
    }
    // Tie-break order: op tag first, then payload, then child ids.
    bool operator<(const ENode& other) const {
        if (op != other.op) return op < other.op;
        if (value != other.value) return value < other.value;
        if (name != other.name) return name < other.name;
        return children < other.children;
    }
};

struct ENodeHash {
    size_t operator()(const ENode& n) const {
        size_t h = std::hash<uint8_t>{}(static_cast<uint8_t>(n.op));
        auto mix = [&h](size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
        mix(std::hash<uint64_t>{}(n.value));
        mix(std::hash<std::string>{}(n.name));
        for (auto c : n.children) mix(std::hash<uint32_t>{}(c));
        return h;
    }
};

// Hashconsed e-nodes partitioned into e-classes by a union-find; congruence
// is restored by an explicit rebuild() after a batch of unions.
//
// Each class carries one analysis fact: an optional constant value the whole
// class denotes. Merging two classes with different known constants means an
// unsound rule fired and throws.
class EGraph {
public:
    explicit EGraph(Width w) : width_(w) {}

    Width width() const { return width_; }

    // Canonicalizes, then hashcons lookup; creates a fresh singleton class
    // only for genuinely new nodes.
    EClassId add(ENode n);

    // Returns (canonical id, whether a merge happened). Leaves the graph
    // dirty until rebuild().
    std::pair<EClassId, bool> merge(EClassId a, EClassId b);

    EClassId find(EClassId id) const;

    // Restores congruence and hashcons uniqueness; returns the number of
    // congruence-induced merges.
    size_t rebuild();

    // Bottom-up insertion of a preprocessed expression.
    EClassId add_expr(const Expr& e);

    bool clean() const { return clean_; }
    size_t node_count() const { return node_count_; }
    size_t class_count() const;

    // Canonical class ids in ascending order.
    std::vector<EClassId> canonical_classes() const;

    // Nodes of a canonical class, canonicalized and sorted (valid when clean).
    const std::vector<ENode>& nodes(EClassId id) const;

    std::optional<uint64_t> const_value(EClassId id) const;

    // Deterministic Graphviz text: one dotted cluster per canonical e-class.
    std::string dump_dot() const;

    // Debug check of the clean-state invariant: no congruent node pair spans
    // two distinct classes.
    bool check_hashcons_unique() const;

private:
    ENode canonicalize(ENode n) const;
    void set_const(EClassId id, uint64_t v);
    std::optional<uint64_t> fold(const ENode& n) const;

    Width width_;
    mutable std::vector<EClassId> parent_;
    struct ClassData {
        std::vector<ENode> nodes;
        std::optional<uint64_t> const_val;
    };
    std::vector<ClassData> classes_;  // indexed by id; meaningful only at roots
    std::unordered_map<ENode, EClassId, ENodeHash> hashcons_;
    size_t node_count_ = 0;
    bool clean_ = true;
};

}  // namespace emba
