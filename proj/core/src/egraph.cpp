#include "emba/egraph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace emba {

EClassId EGraph::find(EClassId id) const {
    EClassId root = id;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[id] != root) {
        EClassId next = parent_[id];
        parent_[id] = root;
        id = next;
    }
    return root;
}

ENode EGraph::canonicalize(ENode n) const {
    for (auto& c : n.children) c = find(c);
    return n;
}

std::optional<uint64_t> EGraph::fold(const ENode& n) const {
    if (n.op == Op::Const) return width_.truncate(n.value);
    if (n.op == Op::Var) return std::nullopt;
    auto l = const_value(n.children[0]);
    auto r = const_value(n.children[1]);
    if (!l || !r) return std::nullopt;
    switch (n.op) {
        case Op::Add: return width_.truncate(*l + *r);
        case Op::Sub: return width_.truncate(*l - *r);
        case Op::Mul: return width_.truncate(*l * *r);
        case Op::And: return *l & *r;
        case Op::Or: return *l | *r;
        case Op::Xor: return *l ^ *r;
        case Op::Shl: return *r >= 64 ? 0 : width_.truncate(*l << *r);
        default: return std::nullopt;
    }
}

void EGraph::set_const(EClassId id, uint64_t v) {
    auto& cur = classes_[id].const_val;
    if (cur && *cur != v)
        throw std::logic_error("e-class constant conflict: unsound rule");
    cur = v;
}

EClassId EGraph::add(ENode n) {
    n = canonicalize(n);
    auto it = hashcons_.find(n);
    if (it != hashcons_.end()) return find(it->second);

    EClassId id = static_cast<EClassId>(parent_.size());
    parent_.push_back(id);
    ClassData data;
    data.const_val = fold(n);
    data.nodes.push_back(n);
    classes_.push_back(std::move(data));
    hashcons_.emplace(std::move(n), id);
    ++node_count_;
    return id;
}

std::pair<EClassId, bool> EGraph::merge(EClassId a, EClassId b) {
    a = find(a);
    b = find(b);
    if (a == b) return {a, false};

    // Union by node-set size; ties keep the lower index canonical.
    if (classes_[a].nodes.size() < classes_[b].nodes.size() ||
        (classes_[a].nodes.size() == classes_[b].nodes.size() && b < a))
        std::swap(a, b);

    parent_[b] = a;
    auto& from = classes_[b];
    auto& to = classes_[a];
    to.nodes.insert(to.nodes.end(), from.nodes.begin(), from.nodes.end());
    from.nodes.clear();
    from.nodes.shrink_to_fit();
    if (from.const_val) set_const(a, *from.const_val);
    from.const_val.reset();
    clean_ = false;
    return {a, true};
}

size_t EGraph::rebuild() {
    size_t merges = 0;
    // Full-scan fixpoint: find congruent node pairs spanning distinct
    // classes, merge them, repeat until none remain.
    while (true) {
        std::unordered_map<ENode, EClassId, ENodeHash> seen;
        std::vector<std::pair<EClassId, EClassId>> pending;
        for (EClassId id = 0; id < parent_.size(); ++id) {
            if (find(id) != id) continue;
            for (const auto& node : classes_[id].nodes) {
                ENode cn = canonicalize(node);
                auto [it, inserted] = seen.try_emplace(std::move(cn), id);
                if (!inserted && find(it->second) != id) pending.emplace_back(it->second, id);
            }
        }
        if (pending.empty()) break;
        for (auto [a, b] : pending) {
            if (merge(a, b).second) ++merges;
        }
    }

    // Canonicalize, sort and dedup every class's node list, then rebuild the
    // hashcons so lookups hit canonical forms.
    hashcons_.clear();
    node_count_ = 0;
    for (EClassId id = 0; id < parent_.size(); ++id) {
        if (find(id) != id) continue;
        auto& nodes = classes_[id].nodes;
        for (auto& n : nodes) n = canonicalize(n);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        node_count_ += nodes.size();
        for (const auto& n : nodes) hashcons_.emplace(n, id);
    }
    clean_ = true;
    return merges;
}

EClassId EGraph::add_expr(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
            return add(ENode::make_const(width_.truncate(e.value())));
        case Op::Var:
            return add(ENode::make_var(e.name()));
        case Op::Neg:
        case Op::Not:
            throw std::invalid_argument("add_expr requires a preprocessed expression");
        default: {
            EClassId l = add_expr(*e.left());
            EClassId r = add_expr(*e.right());
            return add(ENode::make_binary(e.op(), l, r));
        }
    }
}

size_t EGraph::class_count() const {
    size_t n = 0;
    for (EClassId id = 0; id < parent_.size(); ++id)
        if (find(id) == id) ++n;
    return n;
}

std::vector<EClassId> EGraph::canonical_classes() const {
    std::vector<EClassId> out;
    for (EClassId id = 0; id < parent_.size(); ++id)
        if (find(id) == id) out.push_back(id);
    return out;
}

const std::vector<ENode>& EGraph::nodes(EClassId id) const {
    return classes_[find(id)].nodes;
}

std::optional<uint64_t> EGraph::const_value(EClassId id) const {
    return classes_[find(id)].const_val;
}

bool EGraph::check_hashcons_unique() const {
    std::unordered_map<ENode, EClassId, ENodeHash> seen;
    for (EClassId id : canonical_classes()) {
        for (const auto& node : classes_[id].nodes) {
            auto [it, inserted] = seen.try_emplace(canonicalize(node), id);
            if (!inserted && it->second != id) return false;
        }
    }
    return true;
}

namespace {

std::string node_label(const ENode& n) {
    switch (n.op) {
        case Op::Const: return std::to_string(n.value);
        case Op::Var: return n.name;
        case Op::Shl: return "<<";
        default: return op_name(n.op);
    }
}

}  // namespace

std::string EGraph::dump_dot() const {
    std::ostringstream out;
    out << "digraph egraph {\n";
    out << "  compound=true;\n";

    auto roots = canonical_classes();
    // Node sets sorted for byte-stable output even on a dirty graph.
    std::unordered_map<EClassId, std::vector<ENode>> sorted;
    for (EClassId id : roots) {
        auto ns = classes_[id].nodes;
        for (auto& n : ns) n = canonicalize(n);
        std::sort(ns.begin(), ns.end());
        ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
        sorted.emplace(id, std::move(ns));
    }

    for (EClassId id : roots) {
        out << "  subgraph cluster_" << id << " {\n";
        out << "    style=dotted;\n";
        out << "    label=\"c" << id << "\";\n";
        const auto& ns = sorted[id];
        for (size_t i = 0; i < ns.size(); ++i) {
            out << "    n" << id << "_" << i << " [label=\"" << node_label(ns[i]) << "\"];\n";
        }
        out << "  }\n";
    }
    for (EClassId id : roots) {
        const auto& ns = sorted[id];
        for (size_t i = 0; i < ns.size(); ++i) {
            for (size_t k = 0; k < ns[i].children.size(); ++k) {
                EClassId child = ns[i].children[k];
                out << "  n" << id << "_" << i << " -> n" << child << "_0"
                    << " [lhead=cluster_" << child << "];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace emba
