#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emba/egraph.hpp"

namespace emba {

// Pattern over e-nodes. Repeated pattern variables denote the same e-class
// (nonlinear patterns are allowed).
struct Pattern {
    enum class Kind { Var, Const, Node };

    Kind kind = Kind::Var;
    std::string var;                  // Kind::Var
    uint64_t value = 0;               // Kind::Const
    Op op = Op::Add;                  // Kind::Node
    std::vector<Pattern> children;    // Kind::Node

    static Pattern pv(std::string name) {
        Pattern p;
        p.kind = Kind::Var;
        p.var = std::move(name);
        return p;
    }
    static Pattern lit(uint64_t v) {
        Pattern p;
        p.kind = Kind::Const;
        p.value = v;
        return p;
    }
    static Pattern node(Op op, Pattern l, Pattern r) {
        Pattern p;
        p.kind = Kind::Node;
        p.op = op;
        p.children = {std::move(l), std::move(r)};
        return p;
    }

    std::vector<std::string> pattern_vars() const;

    // Turns the pattern into an Expr, mapping each pattern variable to a
    // plain variable of the same name; used by the soundness sweep.
    ExprPtr to_expr(Width w) const;
};

// Pattern-variable bindings. A flat sorted vector: patterns bind at most a
// handful of variables and e-matching copies substitutions heavily, so this
// beats a node-based map by a wide margin. Comparisons are lexicographic over
// the sorted (name, class) sequence.
class Subst {
public:
    using value_type = std::pair<std::string, EClassId>;

    EClassId at(const std::string& key) const {
        const EClassId* p = find(key);
        if (!p) throw std::out_of_range("unbound pattern variable: " + key);
        return *p;
    }

    const EClassId* find(const std::string& key) const {
        for (const auto& [k, v] : kv_)
            if (k == key) return &v;
        return nullptr;
    }

    void bind(std::string key, EClassId cls) {
        auto it = kv_.begin();
        while (it != kv_.end() && it->first < key) ++it;
        kv_.insert(it, {std::move(key), cls});
    }

    auto begin() const { return kv_.begin(); }
    auto end() const { return kv_.end(); }
    size_t size() const { return kv_.size(); }

    friend bool operator==(const Subst&, const Subst&) = default;
    friend auto operator<=>(const Subst&, const Subst&) = default;

private:
    std::vector<value_type> kv_;
};

struct Match {
    EClassId eclass;
    Subst subst;
};

// All (class, substitution) pairs where the pattern is represented in the
// class; ordered by canonical class index, then substitution. Requires a
// clean graph.
std::vector<Match> ematch(const EGraph& g, const Pattern& p);

// Adds the instantiation of p under subst to the graph and returns its class.
EClassId instantiate(EGraph& g, const Pattern& p, const Subst& subst);

enum class RuleGroup { Structural, ArithId, BoolId, MbaBridge, ConstFold };

const char* rule_group_name(RuleGroup g);
std::optional<RuleGroup> rule_group_from_name(const std::string& name);

struct DynamicRhsError : std::runtime_error {
    explicit DynamicRhsError(const std::string& rule)
        : std::runtime_error("dynamic rhs failed for rule " + rule) {}
};

// A directed rewrite. Bidirectional catalog entries are expanded into two
// Rule values ("name" and "name-rev"). A dynamic rhs computes the replacement
// from the constant analysis of the bound classes; returning nullopt skips
// the match (guard failed).
struct Rule {
    std::string name;
    RuleGroup group = RuleGroup::Structural;
    Pattern lhs;
    std::optional<Pattern> rhs;
    std::function<std::optional<Pattern>(const EGraph&, const Subst&)> dynamic_rhs;
    bool const_fold = false;  // the analysis-driven folding rule; has no lhs
};

struct RuleSet {
    std::vector<Rule> rules;

    RuleSet filtered(const std::vector<RuleGroup>& groups) const;
    RuleSet without_group(RuleGroup g) const;
    const Rule* find(const std::string& name) const;
};

// The default catalog with width-dependent masks baked in.
RuleSet default_ruleset(Width w);

// Applies precomputed matches of one rule; returns the number of unions that
// actually merged.
size_t apply_matches(EGraph& g, const Rule& r, const std::vector<Match>& matches);

struct SaturationLimits {
    int max_iterations = 30;
    size_t max_nodes = 50000;
    int64_t max_millis = 5000;
};

enum class StopReason { Saturated, IterationLimit, NodeLimit, TimeLimit };

const char* stop_reason_name(StopReason r);

struct SaturationReport {
    StopReason stop_reason = StopReason::Saturated;
    int iterations = 0;
    size_t nodes_start = 0;
    size_t nodes_end = 0;
    int64_t millis = 0;
};

// Bounded equality saturation: match every rule against the clean graph,
// apply all matches, rebuild; stop on a zero-merge iteration or a limit.
SaturationReport saturate(EGraph& g, const RuleSet& rules, const SaturationLimits& limits);

}  // namespace emba
