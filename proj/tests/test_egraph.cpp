#include <doctest.h>

#include <map>
#include <set>

#include "emba/egraph.hpp"
#include "emba/semantics.hpp"

using namespace emba;

namespace {
const Width w8 = Width::of(8);
}

TEST_CASE("add: hashconsing returns the same class") {
    EGraph g(w8);
    auto a1 = g.add(ENode::make_var("a"));
    auto a2 = g.add(ENode::make_var("a"));
    CHECK(a1 == a2);
    CHECK(g.node_count() == 1);
}

TEST_CASE("add: canonicalization before lookup") {
    EGraph g(w8);
    auto x = g.add(ENode::make_var("x"));
    auto y = g.add(ENode::make_var("y"));
    auto k = g.add(ENode::make_var("k"));
    auto add1 = g.add(ENode::make_binary(Op::Add, x, k));
    g.merge(x, y);
    g.rebuild();
    // Add(find(y), find(k)) already exists as Add(x, k)
    auto add2 = g.add(ENode::make_binary(Op::Add, y, k));
    CHECK(g.find(add1) == g.find(add2));
}

TEST_CASE("initial a*2 and a<<1 are distinct roots") {
    EGraph g(w8);
    auto r1 = g.add_expr(*parse("a*2", w8));
    auto r2 = g.add_expr(*parse("a<<1", w8));
    CHECK(g.find(r1) != g.find(r2));
    auto [root, merged] = g.merge(r1, r2);
    CHECK(merged);
    g.rebuild();
    CHECK(g.find(r1) == g.find(r2));
}

TEST_CASE("merge: idempotence") {
    EGraph g(w8);
    auto x = g.add(ENode::make_var("x"));
    auto [_, merged] = g.merge(x, x);
    CHECK_FALSE(merged);
}

TEST_CASE("deferred congruence") {
    EGraph g(w8);
    auto cx = g.add(ENode::make_var("x"));
    auto cy = g.add(ENode::make_var("y"));
    auto k = g.add(ENode::make_var("k"));
    auto ax = g.add(ENode::make_binary(Op::Add, cx, k));
    auto ay = g.add(ENode::make_binary(Op::Add, cy, k));
    g.merge(cx, cy);
    CHECK(g.find(ax) != g.find(ay));  // congruence pending
    g.rebuild();
    CHECK(g.find(ax) == g.find(ay));
}

TEST_CASE("find: canonical and stable") {
    EGraph g(w8);
    auto x = g.add(ENode::make_var("x"));
    CHECK(g.find(x) == x);
    auto y = g.add(ENode::make_var("y"));
    g.merge(x, y);
    CHECK(g.find(x) == g.find(y));
    CHECK(g.find(x) == g.find(x));
    CHECK(g.find(g.find(x)) == g.find(x));
}

TEST_CASE("rebuild: clean graph reports zero merges") {
    EGraph g(w8);
    g.add_expr(*parse("x+y", w8));
    CHECK(g.rebuild() == 0);
}

TEST_CASE("rebuild: one congruence merge for f(x), f(y)") {
    EGraph g(w8);
    auto x = g.add(ENode::make_var("x"));
    auto y = g.add(ENode::make_var("y"));
    auto one = g.add(ENode::make_const(1));
    auto fx = g.add(ENode::make_binary(Op::Add, x, one));
    auto fy = g.add(ENode::make_binary(Op::Add, y, one));
    g.merge(x, y);
    CHECK(g.rebuild() == 1);
    CHECK(g.find(fx) == g.find(fy));
}

TEST_CASE("rebuild: congruence propagates upward through two levels") {
    EGraph g(w8);
    auto x = g.add(ENode::make_var("x"));
    auto y = g.add(ENode::make_var("y"));
    auto one = g.add(ENode::make_const(1));
    // f = Add(_, 1), g = Mul(_, 1)
    auto fx = g.add(ENode::make_binary(Op::Add, x, one));
    auto fy = g.add(ENode::make_binary(Op::Add, y, one));
    auto gfx = g.add(ENode::make_binary(Op::Mul, fx, one));
    auto gfy = g.add(ENode::make_binary(Op::Mul, fy, one));
    g.merge(x, y);
    CHECK(g.rebuild() == 2);
    CHECK(g.find(gfx) == g.find(gfy));
    CHECK(g.check_hashcons_unique());
}

TEST_CASE("add_expr: sharing") {
    EGraph g(w8);
    g.add_expr(*parse("x+y", w8));
    CHECK(g.class_count() == 3);
    CHECK(g.node_count() == 3);

    EGraph g2(w8);
    g2.add_expr(*parse("x+x", w8));
    CHECK(g2.class_count() == 2);
    CHECK(g2.node_count() == 2);
}

TEST_CASE("add_expr: node count of the preprocessed obfuscated-add expression") {
    // ast_size is 11; shared leaves save two Var nodes and the Xor reuses
    // nothing else: x, y, 255, x^255, (x^255)&y, x|y, (x|y)+y, sub = 8
    EGraph g(w8);
    auto e = preprocess(parse("(x|y)+y-(~x&y)", w8), w8);
    g.add_expr(*e);
    CHECK(ast_size(*e) == 11);
    CHECK(g.node_count() == 8);
}

TEST_CASE("constant analysis folds at add time") {
    EGraph g(w8);
    auto root = g.add_expr(*parse("2*3", w8));
    REQUIRE(g.const_value(root).has_value());
    CHECK(*g.const_value(root) == 6);
    auto leaf = g.add_expr(*parse("x", w8));
    CHECK_FALSE(g.const_value(leaf).has_value());
}

TEST_CASE("dump_dot: deterministic and cluster-per-class") {
    EGraph g(w8);
    CHECK(g.dump_dot() == "digraph egraph {\n  compound=true;\n}\n");

    g.add_expr(*parse("a*2", w8));
    g.add_expr(*parse("a<<1", w8));
    std::string first = g.dump_dot();
    CHECK(first == g.dump_dot());
    // a, 2, 1, a*2, a<<1
    CHECK(g.class_count() == 5);
    size_t clusters = 0;
    for (size_t pos = 0; (pos = first.find("subgraph cluster_", pos)) != std::string::npos; ++pos)
        ++clusters;
    CHECK(clusters == 5);
}

// Naive congruence-closure reference: terms are (op, payload, child term ids);
// equivalence closed under congruence by repeated scanning.
namespace {

struct RefModel {
    struct Term {
        Op op;
        uint64_t value = 0;
        std::string name;
        std::vector<size_t> children;
    };
    std::vector<Term> terms;
    std::vector<size_t> cls;  // term id -> class label

    size_t add(Term t) {
        for (size_t i = 0; i < terms.size(); ++i) {
            const auto& o = terms[i];
            if (o.op == t.op && o.value == t.value && o.name == t.name &&
                o.children == t.children)
                return i;
        }
        terms.push_back(std::move(t));
        cls.push_back(cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1);
        close();
        return terms.size() - 1;
    }

    void unite(size_t a, size_t b) {
        size_t ca = cls[a], cb = cls[b];
        if (ca == cb) return;
        for (auto& c : cls)
            if (c == cb) c = ca;
        close();
    }

    void close() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < terms.size(); ++i) {
                for (size_t j = i + 1; j < terms.size(); ++j) {
                    if (cls[i] == cls[j]) continue;
                    const auto& a = terms[i];
                    const auto& b = terms[j];
                    if (a.op != b.op || a.value != b.value || a.name != b.name ||
                        a.children.size() != b.children.size())
                        continue;
                    bool congruent = true;
                    for (size_t k = 0; k < a.children.size(); ++k) {
                        if (cls[a.children[k]] != cls[b.children[k]]) {
                            congruent = false;
                            break;
                        }
                    }
                    if (congruent) {
                        size_t cb = cls[j];
                        for (auto& c : cls)
                            if (c == cb) c = cls[i];
                        changed = true;
                    }
                }
            }
        }
    }

    bool equivalent(size_t a, size_t b) const { return cls[a] == cls[b]; }
};

}  // namespace

TEST_CASE("model-based congruence agreement on random scripts") {
    Xorshift64 rng(2024);
    for (int script = 0; script < 50; ++script) {
        EGraph g(w8);
        RefModel ref;
        std::vector<EClassId> gids;
        std::vector<size_t> rids;

        int ops = 10 + static_cast<int>(rng.next_below(41));
        for (int s = 0; s < ops; ++s) {
            bool do_union = !gids.empty() && rng.next_below(3) == 0;
            if (do_union) {
                size_t a = rng.next_below(gids.size());
                size_t b = rng.next_below(gids.size());
                g.merge(gids[a], gids[b]);
                ref.unite(rids[a], rids[b]);
            } else if (gids.size() < 2 || rng.next_below(2) == 0) {
                std::string name(1, static_cast<char>('a' + rng.next_below(4)));
                gids.push_back(g.add(ENode::make_var(name)));
                rids.push_back(ref.add({Op::Var, 0, name, {}}));
            } else {
                static const Op binops[] = {Op::Add, Op::Mul, Op::And};
                Op op = binops[rng.next_below(3)];
                size_t a = rng.next_below(gids.size());
                size_t b = rng.next_below(gids.size());
                gids.push_back(g.add(ENode::make_binary(op, gids[a], gids[b])));
                rids.push_back(ref.add({op, 0, "", {rids[a], rids[b]}}));
            }
        }
        g.rebuild();
        CHECK(g.check_hashcons_unique());
        for (size_t i = 0; i < gids.size(); ++i) {
            for (size_t j = i + 1; j < gids.size(); ++j) {
                bool gm = g.find(gids[i]) == g.find(gids[j]);
                bool rm = ref.equivalent(rids[i], rids[j]);
                CHECK(gm == rm);
            }
        }
    }
}
