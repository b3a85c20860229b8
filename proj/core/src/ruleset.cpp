#include "emba/rewrite.hpp"

namespace emba {

namespace {

Pattern pv(const char* n) { return Pattern::pv(n); }

struct Builder {
    Width w;
    RuleSet out;

    void directed(const char* name, RuleGroup group, Pattern lhs, Pattern rhs) {
        Rule r;
        r.name = name;
        r.group = group;
        r.lhs = std::move(lhs);
        r.rhs = std::move(rhs);
        out.rules.push_back(std::move(r));
    }

    void bidirectional(const char* name, RuleGroup group, Pattern a, Pattern b) {
        directed(name, group, a, b);
        Rule rev;
        rev.name = std::string(name) + "-rev";
        rev.group = group;
        rev.lhs = std::move(b);
        rev.rhs = std::move(a);
        out.rules.push_back(std::move(rev));
    }

    void dynamic(const char* name, RuleGroup group, Pattern lhs,
                 std::function<std::optional<Pattern>(const EGraph&, const Subst&)> rhs) {
        Rule r;
        r.name = name;
        r.group = group;
        r.lhs = std::move(lhs);
        r.dynamic_rhs = std::move(rhs);
        out.rules.push_back(std::move(r));
    }
};

}  // namespace

RuleSet default_ruleset(Width w) {
    Builder b{w, {}};
    const uint64_t M = w.mask();
    auto x = pv("x");
    auto y = pv("y");
    auto z = pv("z");
    auto zero = Pattern::lit(0);
    auto one = Pattern::lit(1);
    auto two = Pattern::lit(w.truncate(2));
    auto mask = Pattern::lit(M);
    auto n = [](Op op, Pattern l, Pattern r) { return Pattern::node(op, std::move(l), std::move(r)); };

    // Structural: commutativity is its own reverse, associativity is not.
    for (auto [name, op] : std::initializer_list<std::pair<const char*, Op>>{
             {"comm-add", Op::Add}, {"comm-mul", Op::Mul}, {"comm-and", Op::And},
             {"comm-or", Op::Or}, {"comm-xor", Op::Xor}}) {
        b.directed(name, RuleGroup::Structural, n(op, x, y), n(op, y, x));
    }
    for (auto [name, op] : std::initializer_list<std::pair<const char*, Op>>{
             {"assoc-add", Op::Add}, {"assoc-mul", Op::Mul}, {"assoc-and", Op::And},
             {"assoc-or", Op::Or}, {"assoc-xor", Op::Xor}}) {
        b.bidirectional(name, RuleGroup::Structural, n(op, n(op, x, y), z), n(op, x, n(op, y, z)));
    }

    // ArithId
    b.directed("add-0", RuleGroup::ArithId, n(Op::Add, x, zero), x);
    b.directed("mul-0", RuleGroup::ArithId, n(Op::Mul, x, zero), zero);
    b.directed("mul-1", RuleGroup::ArithId, n(Op::Mul, x, one), x);
    b.directed("sub-0", RuleGroup::ArithId, n(Op::Sub, x, zero), x);
    b.directed("sub-self", RuleGroup::ArithId, n(Op::Sub, x, x), zero);
    b.directed("add-same", RuleGroup::ArithId, n(Op::Add, x, x), n(Op::Mul, two, x));
    // Two's-complement pair; unconditionally sound at every width.
    b.bidirectional("neg-def", RuleGroup::ArithId, n(Op::Sub, zero, y),
                    n(Op::Add, n(Op::Xor, y, mask), one));
    b.bidirectional("sub-via-neg", RuleGroup::ArithId, n(Op::Sub, x, y),
                    n(Op::Add, x, n(Op::Sub, zero, y)));
    b.bidirectional("distribute", RuleGroup::ArithId, n(Op::Mul, x, n(Op::Add, y, z)),
                    n(Op::Add, n(Op::Mul, x, y), n(Op::Mul, x, z)));
    // x << c  <->  x * 2^c, constant shift amounts only.
    b.dynamic("shl-to-mul", RuleGroup::ArithId, n(Op::Shl, x, pv("c")),
              [w](const EGraph& g, const Subst& s) -> std::optional<Pattern> {
                  auto c = g.const_value(s.at("c"));
                  if (!c) return std::nullopt;
                  uint64_t factor = *c >= 64 ? 0 : w.truncate(uint64_t{1} << *c);
                  return Pattern::node(Op::Mul, Pattern::pv("x"), Pattern::lit(factor));
              });
    b.dynamic("shl-to-mul-rev", RuleGroup::ArithId, n(Op::Mul, x, pv("k")),
              [w](const EGraph& g, const Subst& s) -> std::optional<Pattern> {
                  auto k = g.const_value(s.at("k"));
                  if (!k || *k == 0 || (*k & (*k - 1)) != 0) return std::nullopt;
                  uint64_t c = 0;
                  while ((uint64_t{1} << c) != *k) ++c;
                  if (c >= static_cast<uint64_t>(w.bits)) return std::nullopt;
                  return Pattern::node(Op::Shl, Pattern::pv("x"), Pattern::lit(c));
              });

    // BoolId
    b.directed("and-self", RuleGroup::BoolId, n(Op::And, x, x), x);
    b.directed("or-self", RuleGroup::BoolId, n(Op::Or, x, x), x);
    b.directed("xor-self", RuleGroup::BoolId, n(Op::Xor, x, x), zero);
    b.directed("and-0", RuleGroup::BoolId, n(Op::And, x, zero), zero);
    b.directed("and-mask", RuleGroup::BoolId, n(Op::And, x, mask), x);
    b.directed("or-0", RuleGroup::BoolId, n(Op::Or, x, zero), x);
    b.directed("or-mask", RuleGroup::BoolId, n(Op::Or, x, mask), mask);
    b.directed("xor-0", RuleGroup::BoolId, n(Op::Xor, x, zero), x);
    b.directed("absorb-and", RuleGroup::BoolId, n(Op::And, x, n(Op::Or, x, y)), x);
    b.directed("absorb-or", RuleGroup::BoolId, n(Op::Or, x, n(Op::And, x, y)), x);
    b.bidirectional("and-or-distrib", RuleGroup::BoolId, n(Op::And, x, n(Op::Or, y, z)),
                    n(Op::Or, n(Op::And, x, y), n(Op::And, x, z)));
    b.bidirectional("or-and-distrib", RuleGroup::BoolId, n(Op::Or, x, n(Op::And, y, z)),
                    n(Op::And, n(Op::Or, x, y), n(Op::Or, x, z)));
    b.bidirectional("demorgan-and", RuleGroup::BoolId, n(Op::Xor, n(Op::And, x, y), mask),
                    n(Op::Or, n(Op::Xor, x, mask), n(Op::Xor, y, mask)));
    b.bidirectional("demorgan-or", RuleGroup::BoolId, n(Op::Xor, n(Op::Or, x, y), mask),
                    n(Op::And, n(Op::Xor, x, mask), n(Op::Xor, y, mask)));
    // Subsumed by xor-self plus assoc; kept for discovery speed.
    b.directed("not-not", RuleGroup::BoolId, n(Op::Xor, n(Op::Xor, x, mask), mask), x);

    // MbaBridge: the arithmetic/boolean crossover identities.
    b.bidirectional("mba-add1", RuleGroup::MbaBridge, n(Op::Add, x, y),
                    n(Op::Add, n(Op::Or, x, y), n(Op::And, x, y)));
    b.bidirectional("mba-add2", RuleGroup::MbaBridge, n(Op::Add, x, y),
                    n(Op::Add, n(Op::Xor, x, y), n(Op::Mul, two, n(Op::And, x, y))));
    b.bidirectional("mba-or", RuleGroup::MbaBridge, n(Op::Or, x, y),
                    n(Op::Add, x, n(Op::And, n(Op::Xor, x, mask), y)));
    b.bidirectional("mba-xor", RuleGroup::MbaBridge, n(Op::Xor, x, y),
                    n(Op::Sub, n(Op::Or, x, y), n(Op::And, x, y)));
    b.bidirectional("mba-and", RuleGroup::MbaBridge, n(Op::And, x, y),
                    n(Op::Sub, n(Op::Or, x, y), n(Op::Xor, x, y)));
    b.bidirectional("mba-sub", RuleGroup::MbaBridge, n(Op::Sub, x, y),
                    n(Op::Sub, n(Op::And, x, n(Op::Xor, y, mask)),
                      n(Op::And, n(Op::Xor, x, mask), y)));

    // Analysis-driven folding of operator nodes over known-constant classes.
    Rule fold;
    fold.name = "const-fold";
    fold.group = RuleGroup::ConstFold;
    fold.const_fold = true;
    b.out.rules.push_back(std::move(fold));

    return std::move(b.out);
}

}  // namespace emba
