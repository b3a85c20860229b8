#include "emba/semantics.hpp"

#include <algorithm>
#include <set>

namespace emba {

const char* equiv_status_name(EquivStatus s) {
    switch (s) {
        case EquivStatus::Equivalent: return "equivalent";
        case EquivStatus::NotEquivalent: return "not-equivalent";
        case EquivStatus::ProbablyEquivalent: return "probably-equivalent";
    }
    return "?";
}

uint64_t eval(const Expr& e, const Env& env, Width w) {
    switch (e.op()) {
        case Op::Const:
            return w.truncate(e.value());
        case Op::Var: {
            auto it = env.find(e.name());
            if (it == env.end()) throw UnboundVariable(e.name());
            return w.truncate(it->second);
        }
        case Op::Neg:
            return w.truncate(0 - eval(*e.left(), env, w));
        case Op::Not:
            return w.truncate(~eval(*e.left(), env, w));
        default:
            break;
    }
    uint64_t l = eval(*e.left(), env, w);
    uint64_t r = eval(*e.right(), env, w);
    switch (e.op()) {
        case Op::Add: return w.truncate(l + r);
        case Op::Sub: return w.truncate(l - r);
        case Op::Mul: return w.truncate(l * r);
        case Op::And: return l & r;
        case Op::Or: return l | r;
        case Op::Xor: return l ^ r;
        case Op::Shl: return r >= 64 ? 0 : w.truncate(l << r);
        default: throw std::logic_error("bad operator");
    }
}

namespace {

std::vector<std::string> joint_vars(const Expr& a, const Expr& b) {
    std::set<std::string> names;
    for (auto& v : free_vars(a)) names.insert(v);
    for (auto& v : free_vars(b)) names.insert(v);
    return {names.begin(), names.end()};
}

// Flat postfix form with variable slots resolved up front, so the exhaustive
// and sampling loops skip the per-assignment name lookups of the tree walker.
struct Program {
    struct Ins {
        Op op;
        uint64_t value;  // Op::Const
        size_t slot;     // Op::Var
    };
    std::vector<Ins> code;

    static Program compile(const Expr& e, const std::vector<std::string>& vars) {
        Program p;
        compile_into(e, vars, p);
        return p;
    }

    uint64_t run(const uint64_t* slots, Width w, uint64_t* stack) const {
        size_t sp = 0;
        for (const auto& ins : code) {
            switch (ins.op) {
                case Op::Const: stack[sp++] = w.truncate(ins.value); break;
                case Op::Var: stack[sp++] = w.truncate(slots[ins.slot]); break;
                case Op::Neg: stack[sp - 1] = w.truncate(0 - stack[sp - 1]); break;
                case Op::Not: stack[sp - 1] = w.truncate(~stack[sp - 1]); break;
                default: {
                    uint64_t r = stack[--sp];
                    uint64_t l = stack[sp - 1];
                    uint64_t v = 0;
                    switch (ins.op) {
                        case Op::Add: v = w.truncate(l + r); break;
                        case Op::Sub: v = w.truncate(l - r); break;
                        case Op::Mul: v = w.truncate(l * r); break;
                        case Op::And: v = l & r; break;
                        case Op::Or: v = l | r; break;
                        case Op::Xor: v = l ^ r; break;
                        case Op::Shl: v = r >= 64 ? 0 : w.truncate(l << r); break;
                        default: throw std::logic_error("bad operator");
                    }
                    stack[sp - 1] = v;
                }
            }
        }
        return stack[0];
    }

private:
    static void compile_into(const Expr& e, const std::vector<std::string>& vars, Program& p) {
        switch (e.op()) {
            case Op::Const:
                p.code.push_back({Op::Const, e.value(), 0});
                return;
            case Op::Var: {
                auto it = std::find(vars.begin(), vars.end(), e.name());
                if (it == vars.end()) throw UnboundVariable(e.name());
                p.code.push_back({Op::Var, 0, static_cast<size_t>(it - vars.begin())});
                return;
            }
            case Op::Neg:
            case Op::Not:
                compile_into(*e.left(), vars, p);
                p.code.push_back({e.op(), 0, 0});
                return;
            default:
                compile_into(*e.left(), vars, p);
                compile_into(*e.right(), vars, p);
                p.code.push_back({e.op(), 0, 0});
        }
    }
};

}  // namespace

EquivVerdict equiv_exhaustive(const Expr& a, const Expr& b, Width w) {
    auto vars = joint_vars(a, b);
    size_t n = vars.size();
    if (n * static_cast<size_t>(w.bits) > 24) throw BudgetExceeded();

    uint64_t total = uint64_t{1} << (n * static_cast<size_t>(w.bits));
    auto pa = Program::compile(a, vars);
    auto pb = Program::compile(b, vars);
    std::vector<uint64_t> slots(std::max<size_t>(n, 1), 0);
    std::vector<uint64_t> stack(std::max(pa.code.size(), pb.code.size()) + 1);

    for (uint64_t i = 0; i < total; ++i) {
        // Decode i with the first (lexicographically smallest) variable in the
        // most significant position, so counterexamples come out in
        // lexicographic assignment order.
        uint64_t rest = i;
        for (size_t k = n; k-- > 0;) {
            slots[k] = rest & w.mask();
            rest >>= w.bits;
        }
        if (pa.run(slots.data(), w, stack.data()) != pb.run(slots.data(), w, stack.data())) {
            Env env;
            for (size_t k = 0; k < n; ++k) env[vars[k]] = slots[k];
            return {EquivStatus::NotEquivalent, env, i + 1};
        }
    }
    return {EquivStatus::Equivalent, std::nullopt, total};
}

EquivVerdict equiv_random(const Expr& a, const Expr& b, Width w, uint64_t samples, uint64_t seed) {
    auto vars = joint_vars(a, b);
    Xorshift64 rng(seed);
    auto pa = Program::compile(a, vars);
    auto pb = Program::compile(b, vars);
    std::vector<uint64_t> slots(std::max<size_t>(vars.size(), 1), 0);
    std::vector<uint64_t> stack(std::max(pa.code.size(), pb.code.size()) + 1);

    for (uint64_t i = 0; i < samples; ++i) {
        for (size_t k = 0; k < vars.size(); ++k) slots[k] = rng.next() & w.mask();
        if (pa.run(slots.data(), w, stack.data()) != pb.run(slots.data(), w, stack.data())) {
            Env env;
            for (size_t k = 0; k < vars.size(); ++k) env[vars[k]] = slots[k];
            return {EquivStatus::NotEquivalent, env, i + 1};
        }
    }
    return {EquivStatus::ProbablyEquivalent, std::nullopt, samples};
}

EquivVerdict verify_equiv(const Expr& a, const Expr& b, Width w, uint64_t samples, uint64_t seed) {
    auto vars = joint_vars(a, b);
    size_t n = std::max<size_t>(vars.size(), 1);
    int exhaustive_bits = std::min<int>(w.bits, static_cast<int>(24 / n));
    exhaustive_bits = std::max(exhaustive_bits, 1);

    auto ex = equiv_exhaustive(a, b, Width::of(exhaustive_bits));
    if (ex.status == EquivStatus::NotEquivalent) return ex;
    if (exhaustive_bits == w.bits) return ex;

    auto rnd = equiv_random(a, b, w, samples, seed);
    if (rnd.status == EquivStatus::NotEquivalent) return rnd;
    rnd.assignments_checked += ex.assignments_checked;
    return rnd;
}

}  // namespace emba
