#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "emba/expr.hpp"

namespace emba {

// Variable assignment; ordered map so counterexamples print deterministically.
using Env = std::map<std::string, uint64_t>;

struct UnboundVariable : std::runtime_error {
    explicit UnboundVariable(const std::string& name)
        : std::runtime_error("unbound variable: " + name), name(name) {}
    std::string name;
};

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded() : std::runtime_error("exhaustive check budget exceeded (n*bits > 24)") {}
};

enum class EquivStatus { Equivalent, NotEquivalent, ProbablyEquivalent };

const char* equiv_status_name(EquivStatus s);

struct EquivVerdict {
    EquivStatus status;
    std::optional<Env> counterexample;  // always present for NotEquivalent
    uint64_t assignments_checked = 0;

    bool ok() const { return status != EquivStatus::NotEquivalent; }
};

uint64_t eval(const Expr& e, const Env& env, Width w);

// Checks all 2^(n*bits) assignments over the union of both variable sets,
// variables in sorted name order, last variable varying fastest. Requires
// n*bits <= 24.
EquivVerdict equiv_exhaustive(const Expr& a, const Expr& b, Width w);

// Seeded xorshift64 sampling; same seed gives the same verdict.
// Recurrence: s ^= s << 13; s ^= s >> 7; s ^= s << 17.
EquivVerdict equiv_random(const Expr& a, const Expr& b, Width w, uint64_t samples, uint64_t seed);

// Standard verification policy: exhaustive at width min(w, floor(24/n)) plus
// random sampling at the requested width; both must pass. Reports the weaker
// of the two statuses (Equivalent only if the exhaustive pass ran at full width).
EquivVerdict verify_equiv(const Expr& a, const Expr& b, Width w, uint64_t samples, uint64_t seed);

// The deterministic generator behind equiv_random and the corpus generator.
class Xorshift64 {
public:
    explicit Xorshift64(uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

    uint64_t next() {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        return state_;
    }

    // Uniform-enough value in [0, n); n > 0.
    uint64_t next_below(uint64_t n) { return next() % n; }

private:
    uint64_t state_;
};

}  // namespace emba
