#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emba {

// Bit width of every value in an expression. All arithmetic wraps mod 2^bits.
struct Width {
    int bits = 64;

    constexpr uint64_t mask() const {
        return bits >= 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
    }
    constexpr uint64_t truncate(uint64_t v) const { return v & mask(); }

    static Width of(int bits) {
        if (bits < 1 || bits > 64)
            throw std::invalid_argument("width must be in [1,64]");
        return Width{bits};
    }
};

// Operator tags. The declaration order doubles as the extraction tie-break
// order (Const < Var < Add < Sub < Mul < And < Or < Xor < Shl); Neg and Not
// exist only before preprocessing.
enum class Op : uint8_t {
    Const,
    Var,
    Add,
    Sub,
    Mul,
    And,
    Or,
    Xor,
    Shl,
    Neg,
    Not,
};

const char* op_name(Op op);
bool is_binary(Op op);
bool is_unary(Op op);

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree. Nodes are shared freely between threads.
class Expr {
public:
    static ExprPtr constant(uint64_t value, Width w);
    static ExprPtr var(std::string name);
    static ExprPtr unary(Op op, ExprPtr child);
    static ExprPtr binary(Op op, ExprPtr lhs, ExprPtr rhs);

    Op op() const { return op_; }
    uint64_t value() const { return value_; }
    const std::string& name() const { return name_; }
    const ExprPtr& left() const { return lhs_; }
    const ExprPtr& right() const { return rhs_; }

private:
    Expr() = default;

    Op op_ = Op::Const;
    uint64_t value_ = 0;
    std::string name_;
    ExprPtr lhs_;
    ExprPtr rhs_;
};

bool structurally_equal(const Expr& a, const Expr& b);

struct ParseError : std::runtime_error {
    ParseError(size_t position, const std::string& message)
        : std::runtime_error("parse error at " + std::to_string(position) + ": " + message),
          position(position),
          message(message) {}
    size_t position;
    std::string message;
};

// Precedence (tightest first): unary > * > (+,-) > << > & > ^ > |.
// All binary operators are left-associative; parentheses override.
ExprPtr parse(std::string_view text, Width w);

// Emits text that reparses to a structurally identical tree, with minimal
// parentheses under the precedence table above.
std::string render(const Expr& e);

// Eliminates unary operators: Neg(x) -> 0 - x, Not(x) -> x ^ mask.
// Idempotent. Rejects Shl with a non-constant shift amount.
ExprPtr preprocess(const ExprPtr& e, Width w);

// Node count: every node contributes exactly 1.
int ast_size(const Expr& e);

// Distinct variable names in first-occurrence order.
std::vector<std::string> free_vars(const Expr& e);

enum class MbaClass { Linear, Polynomial, NonPolynomial, NotMba };

const char* mba_class_name(MbaClass c);

// Shape classification of a preprocessed expression; reporting only.
MbaClass classify(const Expr& e);

}  // namespace emba
