#include "emba/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace emba {

const char* op_name(Op op) {
    switch (op) {
        case Op::Const: return "const";
        case Op::Var: return "var";
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::And: return "&";
        case Op::Or: return "|";
        case Op::Xor: return "^";
        case Op::Shl: return "<<";
        case Op::Neg: return "neg";
        case Op::Not: return "~";
    }
    return "?";
}

bool is_binary(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::And:
        case Op::Or:
        case Op::Xor:
        case Op::Shl:
            return true;
        default:
            return false;
    }
}

bool is_unary(Op op) { return op == Op::Neg || op == Op::Not; }

ExprPtr Expr::constant(uint64_t value, Width w) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = Op::Const;
    e->value_ = w.truncate(value);
    return e;
}

ExprPtr Expr::var(std::string name) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = Op::Var;
    e->name_ = std::move(name);
    return e;
}

ExprPtr Expr::unary(Op op, ExprPtr child) {
    if (!is_unary(op)) throw std::invalid_argument("not a unary op");
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = op;
    e->lhs_ = std::move(child);
    return e;
}

ExprPtr Expr::binary(Op op, ExprPtr lhs, ExprPtr rhs) {
    if (!is_binary(op)) throw std::invalid_argument("not a binary op");
    auto e = std::shared_ptr<Expr>(new Expr());
    e->op_ = op;
    e->lhs_ = std::move(lhs);
    e->rhs_ = std::move(rhs);
    return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.op() != b.op()) return false;
    switch (a.op()) {
        case Op::Const: return a.value() == b.value();
        case Op::Var: return a.name() == b.name();
        case Op::Neg:
        case Op::Not:
            return structurally_equal(*a.left(), *b.left());
        default:
            return structurally_equal(*a.left(), *b.left()) &&
                   structurally_equal(*a.right(), *b.right());
    }
}

namespace {

class Parser {
public:
    Parser(std::string_view text, Width w) : text_(text), width_(w) {}

    ExprPtr parse_all() {
        auto e = parse_or();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError(pos_, "trailing input");
        return e;
    }

private:
    std::string_view text_;
    Width width_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(std::string_view tok) {
        skip_ws();
        if (text_.substr(pos_, tok.size()) == tok) {
            // "<<" must not be eaten as part of a longer run; "<" alone is unknown.
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ExprPtr parse_or() {
        auto lhs = parse_xor();
        while (eat("|")) lhs = Expr::binary(Op::Or, lhs, parse_xor());
        return lhs;
    }

    ExprPtr parse_xor() {
        auto lhs = parse_and();
        while (eat("^")) lhs = Expr::binary(Op::Xor, lhs, parse_and());
        return lhs;
    }

    ExprPtr parse_and() {
        auto lhs = parse_shift();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '&') {
                ++pos_;
                lhs = Expr::binary(Op::And, lhs, parse_shift());
            } else {
                break;
            }
        }
        return lhs;
    }

    ExprPtr parse_shift() {
        auto lhs = parse_addsub();
        while (eat("<<")) lhs = Expr::binary(Op::Shl, lhs, parse_addsub());
        return lhs;
    }

    ExprPtr parse_addsub() {
        auto lhs = parse_mul();
        while (true) {
            skip_ws();
            if (pos_ >= text_.size()) break;
            char c = text_[pos_];
            if (c == '+') {
                ++pos_;
                lhs = Expr::binary(Op::Add, lhs, parse_mul());
            } else if (c == '-') {
                ++pos_;
                lhs = Expr::binary(Op::Sub, lhs, parse_mul());
            } else {
                break;
            }
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        auto lhs = parse_unary();
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '*') {
                ++pos_;
                lhs = Expr::binary(Op::Mul, lhs, parse_unary());
            } else {
                break;
            }
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        skip_ws();
        if (pos_ < text_.size()) {
            if (text_[pos_] == '~') {
                ++pos_;
                return Expr::unary(Op::Not, parse_unary());
            }
            if (text_[pos_] == '-') {
                ++pos_;
                return Expr::unary(Op::Neg, parse_unary());
            }
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError(pos_, "unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            size_t open = pos_;
            ++pos_;
            auto e = parse_or();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')')
                throw ParseError(open, "unbalanced parenthesis");
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(pos_, std::string("unknown token '") + c + "'");
    }

    ExprPtr parse_number() {
        size_t start = pos_;
        uint64_t value = 0;
        if (text_.substr(pos_, 2) == "0x" || text_.substr(pos_, 2) == "0X") {
            pos_ += 2;
            if (pos_ >= text_.size() || !std::isxdigit(static_cast<unsigned char>(text_[pos_])))
                throw ParseError(start, "malformed hex constant");
            while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_]))) {
                char d = text_[pos_++];
                uint64_t digit = std::isdigit(static_cast<unsigned char>(d))
                                     ? static_cast<uint64_t>(d - '0')
                                     : static_cast<uint64_t>(std::tolower(d) - 'a' + 10);
                value = value * 16 + digit;  // wraps on overflow; truncated below anyway
            }
        } else {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                value = value * 10 + static_cast<uint64_t>(text_[pos_++] - '0');
            }
        }
        return Expr::constant(value, width_);
    }

    ExprPtr parse_ident() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return Expr::var(std::string(text_.substr(start, pos_ - start)));
    }
};

// Binding strength per the precedence table; atoms are tightest.
int precedence(Op op) {
    switch (op) {
        case Op::Or: return 1;
        case Op::Xor: return 2;
        case Op::And: return 3;
        case Op::Shl: return 4;
        case Op::Add:
        case Op::Sub: return 5;
        case Op::Mul: return 6;
        case Op::Neg:
        case Op::Not: return 7;
        case Op::Const:
        case Op::Var: return 8;
    }
    return 8;
}

void render_into(const Expr& e, std::ostringstream& out) {
    switch (e.op()) {
        case Op::Const:
            out << e.value();
            return;
        case Op::Var:
            out << e.name();
            return;
        case Op::Neg:
        case Op::Not: {
            out << (e.op() == Op::Neg ? '-' : '~');
            bool parens = precedence(e.left()->op()) < precedence(e.op());
            if (parens) out << '(';
            render_into(*e.left(), out);
            if (parens) out << ')';
            return;
        }
        default: {
            int prec = precedence(e.op());
            bool lp = precedence(e.left()->op()) < prec;
            // left-associative: a right child at the same level needs parens
            bool rp = precedence(e.right()->op()) <= prec;
            if (lp) out << '(';
            render_into(*e.left(), out);
            if (lp) out << ')';
            out << op_name(e.op());
            if (rp) out << '(';
            render_into(*e.right(), out);
            if (rp) out << ')';
            return;
        }
    }
}

}  // namespace

ExprPtr parse(std::string_view text, Width w) { return Parser(text, w).parse_all(); }

std::string render(const Expr& e) {
    std::ostringstream out;
    render_into(e, out);
    return out.str();
}

ExprPtr preprocess(const ExprPtr& e, Width w) {
    switch (e->op()) {
        case Op::Const:
        case Op::Var:
            return e;
        case Op::Neg:
            return Expr::binary(Op::Sub, Expr::constant(0, w), preprocess(e->left(), w));
        case Op::Not:
            return Expr::binary(Op::Xor, preprocess(e->left(), w), Expr::constant(w.mask(), w));
        case Op::Shl: {
            auto l = preprocess(e->left(), w);
            auto r = preprocess(e->right(), w);
            if (r->op() != Op::Const)
                throw ParseError(0, "shift amount must be a constant");
            return Expr::binary(Op::Shl, l, r);
        }
        default: {
            auto l = preprocess(e->left(), w);
            auto r = preprocess(e->right(), w);
            if (l == e->left() && r == e->right()) return e;
            return Expr::binary(e->op(), l, r);
        }
    }
}

int ast_size(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Var:
            return 1;
        case Op::Neg:
        case Op::Not:
            return 1 + ast_size(*e.left());
        default:
            return 1 + ast_size(*e.left()) + ast_size(*e.right());
    }
}

namespace {

void collect_vars(const Expr& e, std::vector<std::string>& out,
                  std::unordered_set<std::string>& seen) {
    switch (e.op()) {
        case Op::Const:
            return;
        case Op::Var:
            if (seen.insert(e.name()).second) out.push_back(e.name());
            return;
        case Op::Neg:
        case Op::Not:
            collect_vars(*e.left(), out, seen);
            return;
        default:
            collect_vars(*e.left(), out, seen);
            collect_vars(*e.right(), out, seen);
            return;
    }
}

// Purely bitwise subtree: And/Or/Xor over variables and constants.
bool is_bitwise(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Var:
            return true;
        case Op::And:
        case Op::Or:
        case Op::Xor:
            return is_bitwise(*e.left()) && is_bitwise(*e.right());
        default:
            return false;
    }
}

bool contains_arithmetic(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Var:
            return false;
        case Op::And:
        case Op::Or:
        case Op::Xor:
            return contains_arithmetic(*e.left()) || contains_arithmetic(*e.right());
        default:
            return true;
    }
}

bool has_bitwise_over_arithmetic(const Expr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Var:
            return false;
        case Op::And:
        case Op::Or:
        case Op::Xor:
            if (contains_arithmetic(*e.left()) || contains_arithmetic(*e.right())) return true;
            return has_bitwise_over_arithmetic(*e.left()) || has_bitwise_over_arithmetic(*e.right());
        case Op::Neg:
        case Op::Not:
            return has_bitwise_over_arithmetic(*e.left());
        default:
            return has_bitwise_over_arithmetic(*e.left()) || has_bitwise_over_arithmetic(*e.right());
    }
}

// A term is coefficient * product of bitwise factors; returns the number of
// non-constant bitwise factors, or -1 if the subtree is not a term.
int term_factor_count(const Expr& e) {
    if (e.op() == Op::Mul) {
        int l = term_factor_count(*e.left());
        int r = term_factor_count(*e.right());
        if (l < 0 || r < 0) return -1;
        return l + r;
    }
    if (e.op() == Op::Const) return 0;
    if (is_bitwise(e)) return 1;
    return -1;
}

// Walks the sum spine (Add/Sub); records the max product length seen, or
// fails when a summand is not a term.
bool scan_sum(const Expr& e, int& max_factors) {
    if (e.op() == Op::Add || e.op() == Op::Sub) {
        return scan_sum(*e.left(), max_factors) && scan_sum(*e.right(), max_factors);
    }
    int n = term_factor_count(e);
    if (n < 0) return false;
    max_factors = std::max(max_factors, n);
    return true;
}

}  // namespace

std::vector<std::string> free_vars(const Expr& e) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    collect_vars(e, out, seen);
    return out;
}

const char* mba_class_name(MbaClass c) {
    switch (c) {
        case MbaClass::Linear: return "linear";
        case MbaClass::Polynomial: return "polynomial";
        case MbaClass::NonPolynomial: return "non-polynomial";
        case MbaClass::NotMba: return "not-mba";
    }
    return "?";
}

MbaClass classify(const Expr& e) {
    if (has_bitwise_over_arithmetic(e)) return MbaClass::NonPolynomial;
    int max_factors = 0;
    if (!scan_sum(e, max_factors)) return MbaClass::NotMba;
    return max_factors >= 2 ? MbaClass::Polynomial : MbaClass::Linear;
}

}  // namespace emba
