#ifndef OFFDIAG_SEQ_EXPR_HPP
#define OFFDIAG_SEQ_EXPR_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "offdiag/errors.hpp"

namespace offdiag {

/// Scalar sequence expressions over the index variable `n`, with +, -, *, /,
/// ^, sqrt, log, numeric literals and free named parameters (bound later, e.g.
/// by a sweep). Parsed once into an AST, then compiled to a small postfix
/// program so per-term evaluation is cheap inside long recurrences.
class SeqExpr {
public:
    static SeqExpr parse(const std::string& text) {
        Parser p(text);
        SeqExpr e;
        e.text_ = text;
        e.root_ = p.parse_expr();
        p.expect_end();
        return e;
    }

    const std::string& text() const { return text_; }

    /// Names of unbound parameters (excluding `n`).
    std::vector<std::string> parameters() const {
        std::vector<std::string> out;
        collect_params(root_.get(), out);
        return out;
    }

    /// A compiled evaluator with every named parameter fixed to a value.
    class Program {
    public:
        double operator()(std::uint64_t n) const {
            double stack[32];
            int sp = 0;
            const double nd = static_cast<double>(n);
            for (const Op& op : ops_) {
                switch (op.code) {
                    case OpCode::push_const: stack[sp++] = op.value; break;
                    case OpCode::push_n: stack[sp++] = nd; break;
                    case OpCode::add: --sp; stack[sp - 1] += stack[sp]; break;
                    case OpCode::sub: --sp; stack[sp - 1] -= stack[sp]; break;
                    case OpCode::mul: --sp; stack[sp - 1] *= stack[sp]; break;
                    case OpCode::div: --sp; stack[sp - 1] /= stack[sp]; break;
                    case OpCode::neg: stack[sp - 1] = -stack[sp - 1]; break;
                    case OpCode::fsqrt: stack[sp - 1] = std::sqrt(stack[sp - 1]); break;
                    case OpCode::flog: stack[sp - 1] = std::log(stack[sp - 1]); break;
                    case OpCode::pow_general: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
                    case OpCode::pow_int: {
                        double base = stack[sp - 1], acc = 1.0;
                        int e = op.ipow < 0 ? -op.ipow : op.ipow;
                        while (e) {
                            if (e & 1) acc *= base;
                            base *= base;
                            e >>= 1;
                        }
                        stack[sp - 1] = op.ipow < 0 ? 1.0 / acc : acc;
                        break;
                    }
                }
            }
            return stack[0];
        }

        /// Evaluate with a finiteness guard; failures identify the index.
        double checked(std::uint64_t n, const std::string& what) const {
            const double v = (*this)(n);
            if (!std::isfinite(v))
                throw domain_error(what + ": expression evaluation failed at n=" + std::to_string(n));
            return v;
        }

    private:
        friend class SeqExpr;
        enum class OpCode { push_const, push_n, add, sub, mul, div, neg, fsqrt, flog, pow_general, pow_int };
        struct Op {
            OpCode code;
            double value = 0.0;
            int ipow = 0;
        };
        std::vector<Op> ops_;
    };

    Program bind(const std::map<std::string, double>& params = {}) const {
        Program prog;
        emit(root_.get(), params, prog);
        // guard the fixed evaluation stack
        int depth = 0, maxdepth = 0;
        for (const auto& op : prog.ops_) {
            switch (op.code) {
                case Program::OpCode::push_const:
                case Program::OpCode::push_n: ++depth; break;
                case Program::OpCode::add:
                case Program::OpCode::sub:
                case Program::OpCode::mul:
                case Program::OpCode::div:
                case Program::OpCode::pow_general: --depth; break;
                default: break;
            }
            maxdepth = std::max(maxdepth, depth);
        }
        if (maxdepth > 31)
            throw config_error("sequence expression too deeply nested: '" + text_ + "'");
        return prog;
    }

private:
    struct Node {
        enum class Kind { constant, var_n, param, add, sub, mul, div, neg, fsqrt, flog, pow } kind;
        double value = 0.0;
        std::string name;
        std::unique_ptr<Node> a, b;
    };

    class Parser {
    public:
        explicit Parser(const std::string& s) : s_(s) {}

        std::unique_ptr<Node> parse_expr() {
            auto lhs = parse_term(true);
            for (;;) {
                skip_ws();
                if (peek() == '+' || peek() == '-') {
                    const char op = get();
                    auto rhs = parse_term(false);
                    auto n = std::make_unique<Node>();
                    n->kind = op == '+' ? Node::Kind::add : Node::Kind::sub;
                    n->a = std::move(lhs);
                    n->b = std::move(rhs);
                    lhs = std::move(n);
                } else {
                    return lhs;
                }
            }
        }

        void expect_end() {
            skip_ws();
            if (pos_ != s_.size())
                throw config_error("sequence expression: unexpected input at position " +
                                   std::to_string(pos_ + 1) + " in '" + s_ + "'");
        }

    private:
        std::unique_ptr<Node> parse_term(bool allow_leading_sign) {
            skip_ws();
            bool neg = false;
            if (allow_leading_sign && (peek() == '-' || peek() == '+')) neg = get() == '-';
            auto lhs = parse_power();
            for (;;) {
                skip_ws();
                if (peek() == '*' || peek() == '/') {
                    const char op = get();
                    auto rhs = parse_power();
                    auto n = std::make_unique<Node>();
                    n->kind = op == '*' ? Node::Kind::mul : Node::Kind::div;
                    n->a = std::move(lhs);
                    n->b = std::move(rhs);
                    lhs = std::move(n);
                } else {
                    break;
                }
            }
            if (neg) {
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::neg;
                n->a = std::move(lhs);
                lhs = std::move(n);
            }
            return lhs;
        }

        std::unique_ptr<Node> parse_power() {
            auto base = parse_atom();
            skip_ws();
            if (peek() == '^') {
                get();
                auto exp = parse_power(); // right associative
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::pow;
                n->a = std::move(base);
                n->b = std::move(exp);
                return n;
            }
            return base;
        }

        std::unique_ptr<Node> parse_atom() {
            skip_ws();
            const char c = peek();
            if (c == '(') {
                get();
                auto e = parse_expr();
                skip_ws();
                if (get() != ')')
                    throw config_error("sequence expression: missing ')' at position " +
                                       std::to_string(pos_) + " in '" + s_ + "'");
                return e;
            }
            if (c == '-') { // unary minus inside parentheses/exponents
                get();
                auto inner = parse_atom();
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::neg;
                n->a = std::move(inner);
                return n;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
            throw config_error("sequence expression: unexpected character '" + std::string(1, c) +
                               "' at position " + std::to_string(pos_ + 1) + " in '" + s_ + "'");
        }

        std::unique_ptr<Node> parse_number() {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                    s_[pos_] == 'e' || s_[pos_] == 'E' ||
                    ((s_[pos_] == '+' || s_[pos_] == '-') && pos_ > start &&
                     (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E'))))
                ++pos_;
            auto n = std::make_unique<Node>();
            n->kind = Node::Kind::constant;
            try {
                n->value = std::stod(s_.substr(start, pos_ - start));
            } catch (const std::exception&) {
                throw config_error("sequence expression: bad numeric literal at position " +
                                   std::to_string(start + 1) + " in '" + s_ + "'");
            }
            return n;
        }

        std::unique_ptr<Node> parse_ident() {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "sqrt" || name == "log") {
                skip_ws();
                if (get() != '(')
                    throw config_error("sequence expression: expected '(' after '" + name + "'");
                auto arg = parse_expr();
                skip_ws();
                if (get() != ')')
                    throw config_error("sequence expression: missing ')' after '" + name + "' argument");
                auto n = std::make_unique<Node>();
                n->kind = name == "sqrt" ? Node::Kind::fsqrt : Node::Kind::flog;
                n->a = std::move(arg);
                return n;
            }
            auto n = std::make_unique<Node>();
            if (name == "n") {
                n->kind = Node::Kind::var_n;
            } else {
                n->kind = Node::Kind::param;
                n->name = name;
            }
            return n;
        }

        char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
        char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }
        void skip_ws() {
            while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }

        const std::string& s_;
        std::size_t pos_ = 0;
    };

    static void collect_params(const Node* n, std::vector<std::string>& out) {
        if (n == nullptr) return;
        if (n->kind == Node::Kind::param) {
            for (const auto& s : out)
                if (s == n->name) return;
            out.push_back(n->name);
        }
        collect_params(n->a.get(), out);
        collect_params(n->b.get(), out);
    }

    static bool constant_int(const Node* n, const std::map<std::string, double>& params, int& value) {
        double v;
        if (n->kind == Node::Kind::constant) {
            v = n->value;
        } else if (n->kind == Node::Kind::param) {
            auto it = params.find(n->name);
            if (it == params.end()) return false;
            v = it->second;
        } else if (n->kind == Node::Kind::neg) {
            if (!constant_int(n->a.get(), params, value)) return false;
            value = -value;
            return true;
        } else {
            return false;
        }
        if (v != std::floor(v) || std::abs(v) > 64.0) return false;
        value = static_cast<int>(v);
        return true;
    }

    static void emit(const Node* n, const std::map<std::string, double>& params, Program& prog) {
        using K = Node::Kind;
        using C = Program::OpCode;
        auto push = [&prog](Program::Op op) { prog.ops_.push_back(op); };
        switch (n->kind) {
            case K::constant: push({C::push_const, n->value, 0}); break;
            case K::var_n: push({C::push_n, 0.0, 0}); break;
            case K::param: {
                auto it = params.find(n->name);
                if (it == params.end())
                    throw config_error("sequence expression: unbound parameter '" + n->name + "'");
                push({C::push_const, it->second, 0});
                break;
            }
            case K::add: emit(n->a.get(), params, prog); emit(n->b.get(), params, prog); push({C::add, 0, 0}); break;
            case K::sub: emit(n->a.get(), params, prog); emit(n->b.get(), params, prog); push({C::sub, 0, 0}); break;
            case K::mul: emit(n->a.get(), params, prog); emit(n->b.get(), params, prog); push({C::mul, 0, 0}); break;
            case K::div: emit(n->a.get(), params, prog); emit(n->b.get(), params, prog); push({C::div, 0, 0}); break;
            case K::neg: emit(n->a.get(), params, prog); push({C::neg, 0, 0}); break;
            case K::fsqrt: emit(n->a.get(), params, prog); push({C::fsqrt, 0, 0}); break;
            case K::flog: emit(n->a.get(), params, prog); push({C::flog, 0, 0}); break;
            case K::pow: {
                emit(n->a.get(), params, prog);
                int ip = 0;
                if (constant_int(n->b.get(), params, ip)) {
                    Program::Op op{C::pow_int, 0.0, ip};
                    push(op);
                } else {
                    emit(n->b.get(), params, prog);
                    push({C::pow_general, 0, 0});
                }
                break;
            }
        }
    }

    std::string text_;
    std::unique_ptr<Node> root_;

public:
    SeqExpr() = default;
    SeqExpr(SeqExpr&&) = default;
    SeqExpr& operator=(SeqExpr&&) = default;
    SeqExpr(const SeqExpr& other) { *this = other; }
    SeqExpr& operator=(const SeqExpr& other) {
        if (this != &other) {
            text_ = other.text_;
            root_ = clone(other.root_.get());
        }
        return *this;
    }

private:
    static std::unique_ptr<Node> clone(const Node* n) {
        if (n == nullptr) return nullptr;
        auto c = std::make_unique<Node>();
        c->kind = n->kind;
        c->value = n->value;
        c->name = n->name;
        c->a = clone(n->a.get());
        c->b = clone(n->b.get());
        return c;
    }
};

} // namespace offdiag

#endif
