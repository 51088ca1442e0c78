// Tiny arithmetic expression grammar for user-supplied coefficients.
//
// expr    := term (('+'|'-') term)*
// term    := factor (('*'|'/') factor)*
// factor  := unary ('^' factor)?          (right associative)
// unary   := ('+'|'-')* primary
// primary := number | 'x' | 'pi' | fn '(' expr ')' | '(' expr ')'
// fn      := cosh | cos | sin | exp | abs | sgn
//
// Parsed once into a postfix program; evaluation is a small stack machine.
#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "indefsl/common.hpp"

namespace indefsl {

class Expr {
  public:
    Expr() = default;

    static Expr parse(const std::string& text) {
        Parser p{text, 0};
        Expr e;
        e.text_ = text;
        p.parse_expr(e.code_);
        p.skip_ws();
        if (p.pos != text.size())
            throw ParseError("trailing input at position " + std::to_string(p.pos) +
                             " in expression \"" + text + "\"");
        return e;
    }

    double operator()(double x) const {
        double stack[64];
        int top = -1;
        for (const Op& op : code_) {
            switch (op.kind) {
                case OpKind::Push: stack[++top] = op.value; break;
                case OpKind::Var: stack[++top] = x; break;
                case OpKind::Add: --top; stack[top] += stack[top + 1]; break;
                case OpKind::Sub: --top; stack[top] -= stack[top + 1]; break;
                case OpKind::Mul: --top; stack[top] *= stack[top + 1]; break;
                case OpKind::Div: --top; stack[top] /= stack[top + 1]; break;
                case OpKind::Pow: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
                case OpKind::Neg: stack[top] = -stack[top]; break;
                case OpKind::Cosh: stack[top] = std::cosh(stack[top]); break;
                case OpKind::Cos: stack[top] = std::cos(stack[top]); break;
                case OpKind::Sin: stack[top] = std::sin(stack[top]); break;
                case OpKind::Exp: stack[top] = std::exp(stack[top]); break;
                case OpKind::Abs: stack[top] = std::fabs(stack[top]); break;
                case OpKind::Sgn: stack[top] = static_cast<double>(sign_of(stack[top])); break;
            }
        }
        return stack[0];
    }

    const std::string& text() const { return text_; }
    bool empty() const { return code_.empty(); }

  private:
    enum class OpKind { Push, Var, Add, Sub, Mul, Div, Pow, Neg, Cosh, Cos, Sin, Exp, Abs, Sgn };
    struct Op {
        OpKind kind;
        double value = 0.0;
    };

    struct Parser {
        const std::string& s;
        std::size_t pos;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        char peek() {
            skip_ws();
            return pos < s.size() ? s[pos] : '\0';
        }

        void parse_expr(std::vector<Op>& code) {
            parse_term(code);
            while (true) {
                if (eat('+')) {
                    parse_term(code);
                    code.push_back({OpKind::Add});
                } else if (eat('-')) {
                    parse_term(code);
                    code.push_back({OpKind::Sub});
                } else {
                    break;
                }
            }
        }

        void parse_term(std::vector<Op>& code) {
            parse_unary(code);
            while (true) {
                if (eat('*')) {
                    parse_unary(code);
                    code.push_back({OpKind::Mul});
                } else if (eat('/')) {
                    parse_unary(code);
                    code.push_back({OpKind::Div});
                } else {
                    break;
                }
            }
        }

        // unary minus binds looser than '^': -x^2 = -(x^2)
        void parse_unary(std::vector<Op>& code) {
            int negs = 0;
            while (true) {
                if (eat('-')) ++negs;
                else if (eat('+')) continue;
                else break;
            }
            parse_factor(code);
            if (negs % 2 == 1) code.push_back({OpKind::Neg});
        }

        void parse_factor(std::vector<Op>& code) {
            parse_primary(code);
            if (eat('^')) {
                parse_unary(code);  // right associative; exponent may be signed
                code.push_back({OpKind::Pow});
            }
        }

        void parse_primary(std::vector<Op>& code) {
            skip_ws();
            if (pos >= s.size()) throw ParseError("unexpected end of expression \"" + s + "\"");
            char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                double v = std::stod(s.substr(pos), &used);
                pos += used;
                code.push_back({OpKind::Push, v});
                return;
            }
            if (c == '(') {
                ++pos;
                parse_expr(code);
                if (!eat(')')) throw ParseError("missing ')' in expression \"" + s + "\"");
                return;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t start = pos;
                while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
                std::string name = s.substr(start, pos - start);
                if (name == "x") {
                    code.push_back({OpKind::Var});
                    return;
                }
                if (name == "pi") {
                    code.push_back({OpKind::Push, pi});
                    return;
                }
                OpKind fn;
                if (name == "cosh") fn = OpKind::Cosh;
                else if (name == "cos") fn = OpKind::Cos;
                else if (name == "sin") fn = OpKind::Sin;
                else if (name == "exp") fn = OpKind::Exp;
                else if (name == "abs") fn = OpKind::Abs;
                else if (name == "sgn") fn = OpKind::Sgn;
                else throw ParseError("unknown identifier '" + name + "' in expression \"" + s + "\"");
                if (!eat('(')) throw ParseError("expected '(' after '" + name + "'");
                parse_expr(code);
                if (!eat(')')) throw ParseError("missing ')' after argument of '" + name + "'");
                code.push_back({fn});
                return;
            }
            throw ParseError(std::string("unexpected character '") + c + "' at position " +
                             std::to_string(pos) + " in expression \"" + s + "\"");
        }
    };

    std::vector<Op> code_;
    std::string text_;
};

}  // namespace indefsl
