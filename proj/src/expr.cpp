#include "spexact/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace spexact {

namespace {

using Fn = std::function<Complex(double)>;

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ConfigError("expression parse error at position " + std::to_string(pos) + ": " + msg);
    }

    Fn parse() {
        Fn e = expr();
        skip_ws();
        if (pos != s.size()) fail("trailing input '" + s.substr(pos) + "'");
        return e;
    }

    Fn expr() {
        Fn lhs = term();
        for (;;) {
            if (eat('+')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double x) { return lhs(x) + rhs(x); };
            } else if (eat('-')) {
                Fn rhs = term();
                lhs = [lhs, rhs](double x) { return lhs(x) - rhs(x); };
            } else {
                return lhs;
            }
        }
    }

    Fn term() {
        Fn lhs = power();
        for (;;) {
            if (eat('*')) {
                Fn rhs = power();
                lhs = [lhs, rhs](double x) { return lhs(x) * rhs(x); };
            } else if (eat('/')) {
                Fn rhs = power();
                lhs = [lhs, rhs](double x) { return lhs(x) / rhs(x); };
            } else {
                return lhs;
            }
        }
    }

    Fn power() {
        Fn base = unary();
        if (!eat('^')) return base;
        Fn ex = power();  // right associative
        return [base, ex](double x) -> Complex {
            Complex b = base(x), e = ex(x);
            if (e.imag() != 0.0) throw ConfigError("complex exponent not supported");
            double p = e.real();
            double pr = std::round(p);
            if (pr == p && std::abs(p) <= 64) {
                // integer powers by repeated multiplication; valid for any complex base
                Complex r = 1.0;
                Complex f = (p < 0) ? Complex(1.0) / b : b;
                for (int k = 0; k < static_cast<int>(std::abs(p)); ++k) r *= f;
                return r;
            }
            return std::pow(b, p);
        };
    }

    Fn unary() {
        if (eat('-')) {
            Fn v = unary();
            return [v](double x) { return -v(x); };
        }
        if (eat('+')) return unary();
        return primary();
    }

    Fn primary() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            Fn e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    Fn number() {
        size_t start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
            ++pos;
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            size_t save = pos++;
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
            if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            } else {
                pos = save;  // not an exponent; leave 'e' for the caller (it is an error anyway)
            }
        }
        double v = std::strtod(s.c_str() + start, nullptr);
        if (pos < s.size() && (s[pos] == 'i' || s[pos] == 'I')) {
            ++pos;
            return [v](double) { return Complex(0.0, v); };
        }
        return [v](double) { return Complex(v, 0.0); };
    }

    Fn ident() {
        size_t start = pos;
        while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
        std::string name = s.substr(start, pos - start);
        if (name == "i" || name == "I") return [](double) { return Complex(0.0, 1.0); };
        if (name == "x" || name == "r") return [](double x) { return Complex(x, 0.0); };
        if (!eat('(')) fail("unknown symbol '" + name + "'");
        Fn arg = expr();
        if (!eat(')')) fail("expected ')' after " + name + "(...)");
        if (name == "abs") return [arg](double x) { return Complex(std::abs(arg(x)), 0.0); };
        if (name == "sgn")
            return [arg](double x) {
                double v = arg(x).real();
                return Complex(v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0), 0.0);
            };
        if (name == "sin") return [arg](double x) { return std::sin(arg(x)); };
        if (name == "cos") return [arg](double x) { return std::cos(arg(x)); };
        if (name == "exp") return [arg](double x) { return std::exp(arg(x)); };
        if (name == "sqrt") return [arg](double x) { return std::sqrt(arg(x)); };
        fail("unknown function '" + name + "'");
    }
};

}  // namespace

std::function<Complex(double)> parse_expression(const std::string& text) {
    Parser p(text);
    return p.parse();
}

}  // namespace spexact
