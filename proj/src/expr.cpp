#include "momenta/expr.hpp"
#include "momenta/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace momenta {

namespace {

// Recursive-descent parser over a flat token-free scan (single-char lookahead
// on the raw text; numbers and names are consumed greedily).
class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    PolynomialField parse() {
        PolynomialField f = expression();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    PolynomialField expression() {
        PolynomialField f = eat('-') ? term() * -1.0 : (eat('+'), term());
        while (true) {
            if (eat('+'))
                f += term();
            else if (eat('-'))
                f += term() * -1.0;
            else
                return f;
        }
    }

    PolynomialField term() {
        PolynomialField f = power();
        while (eat('*')) f = f * power();
        return f;
    }

    PolynomialField power() {
        PolynomialField base = primary();
        if (!eat('^')) return base;
        skip_ws();
        const std::size_t at = pos_;
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw ParseError("expected a nonnegative integer exponent", at);
        int n = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            n = n * 10 + (s_[pos_++] - '0');
        PolynomialField out = PolynomialField::constant(1.0);
        for (int i = 0; i < n; ++i) out = out * base;
        return out;
    }

    PolynomialField primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            PolynomialField f = expression();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return name();
        fail(std::string("unexpected character '") + c + "'");
    }

    PolynomialField number() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        while (end < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                s_[end] == 'e' || s_[end] == 'E' ||
                ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                 (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
            ++end;
        try {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_, end - pos_), &used);
            pos_ += used;
            return PolynomialField::constant(v);
        } catch (const std::exception&) {
            throw ParseError("malformed number", at);
        }
    }

    PolynomialField name() {
        const std::size_t at = pos_;
        std::size_t end = pos_;
        while (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end]))) ++end;
        const std::string word = s_.substr(pos_, end - pos_);
        pos_ = end;
        if (word == "x") return PolynomialField::monomial(1.0, {1, 0, 0});
        if (word == "y") return PolynomialField::monomial(1.0, {0, 1, 0});
        if (word == "z") return PolynomialField::monomial(1.0, {0, 0, 1});
        if (word == "pi") return PolynomialField::constant(std::numbers::pi);
        if (word == "sqrt") {
            if (!eat('(')) fail("expected '(' after sqrt");
            PolynomialField arg = expression();
            if (!eat(')')) fail("expected ')'");
            if (arg.degree() != 0) throw ParseError("sqrt needs a constant argument", at);
            const double v = arg.is_zero() ? 0.0 : arg.terms().front().coeff;
            if (v < 0.0) throw ParseError("sqrt of a negative constant", at);
            return PolynomialField::constant(std::sqrt(v));
        }
        throw ParseError("unknown name '" + word + "'", at);
    }
};

} // namespace

PolynomialField parse_polynomial(const std::string& text) { return Parser(text).parse(); }

std::string polynomial_to_string(const PolynomialField& f) {
    if (f.is_zero()) return "0";
    std::ostringstream out;
    out.precision(17);
    bool first = true;
    for (const auto& t : f.terms()) {
        const double c = t.coeff;
        if (!first) out << (c < 0 ? " - " : " + ");
        else if (c < 0) out << "-";
        first = false;
        const double mag = std::abs(c);
        const bool has_vars = t.exponents.order() > 0;
        if (mag != 1.0 || !has_vars) out << mag;
        bool star = mag != 1.0 || !has_vars;
        auto var = [&](const char* v, int e) {
            if (e == 0) return;
            if (star) out << "*";
            star = true;
            out << v;
            if (e > 1) out << "^" << e;
        };
        var("x", t.exponents.a);
        var("y", t.exponents.b);
        var("z", t.exponents.c);
    }
    return out.str();
}

} // namespace momenta
