#include "momenta/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace momenta {

namespace {
bool exp_less(const MultiIndex& x, const MultiIndex& y) {
    if (x.a != y.a) return x.a > y.a;
    if (x.b != y.b) return x.b > y.b;
    return x.c > y.c;
}
} // namespace

PolynomialField::PolynomialField(std::vector<Term> terms) : terms_(std::move(terms)) {
    canonicalize();
}

void PolynomialField::canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& s, const Term& t) { return exp_less(s.exponents, t.exponents); });
    std::vector<Term> merged;
    for (const Term& t : terms_) {
        if (!merged.empty() && merged.back().exponents == t.exponents)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
    terms_ = std::move(merged);
}

PolynomialField PolynomialField::constant(double c) {
    return monomial(c, {0, 0, 0});
}

PolynomialField PolynomialField::monomial(double c, const MultiIndex& e) {
    std::vector<Term> ts = {Term{c, e}};
    return PolynomialField(std::move(ts));
}

int PolynomialField::degree() const {
    int d = 0;
    for (const Term& t : terms_) d = std::max(d, t.exponents.order());
    return d;
}

double PolynomialField::evaluate(double x, double y, double z) const {
    double v = 0.0;
    for (const Term& t : terms_)
        v += t.coeff * std::pow(x, t.exponents.a) * std::pow(y, t.exponents.b) *
             std::pow(z, t.exponents.c);
    return v;
}

PolynomialField& PolynomialField::operator+=(const PolynomialField& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    canonicalize();
    return *this;
}

PolynomialField& PolynomialField::operator*=(double s) {
    for (Term& t : terms_) t.coeff *= s;
    canonicalize();
    return *this;
}

PolynomialField PolynomialField::operator*(const PolynomialField& other) const {
    std::vector<Term> out;
    out.reserve(terms_.size() * other.terms_.size());
    for (const Term& s : terms_)
        for (const Term& t : other.terms_)
            out.push_back({s.coeff * t.coeff,
                           {s.exponents.a + t.exponents.a, s.exponents.b + t.exponents.b,
                            s.exponents.c + t.exponents.c}});
    return PolynomialField(std::move(out));
}

PolynomialField PolynomialField::substitute_linear(const Rotation3& b) const {
    // Images of the three variables.
    PolynomialField vars[3];
    for (int k = 0; k < 3; ++k) {
        std::vector<Term> ts;
        for (int j = 0; j < 3; ++j) {
            MultiIndex e;
            (j == 0 ? e.a : j == 1 ? e.b : e.c) = 1;
            if (b.m[k][j] != 0.0) ts.push_back({b.m[k][j], e});
        }
        vars[k] = PolynomialField(std::move(ts));
    }
    PolynomialField out;
    for (const Term& t : terms_) {
        PolynomialField term = PolynomialField::constant(t.coeff);
        for (int i = 0; i < t.exponents.a; ++i) term = term * vars[0];
        for (int i = 0; i < t.exponents.b; ++i) term = term * vars[1];
        for (int i = 0; i < t.exponents.c; ++i) term = term * vars[2];
        out += term;
    }
    return out;
}

PolynomialField fixture_f1() {
    const double s2 = std::sqrt(2.0);
    return PolynomialField({{3.0, {1, 2, 0}},
                            {-3.0, {1, 0, 2}},
                            {-3.0 * s2, {0, 2, 1}},
                            {s2, {0, 0, 3}}});
}

PolynomialField fixture_f2() {
    return PolynomialField({{3.0, {1, 2, 0}},
                            {-3.0, {1, 0, 2}},
                            {1.0, {0, 3, 0}},
                            {-3.0, {0, 2, 1}},
                            {-3.0, {0, 1, 2}},
                            {1.0, {0, 0, 3}}});
}

} // namespace momenta
