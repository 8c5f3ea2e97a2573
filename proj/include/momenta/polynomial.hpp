#ifndef MOMENTA_POLYNOMIAL_HPP
#define MOMENTA_POLYNOMIAL_HPP

#include "momenta/sym_tensor.hpp"

#include <vector>

namespace momenta {

/// Polynomial scalar field over R^3 as a sum of monomial terms.
/// Canonical form: duplicate exponent triples merged, zero terms removed,
/// terms sorted by exponents.
class PolynomialField {
public:
    struct Term {
        double coeff;
        MultiIndex exponents;
    };

    PolynomialField() = default;
    explicit PolynomialField(std::vector<Term> terms);

    static PolynomialField constant(double c);
    static PolynomialField monomial(double c, const MultiIndex& e);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;

    double evaluate(double x, double y, double z) const;

    PolynomialField& operator+=(const PolynomialField& other);
    PolynomialField& operator*=(double s);
    friend PolynomialField operator+(PolynomialField a, const PolynomialField& b) { return a += b; }
    friend PolynomialField operator*(PolynomialField a, double s) { return a *= s; }
    friend PolynomialField operator*(double s, PolynomialField a) { return a *= s; }
    PolynomialField operator*(const PolynomialField& other) const;

    /// f(Bx): substitute x_k -> sum_j B[k][j] x_j and expand.
    PolynomialField substitute_linear(const Rotation3& b) const;

    /// f composed with the inverse rotation, i.e. the actively rotated field.
    PolynomialField rotated(const Rotation3& a) const { return substitute_linear(a.transposed()); }

private:
    void canonicalize();
    std::vector<Term> terms_;
};

/// The paper's pair of cubic fixtures.
PolynomialField fixture_f1();
PolynomialField fixture_f2();

} // namespace momenta

#endif
