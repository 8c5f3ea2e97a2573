#ifndef MOMENTA_EXPR_HPP
#define MOMENTA_EXPR_HPP

#include "momenta/polynomial.hpp"

#include <string>

namespace momenta {

/// Parses the polynomial mini-language: variables x, y, z; +, -, *; integer
/// powers via ^; pi and sqrt(...) constants; parentheses. Multiplication is
/// always explicit. Throws ParseError with the offending position.
PolynomialField parse_polynomial(const std::string& text);

/// Canonical rendering; parse_polynomial(polynomial_to_string(f)) == f.
std::string polynomial_to_string(const PolynomialField& f);

} // namespace momenta

#endif
