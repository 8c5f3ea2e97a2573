#ifndef MOMENTA_CONTRACTION_HPP
#define MOMENTA_CONTRACTION_HPP

#include "momenta/sym_tensor.hpp"

#include <utility>
#include <vector>

namespace momenta {

/// Perfect pairing of the flattened index positions 1..N of a factor product.
struct Pairing {
    std::vector<std::pair<int, int>> pairs; // 1-based positions

    /// Throws PairingNotPerfect unless every position in 1..total appears
    /// exactly once.
    void validate(int total) const;
};

inline constexpr int kDefaultRankCap = 12;

/// Scalar value of the fully contracted product. Factors are absorbed
/// left-to-right; a pair is summed out as soon as both its positions have been
/// seen. Intermediates are stored compactly per symmetric index group, but the
/// total open rank must stay within `cap` (IntermediateRankExceeded otherwise).
double contract_full(const std::vector<SymTensor3>& factors, const Pairing& pairing,
                     int cap = kDefaultRankCap);

/// Derivative of contract_full with respect to the compact coefficients of one
/// tensor symbol, i.e. the sum over the given occurrences of the value with
/// that occurrence's slot opened up. Entry order matches multi_indices(rank).
std::vector<double> contract_gradient(const std::vector<SymTensor3>& factors,
                                      const Pairing& pairing,
                                      const std::vector<int>& occurrences,
                                      int cap = kDefaultRankCap);

/// Single-coefficient view of contract_gradient. `occurrences` lists the
/// factor slots holding the symbol being differentiated.
double d_contract(const std::vector<SymTensor3>& factors, const Pairing& pairing,
                  const std::vector<int>& occurrences, const MultiIndex& wrt,
                  int cap = kDefaultRankCap);

} // namespace momenta

#endif
