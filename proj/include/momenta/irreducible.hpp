#ifndef MOMENTA_IRREDUCIBLE_HPP
#define MOMENTA_IRREDUCIBLE_HPP

#include "momenta/sym_tensor.hpp"

#include <string>
#include <vector>

namespace momenta {

/// Traceless symmetric tensor of rank `rank` from the decomposition of a
/// symmetric tensor of order `source_order`.
struct IrreducibleTensor {
    int source_order = 0;
    int rank = 0;
    SymTensor3 data;
};

struct Decomposition {
    int order = 0;
    /// Parts for p = order, order-2, ..., down to 0 or 1.
    std::vector<IrreducibleTensor> parts;

    const IrreducibleTensor& part(int rank) const;
};

/// Unique decomposition of a symmetric tensor into embedded traceless parts:
/// M = sum_k sym(H_{l-2k} (x) delta^k).
Decomposition decompose(const SymTensor3& m);

/// Symmetrized product of a traceless tensor with (l-rank)/2 deltas.
/// Throws ParityMismatch unless l >= rank and l == rank (mod 2).
SymTensor3 embed(const IrreducibleTensor& h, int target_order);
SymTensor3 embed(const SymTensor3& h, int target_order);

/// Top-rank part of the decomposition.
IrreducibleTensor detrace(const SymTensor3& t);

/// A fixed basis of the traceless symmetric rank-p space (2p+1 tensors),
/// cached per rank. Used to parametrize irreducible symbols by independent
/// coordinates.
const std::vector<SymTensor3>& traceless_basis(int rank);

/// JSON for a decomposition, keys "(l,p)".
std::string decomposition_to_json(const Decomposition& d);
Decomposition decomposition_from_json(const std::string& text);

} // namespace momenta

#endif
