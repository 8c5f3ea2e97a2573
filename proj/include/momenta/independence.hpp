#ifndef MOMENTA_INDEPENDENCE_HPP
#define MOMENTA_INDEPENDENCE_HPP

#include "momenta/patterns.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace momenta {

/// Concrete tensors standing in for the symbols during rank testing.
using SymbolAssignment = std::map<TensorSymbol, SymTensor3>;

struct SelectionConfig {
    std::uint64_t seed = 1;
    double tol = 1e-8;                       // relative residual threshold
    int max_candidates = 2'000'000;          // scan guard per selection
    int cap = 16;                            // contraction cap during selection
    std::optional<std::uint64_t> verify_seed; // optional reproduction pass
};

/// Random moment populations for Langbein's algorithm: uniform [-1,1]
/// coefficients; irreducible symbols get random symmetric tensors detraced.
/// Deterministic given the seed.
SymbolAssignment assign_random(const std::vector<TensorSymbol>& symbols,
                               const SelectionConfig& cfg);

double evaluate_pattern(const ContractionPattern& p, const SymbolAssignment& at,
                        int cap = kDefaultRankCap);

/// Incrementally orthonormalized store of invariant gradient rows over the
/// coordinate space of the in-scope symbols: compact coefficients for moment
/// symbols, the 2p+1 traceless-basis coordinates for irreducible ones.
class JacobianBasis {
public:
    JacobianBasis(std::vector<TensorSymbol> symbols, const SymbolAssignment& at, double tol,
                  int cap);

    /// Gram-Schmidt against the stored rows (one re-orthogonalization pass).
    /// Accepts iff the residual norm exceeds tol * max(1, |row|); the
    /// normalized residual is then appended. Returns {accepted, residual}.
    std::pair<bool, double> try_accept(const ContractionPattern& p);

    int dim() const { return static_cast<int>(rows_.size()); }
    int coords() const { return total_coords_; }
    const std::vector<TensorSymbol>& symbols() const { return symbols_; }

    std::vector<double> gradient_row(const ContractionPattern& p) const;

private:
    std::vector<TensorSymbol> symbols_;
    std::map<TensorSymbol, int> offset_;
    int total_coords_ = 0;
    const SymbolAssignment& at_;
    double tol_;
    int cap_;
    std::vector<std::vector<double>> rows_;
};

struct SelectionResult {
    std::vector<ContractionPattern> accepted;
    int scanned = 0;
    int skipped_unevaluable = 0; // candidates beyond the contraction cap
};

/// Optional per-candidate trace: pattern, residual, accepted.
using SelectionTrace =
    std::function<void(const ContractionPattern&, double residual, bool accepted)>;

/// Langbein's greedy scan over an explicit candidate list. Prefill rows are
/// inserted first. Stops at `target` accepted invariants if given, else
/// exhausts the candidates. Throws TargetNotReached if a target is given and
/// the candidates run out. With cfg.verify_seed set, the scan is repeated at
/// that seed and must reproduce the accepted count.
SelectionResult select(const std::vector<TensorSymbol>& symbols,
                       const std::vector<ContractionPattern>& candidates,
                       std::optional<int> target, const SelectionConfig& cfg,
                       const std::vector<ContractionPattern>& prefill = {},
                       const SymbolAssignment* fixed_point = nullptr,
                       const SelectionTrace& trace = nullptr);

/// Jacobian rank of a set of patterns at a specific assignment.
int jacobian_rank(const std::vector<TensorSymbol>& symbols,
                  const std::vector<ContractionPattern>& patterns, const SymbolAssignment& at,
                  double tol = 1e-8, int cap = 16);

} // namespace momenta

#endif
