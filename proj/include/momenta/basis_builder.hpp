#ifndef MOMENTA_BASIS_BUILDER_HPP
#define MOMENTA_BASIS_BUILDER_HPP

#include "momenta/independence.hpp"
#include "momenta/irreducible.hpp"
#include "momenta/moments.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace momenta {

enum class SetMode { specific, minimal };

std::string to_string(SetMode m);
SetMode mode_from_string(const std::string& s);

struct InvariantSetMember {
    ContractionPattern pattern;
    /// The two symbols a mixed member couples; empty for pure members.
    std::optional<std::pair<TensorSymbol, TensorSymbol>> anchor;
};

struct InvariantSet {
    SetMode mode = SetMode::specific;
    Flavor flavor = Flavor::volumetric;
    int lmax = 0;
    std::optional<TensorSymbol> robust;
    std::uint64_t seed = 1;
    std::vector<InvariantSetMember> members;

    std::string to_json() const;
    static InvariantSet from_json(const std::string& text);
};

/// The irreducible symbols in scope: every decomposition part per order for
/// volumetric inputs, only the full-order parts for spherical ones.
std::vector<TensorSymbol> irreducible_symbols(int lmax, Flavor flavor);

/// Langbein-selected pure invariants of one symbol: the scalar itself for
/// rank 0, the squared norm for rank 1, 2p-2 patterns for higher ranks.
std::vector<ContractionPattern> pure_invariants(const TensorSymbol& s,
                                                const SelectionConfig& cfg = {});

/// Mixed invariants coupling two distinct symbols, with both pure sets
/// prefilled: 3 patterns when both ranks exceed 1, 2 when exactly one rank is
/// 1, 1 when both are 1, none when either rank is 0.
std::vector<ContractionPattern> mixed_invariants(const TensorSymbol& a, const TensorSymbol& b,
                                                 const SelectionConfig& cfg = {});

/// All pure invariants plus mixed invariants anchoring `robust` to every other
/// symbol of rank >= 1. Without an explicit robust symbol, auto-selects from
/// the reference decompositions: the lowest-rank part of rank >= 2 whose norm
/// exceeds the mean part norm (NoRobustCandidate if all such parts vanish).
InvariantSet specific_flexible_basis(int lmax, Flavor flavor,
                                     std::optional<TensorSymbol> robust,
                                     const std::vector<Decomposition>* reference = nullptr,
                                     const SelectionConfig& cfg = {});

/// All pure invariants plus mixed invariants for every unordered pair of
/// symbols of rank >= 1; dependent but complete under any degeneracy.
InvariantSet minimal_flexible_set(int lmax, Flavor flavor, const SelectionConfig& cfg = {});

/// Descriptor vector: decomposes the moments and evaluates every member.
/// Reduced-order parts are dropped for spherical moments.
std::vector<double> evaluate_set(const InvariantSet& set, const MomentSet& m);

/// Decompositions of all orders of a moment set.
std::vector<Decomposition> decompose_all(const MomentSet& m);

/// A part counts as vanishing when its norm is at most 1e-10 * max(1, |M|).
bool part_vanishes(const IrreducibleTensor& part, double moment_set_norm);

struct CountRow {
    int pure = 0;
    int mixed = 0;
    int total = 0;
};

/// Set sizes implied by the construction (pure counts per rank plus 3/2/1
/// mixed per pair). These match the paper's per-order and cumulative basis
/// tables; see published_sequence for the printed minimal-set sequences.
CountRow expected_counts(int lmax, Flavor flavor, SetMode mode);

/// Cumulative totals as printed in the paper for lm = 0.., including the
/// cells its own worked examples contradict. Kept verbatim as the reference
/// record.
std::vector<int> published_sequence(Flavor flavor, SetMode mode);

/// Generated-set caching keyed by (lmax, flavor, mode, robust, seed). The
/// directory comes from MOMENTA_CACHE when unset; caching is skipped when
/// neither is available.
InvariantSet generate_cached(int lmax, Flavor flavor, SetMode mode,
                             std::optional<TensorSymbol> robust, const SelectionConfig& cfg,
                             const std::string& cache_dir = "");

} // namespace momenta

#endif
