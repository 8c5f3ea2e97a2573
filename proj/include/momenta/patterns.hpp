#ifndef MOMENTA_PATTERNS_HPP
#define MOMENTA_PATTERNS_HPP

#include "momenta/contraction.hpp"

#include <compare>
#include <functional>
#include <string>
#include <vector>

namespace momenta {

/// A tensor appearing in a contraction pattern: a whole moment tensor of some
/// order, or an irreducible part (order, rank).
struct TensorSymbol {
    enum class Kind { moment, irreducible };
    Kind kind = Kind::moment;
    int order = 0;
    int rank = 0;

    static TensorSymbol moment(int order) { return {Kind::moment, order, order}; }
    static TensorSymbol irreducible(int order, int rank) {
        return {Kind::irreducible, order, rank};
    }

    friend auto operator<=>(const TensorSymbol&, const TensorSymbol&) = default;
    std::string name() const; // "3M" or "3_1H"
};

/// One zero-rank contraction: an ordered factor list plus a perfect pairing of
/// all index positions. The symbolic form of one invariant.
struct ContractionPattern {
    std::vector<TensorSymbol> factors;
    Pairing pairing;

    int total_rank() const;
    bool pure() const;        // one distinct symbol
    bool homogeneous() const; // one distinct source order

    /// The paper-style notation, e.g. "3_3H^2(1,2,3)(1,2,3)".
    std::string notation() const;

    std::string to_json() const;
    static ContractionPattern from_json(const std::string& text);
};

/// Pattern built from per-factor label groups: equal labels mark paired
/// positions, e.g. {{1,1,2},{2,3,3}}.
ContractionPattern pattern_from_groups(std::vector<TensorSymbol> factors,
                                       const std::vector<std::vector<int>>& groups);

/// Multigraph view: one node per factor, edge weight = contracted index pairs
/// between the two factors, diagonal = self-contraction (trace) pair count.
struct PatternGraph {
    std::vector<TensorSymbol> nodes;
    std::vector<std::vector<int>> adj; // symmetric; adj[i][i] = trace pairs at i

    bool connected() const;
};

PatternGraph graph_of(const ContractionPattern& p);

/// Canonical key equal exactly for isomorphic labeled multigraphs; computed by
/// minimizing the adjacency matrix over permutations of same-label nodes.
/// Throws TooManyNodes above 12 nodes.
std::string canonical_form(const PatternGraph& g);
std::string canonical_form(const ContractionPattern& p);

/// DOT text: node label = order, edge label = contracted-pair count,
/// self-loops omitted.
std::string to_dot(const ContractionPattern& p);

/// All zero-rank contraction classes over products drawn from `symbols`
/// (with repetition), at most `max_factors` factors and total rank at most
/// `max_total_rank`. Canonical order: ascending total rank, then factor count,
/// then factor multiset, then first-occurrence order of the class search.
/// Isomorphic duplicates removed.
std::vector<ContractionPattern> enumerate_patterns(const std::vector<TensorSymbol>& symbols,
                                                   int max_factors, int max_total_rank);

/// Streaming form over one factor multiset: calls `visit` for each distinct
/// class; stop early by returning false. `allow_loops` admits self
/// contractions; `connected_only` skips patterns that factor into disjoint
/// products.
void for_each_matching_class(const std::vector<TensorSymbol>& factors, bool allow_loops,
                             bool connected_only,
                             const std::function<bool(const ContractionPattern&)>& visit);

} // namespace momenta

#endif
