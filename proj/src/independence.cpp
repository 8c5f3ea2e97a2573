#include "momenta/independence.hpp"
#include "momenta/errors.hpp"
#include "momenta/irreducible.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace momenta {

namespace {

double uniform(std::mt19937_64& rng) {
    return -1.0 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

} // namespace

SymbolAssignment assign_random(const std::vector<TensorSymbol>& symbols,
                               const SelectionConfig& cfg) {
    std::vector<TensorSymbol> sorted = symbols;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::mt19937_64 rng(cfg.seed);
    SymbolAssignment at;
    for (const auto& s : sorted) {
        SymTensor3 t(s.rank);
        for (int i = 0; i < t.size(); ++i) t[i] = uniform(rng);
        if (s.kind == TensorSymbol::Kind::irreducible && s.rank >= 2) t = detrace(t).data;
        at.emplace(s, std::move(t));
    }
    return at;
}

double evaluate_pattern(const ContractionPattern& p, const SymbolAssignment& at, int cap) {
    std::vector<SymTensor3> factors;
    factors.reserve(p.factors.size());
    for (const auto& s : p.factors) {
        auto it = at.find(s);
        if (it == at.end()) throw UnknownSymbol("no assignment for symbol " + s.name());
        factors.push_back(it->second);
    }
    return contract_full(factors, p.pairing, cap);
}

JacobianBasis::JacobianBasis(std::vector<TensorSymbol> symbols, const SymbolAssignment& at,
                             double tol, int cap)
    : symbols_(std::move(symbols)), at_(at), tol_(tol), cap_(cap) {
    std::sort(symbols_.begin(), symbols_.end());
    symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
    for (const auto& s : symbols_) {
        offset_[s] = total_coords_;
        total_coords_ +=
            s.kind == TensorSymbol::Kind::irreducible ? 2 * s.rank + 1 : sym_dim(s.rank);
    }
}

std::vector<double> JacobianBasis::gradient_row(const ContractionPattern& p) const {
    std::vector<SymTensor3> factors;
    factors.reserve(p.factors.size());
    for (const auto& s : p.factors) factors.push_back(at_.at(s));

    std::vector<double> row(total_coords_, 0.0);
    std::set<TensorSymbol> distinct(p.factors.begin(), p.factors.end());
    for (const auto& s : distinct) {
        auto off = offset_.find(s);
        if (off == offset_.end())
            throw UnknownSymbol("pattern symbol " + s.name() + " not in scope");
        std::vector<int> occurrences;
        for (std::size_t i = 0; i < p.factors.size(); ++i)
            if (p.factors[i] == s) occurrences.push_back(static_cast<int>(i));
        const std::vector<double> g = contract_gradient(factors, p.pairing, occurrences, cap_);
        if (s.kind == TensorSymbol::Kind::moment) {
            for (std::size_t i = 0; i < g.size(); ++i) row[off->second + i] = g[i];
        } else {
            const auto& basis = traceless_basis(s.rank);
            for (std::size_t k = 0; k < basis.size(); ++k) {
                double d = 0.0;
                for (int i = 0; i < basis[k].size(); ++i) d += g[i] * basis[k][i];
                row[off->second + static_cast<int>(k)] = d;
            }
        }
    }
    return row;
}

std::pair<bool, double> JacobianBasis::try_accept(const ContractionPattern& p) {
    std::vector<double> row = gradient_row(p);
    double norm0 = 0.0;
    for (double v : row) norm0 += v * v;
    norm0 = std::sqrt(norm0);

    auto orthogonalize = [&]() {
        for (const auto& q : rows_) {
            double dot = 0.0;
            for (std::size_t i = 0; i < row.size(); ++i) dot += q[i] * row[i];
            for (std::size_t i = 0; i < row.size(); ++i) row[i] -= dot * q[i];
        }
    };
    orthogonalize();
    orthogonalize(); // one re-orthogonalization pass

    double res = 0.0;
    for (double v : row) res += v * v;
    res = std::sqrt(res);

    if (res <= tol_ * std::max(1.0, norm0)) return {false, res};
    for (double& v : row) v /= res;
    rows_.push_back(std::move(row));
    return {true, res};
}

namespace {

SelectionResult run_selection(const std::vector<TensorSymbol>& symbols,
                              const std::vector<ContractionPattern>& candidates,
                              std::optional<int> target, const SelectionConfig& cfg,
                              const std::vector<ContractionPattern>& prefill,
                              const SymbolAssignment& at, const SelectionTrace& trace) {
    JacobianBasis basis(symbols, at, cfg.tol, cfg.cap);
    for (const auto& p : prefill) basis.try_accept(p);

    SelectionResult out;
    for (const auto& p : candidates) {
        if (target && static_cast<int>(out.accepted.size()) >= *target) return out;
        if (out.scanned >= cfg.max_candidates) break;
        out.scanned++;
        try {
            const auto [ok, res] = basis.try_accept(p);
            if (trace) trace(p, res, ok);
            if (ok) out.accepted.push_back(p);
        } catch (const IntermediateRankExceeded&) {
            out.skipped_unevaluable++;
        }
    }
    if (target && static_cast<int>(out.accepted.size()) < *target)
        throw TargetNotReached("selected " + std::to_string(out.accepted.size()) + " of " +
                               std::to_string(*target) + " after " +
                               std::to_string(out.scanned) + " candidates");
    return out;
}

} // namespace

SelectionResult select(const std::vector<TensorSymbol>& symbols,
                       const std::vector<ContractionPattern>& candidates,
                       std::optional<int> target, const SelectionConfig& cfg,
                       const std::vector<ContractionPattern>& prefill,
                       const SymbolAssignment* fixed_point, const SelectionTrace& trace) {
    const SymbolAssignment at = fixed_point ? *fixed_point : assign_random(symbols, cfg);
    SelectionResult out = run_selection(symbols, candidates, target, cfg, prefill, at, trace);
    if (cfg.verify_seed && !fixed_point) {
        SelectionConfig vcfg = cfg;
        vcfg.seed = *cfg.verify_seed;
        const SymbolAssignment vat = assign_random(symbols, vcfg);
        const SelectionResult check =
            run_selection(symbols, candidates, target, vcfg, prefill, vat, nullptr);
        if (check.accepted.size() != out.accepted.size())
            throw TargetNotReached("verification seed selected " +
                                   std::to_string(check.accepted.size()) + " instead of " +
                                   std::to_string(out.accepted.size()));
    }
    return out;
}

int jacobian_rank(const std::vector<TensorSymbol>& symbols,
                  const std::vector<ContractionPattern>& patterns, const SymbolAssignment& at,
                  double tol, int cap) {
    JacobianBasis basis(symbols, at, tol, cap);
    for (const auto& p : patterns) basis.try_accept(p);
    return basis.dim();
}

} // namespace momenta
