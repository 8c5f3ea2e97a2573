#include "momenta/contraction.hpp"
#include "momenta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace momenta {

void Pairing::validate(int total) const {
    if (total % 2 != 0)
        throw PairingNotPerfect("odd number of index positions (" + std::to_string(total) + ")");
    std::vector<int> seen(total + 1, 0);
    for (const auto& [p, q] : pairs) {
        if (p < 1 || p > total || q < 1 || q > total || p == q)
            throw PairingNotPerfect("pair (" + std::to_string(p) + "," + std::to_string(q) +
                                    ") out of range 1.." + std::to_string(total));
        seen[p]++;
        seen[q]++;
    }
    for (int i = 1; i <= total; ++i)
        if (seen[i] != 1)
            throw PairingNotPerfect("position " + std::to_string(i) + " appears " +
                                    std::to_string(seen[i]) + " times");
}

namespace {

double arrangements(const MultiIndex& mi) { return multinomial(mi); }

MultiIndex add(const MultiIndex& a, const MultiIndex& b) {
    return {a.a + b.a, a.b + b.b, a.c + b.c};
}

MultiIndex add2(const MultiIndex& a, const MultiIndex& b) {
    return {a.a + 2 * b.a, a.b + 2 * b.b, a.c + 2 * b.c};
}

/// Partially contracted product. Each live group holds the still-open indices
/// of one absorbed factor; values are stored per multiset within each group.
struct Grouped {
    std::vector<int> open;                  // open index count per group
    std::vector<int> group_of_factor;       // factor slot -> group id (-1 if none)
    std::vector<double> data{1.0};          // mixed-radix over groups, group 0 fastest

    int total_open() const { return std::accumulate(open.begin(), open.end(), 0); }
};

/// Internal-trace fold: Ftr[m] = sum over trace multisets w of size v of
/// (v!/w!) F[m + 2w], with m running over multisets of size rank-2v.
std::vector<double> fold_traces(const SymTensor3& f, int v) {
    if (v == 0) return f.coeffs();
    const int m_sz = f.order() - 2 * v;
    const auto& ms = multi_indices(m_sz);
    const auto& ws = multi_indices(v);
    std::vector<double> out(ms.size(), 0.0);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        double s = 0.0;
        for (const MultiIndex& w : ws) s += arrangements(w) * f.at(add2(ms[i], w));
        out[i] = s;
    }
    return out;
}

struct Absorber {
    const std::vector<SymTensor3>& factors;
    std::vector<int> partner;      // position (1-based) -> paired position
    std::vector<int> factor_of;    // position (1-based) -> factor slot
    std::vector<int> start;        // factor slot -> first position (1-based)
    int cap;

    Absorber(const std::vector<SymTensor3>& fs, const Pairing& pairing, int cap_)
        : factors(fs), cap(cap_) {
        int total = 0;
        start.resize(fs.size());
        for (std::size_t i = 0; i < fs.size(); ++i) {
            start[i] = total + 1;
            total += fs[i].order();
        }
        pairing.validate(total);
        partner.assign(total + 1, 0);
        factor_of.assign(total + 1, -1);
        for (const auto& [p, q] : pairing.pairs) {
            partner[p] = q;
            partner[q] = p;
        }
        for (std::size_t i = 0; i < fs.size(); ++i)
            for (int p = start[i]; p < start[i] + fs[i].order(); ++p)
                factor_of[p] = static_cast<int>(i);
    }

    // Absorbs factor `fi` into `st`. `absorbed` marks factors already merged;
    // the hole factor (if any) is never marked, so its partners stay open.
    void absorb(Grouped& st, int fi, const std::vector<bool>& absorbed) const {
        const SymTensor3& f = factors[fi];
        const int rank = f.order();
        const int ngroups = static_cast<int>(st.open.size());

        int v = 0, u = 0;
        std::vector<int> t(ngroups, 0);
        for (int p = start[fi]; p < start[fi] + rank; ++p) {
            const int q = partner[p];
            if (factor_of[q] == fi) {
                if (q > p) ++v;
            } else if (absorbed[factor_of[q]]) {
                t[st.group_of_factor[factor_of[q]]]++;
            } else {
                ++u;
            }
        }

        std::vector<int> new_open(ngroups);
        int total_open = u;
        for (int g = 0; g < ngroups; ++g) {
            new_open[g] = st.open[g] - t[g];
            total_open += new_open[g];
        }
        if (total_open > cap)
            throw IntermediateRankExceeded("open rank " + std::to_string(total_open) +
                                           " exceeds cap " + std::to_string(cap));

        const std::vector<double> ftr = fold_traces(f, v);

        // Old strides.
        std::vector<std::size_t> old_stride(ngroups);
        {
            std::size_t s = 1;
            for (int g = 0; g < ngroups; ++g) {
                old_stride[g] = s;
                s *= sym_dim(st.open[g]);
            }
        }

        // New layout: surviving old groups keep their order, f's group appended.
        std::size_t new_size = 1;
        for (int g = 0; g < ngroups; ++g) new_size *= sym_dim(new_open[g]);
        new_size *= sym_dim(u);
        std::vector<double> out(new_size, 0.0);

        {
            std::size_t entries = sym_dim(u);
            for (int g = 0; g < ngroups; ++g) entries *= sym_dim(new_open[g]);
            if (entries > (std::size_t{1} << 22))
                throw IntermediateRankExceeded("intermediate needs " + std::to_string(entries) +
                                               " entries");
        }

        // New layout strides: surviving groups keep their order, f's group last.
        std::vector<std::size_t> new_stride(ngroups);
        std::size_t ef_stride = 1;
        {
            std::size_t s = 1;
            for (int g = 0; g < ngroups; ++g) {
                new_stride[g] = s;
                s *= sym_dim(new_open[g]);
            }
            ef_stride = s;
        }

        // Odometer over the new entries: per-group kept multisets plus e_f.
        std::vector<int> kept_idx(ngroups, 0);
        const auto& efs = multi_indices(u);

        bool done = false;
        while (!done) {
            std::size_t kept_pos = 0;
            for (int g = 0; g < ngroups; ++g)
                kept_pos += new_stride[g] * static_cast<std::size_t>(kept_idx[g]);
            // Current kept multisets.
            for (std::size_t ef_i = 0; ef_i < efs.size(); ++ef_i) {
                const std::size_t pos = kept_pos + ef_stride * ef_i;
                // Sum over split multisets e_g of size t[g] per group.
                double acc = 0.0;
                std::vector<int> e_idx(ngroups, 0);
                bool more = true;
                while (more) {
                    double weight = 1.0;
                    std::size_t old_pos = 0;
                    MultiIndex fm = efs[ef_i];
                    for (int g = 0; g < ngroups; ++g) {
                        const MultiIndex& kept = multi_indices(new_open[g])[kept_idx[g]];
                        const MultiIndex& e = multi_indices(t[g])[e_idx[g]];
                        weight *= arrangements(e);
                        old_pos += old_stride[g] *
                                   static_cast<std::size_t>(multi_index_pos(add(kept, e)));
                        fm = add(fm, e);
                    }
                    acc += weight * st.data[old_pos] * ftr[multi_index_pos(fm)];
                    // Advance the split odometer.
                    more = false;
                    for (int g = 0; g < ngroups; ++g) {
                        if (t[g] == 0) continue;
                        if (++e_idx[g] < sym_dim(t[g])) {
                            more = true;
                            break;
                        }
                        e_idx[g] = 0;
                    }
                }
                out[pos] = acc;
            }
            // Advance the kept odometer.
            done = true;
            for (int g = 0; g < ngroups; ++g) {
                if (new_open[g] == 0) continue;
                if (++kept_idx[g] < sym_dim(new_open[g])) {
                    done = false;
                    break;
                }
                kept_idx[g] = 0;
            }
        }

        // Commit: drop empty groups, append f's group.
        Grouped next;
        next.group_of_factor = st.group_of_factor;
        next.data = std::move(out);
        // The layout above keeps empty groups as dimension-1 axes, so the flat
        // data is already correct; just rebuild the group list.
        next.open.reserve(ngroups + 1);
        std::vector<int> remap(ngroups, -1);
        for (int g = 0; g < ngroups; ++g) {
            if (new_open[g] > 0) {
                remap[g] = static_cast<int>(next.open.size());
                next.open.push_back(new_open[g]);
            }
        }
        int f_group = -1;
        if (u > 0) {
            f_group = static_cast<int>(next.open.size());
            next.open.push_back(u);
        }
        for (int& g : next.group_of_factor)
            g = (g >= 0) ? remap[g] : -1;
        next.group_of_factor.resize(factors.size(), -1);
        next.group_of_factor[fi] = f_group;
        st = std::move(next);
    }
};

} // namespace

double contract_full(const std::vector<SymTensor3>& factors, const Pairing& pairing, int cap) {
    Absorber ab(factors, pairing, cap);
    Grouped st;
    st.group_of_factor.assign(factors.size(), -1);
    std::vector<bool> absorbed(factors.size(), false);
    for (std::size_t i = 0; i < factors.size(); ++i) {
        ab.absorb(st, static_cast<int>(i), absorbed);
        absorbed[i] = true;
    }
    return st.data[0];
}

std::vector<double> contract_gradient(const std::vector<SymTensor3>& factors,
                                      const Pairing& pairing,
                                      const std::vector<int>& occurrences, int cap) {
    if (occurrences.empty())
        throw UnknownSymbol("no factor occurrences given for the derivative");
    for (int o : occurrences)
        if (o < 0 || o >= static_cast<int>(factors.size()))
            throw UnknownSymbol("occurrence " + std::to_string(o) + " out of range");

    const int rank = factors[occurrences.front()].order();
    std::vector<double> grad(sym_dim(rank), 0.0);

    for (int hole : occurrences) {
        if (factors[hole].order() != rank)
            throw UnknownSymbol("occurrences differ in rank");
        Absorber ab(factors, pairing, cap);
        Grouped st;
        st.group_of_factor.assign(factors.size(), -1);
        std::vector<bool> absorbed(factors.size(), false);
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (static_cast<int>(i) == hole) continue;
            ab.absorb(st, static_cast<int>(i), absorbed);
            absorbed[i] = true;
        }
        // Remaining open slots all pair into the hole; pairs internal to the
        // hole contribute doubled indices. Accumulate
        // d(value)/dH[alpha] over per-group splits of alpha.
        int vh = 0;
        for (int p = ab.start[hole]; p < ab.start[hole] + rank; ++p) {
            const int q = ab.partner[p];
            if (ab.factor_of[q] == hole && q > p) ++vh;
        }
        const auto& traces = multi_indices(vh);
        const int ngroups = static_cast<int>(st.open.size());
        std::vector<int> idx(ngroups, 0);
        bool more = true;
        while (more) {
            MultiIndex part;
            double weight = 1.0;
            std::size_t pos = 0;
            std::size_t stride = 1;
            for (int g = 0; g < ngroups; ++g) {
                const MultiIndex& e = multi_indices(st.open[g])[idx[g]];
                part = add(part, e);
                weight *= arrangements(e);
                pos += stride * static_cast<std::size_t>(idx[g]);
                stride *= sym_dim(st.open[g]);
            }
            for (const MultiIndex& w : traces) {
                const MultiIndex alpha = add2(part, w);
                grad[multi_index_pos(alpha)] += weight * arrangements(w) * st.data[pos];
            }
            more = false;
            for (int g = 0; g < ngroups; ++g) {
                if (++idx[g] < sym_dim(st.open[g])) {
                    more = true;
                    break;
                }
                idx[g] = 0;
            }
        }
    }
    return grad;
}

double d_contract(const std::vector<SymTensor3>& factors, const Pairing& pairing,
                  const std::vector<int>& occurrences, const MultiIndex& wrt, int cap) {
    const std::vector<double> g = contract_gradient(factors, pairing, occurrences, cap);
    return g[multi_index_pos(wrt)];
}

} // namespace momenta
