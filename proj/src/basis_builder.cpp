#include "momenta/basis_builder.hpp"
#include "momenta/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace momenta {

std::string to_string(SetMode m) { return m == SetMode::specific ? "specific" : "minimal"; }

SetMode mode_from_string(const std::string& s) {
    if (s == "specific") return SetMode::specific;
    if (s == "minimal") return SetMode::minimal;
    throw std::invalid_argument("unknown set mode: " + s);
}

std::vector<TensorSymbol> irreducible_symbols(int lmax, Flavor flavor) {
    std::vector<TensorSymbol> out;
    for (int l = 0; l <= lmax; ++l) {
        if (flavor == Flavor::spherical) {
            out.push_back(TensorSymbol::irreducible(l, l));
        } else {
            for (int p = l % 2; p <= l; p += 2) out.push_back(TensorSymbol::irreducible(l, p));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

int pure_count(int rank) { return rank <= 1 ? 1 : 2 * rank - 2; }

int mixed_count(int ra, int rb) {
    if (ra == 0 || rb == 0) return 0;
    if (ra == 1 && rb == 1) return 1;
    if (ra == 1 || rb == 1) return 2;
    return 3;
}

// Greedy Langbein scan over a lazy sequence of factor multisets.
// Returns accepted patterns; nullopt of the target means exhaust.
std::vector<ContractionPattern> scan_multisets(
    const std::vector<TensorSymbol>& symbols,
    const std::vector<std::vector<TensorSymbol>>& multisets, int target,
    const SelectionConfig& cfg, const std::vector<ContractionPattern>& prefill) {
    const SymbolAssignment at = assign_random(symbols, cfg);
    JacobianBasis basis(symbols, at, cfg.tol, cfg.cap);
    for (const auto& p : prefill) basis.try_accept(p);

    std::vector<ContractionPattern> accepted;
    int scanned = 0;
    for (const auto& nodes : multisets) {
        if (static_cast<int>(accepted.size()) >= target) break;
        for_each_matching_class(
            nodes, /*allow_loops=*/false, /*connected_only=*/true,
            [&](const ContractionPattern& p) {
                if (++scanned > cfg.max_candidates) return false;
                try {
                    if (basis.try_accept(p).first) accepted.push_back(p);
                } catch (const IntermediateRankExceeded&) {
                }
                return static_cast<int>(accepted.size()) < target;
            });
    }
    if (static_cast<int>(accepted.size()) < target)
        throw TargetNotReached("found " + std::to_string(accepted.size()) + " of " +
                               std::to_string(target) + " invariants after " +
                               std::to_string(scanned) + " candidates");
    return accepted;
}

// Multisets s^k for k = min_k..max_k with even total rank, ascending.
std::vector<std::vector<TensorSymbol>> power_multisets(const TensorSymbol& s, int max_exponent) {
    std::vector<std::vector<TensorSymbol>> out;
    for (int k = 1; k <= max_exponent; ++k) {
        if ((k * s.rank) % 2 != 0) continue;
        out.push_back(std::vector<TensorSymbol>(k, s));
    }
    return out;
}

// Multisets a^i b^j, i,j >= 1, sorted by (total rank, factor count, i).
std::vector<std::vector<TensorSymbol>> pair_multisets(const TensorSymbol& a,
                                                      const TensorSymbol& b, int max_exponent,
                                                      int max_total_rank) {
    struct Entry {
        int rank, count, i, j;
    };
    std::vector<Entry> entries;
    for (int i = 1; i <= max_exponent; ++i)
        for (int j = 1; j <= max_exponent; ++j) {
            const int rank = i * a.rank + j * b.rank;
            if (rank % 2 != 0 || rank > max_total_rank) continue;
            entries.push_back({rank, i + j, i, j});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.rank != y.rank) return x.rank < y.rank;
        if (x.count != y.count) return x.count < y.count;
        return x.i < y.i;
    });
    std::vector<std::vector<TensorSymbol>> out;
    for (const auto& e : entries) {
        std::vector<TensorSymbol> nodes(e.i, a);
        nodes.insert(nodes.end(), e.j, b);
        out.push_back(std::move(nodes));
    }
    return out;
}

std::vector<ContractionPattern> relabel(std::vector<ContractionPattern> ps,
                                        const std::map<TensorSymbol, TensorSymbol>& map) {
    for (auto& p : ps)
        for (auto& f : p.factors) f = map.at(f);
    return ps;
}

std::mutex g_memo_mu;

} // namespace

std::vector<ContractionPattern> pure_invariants(const TensorSymbol& s,
                                                const SelectionConfig& cfg) {
    if (s.rank == 0) {
        ContractionPattern scalar;
        scalar.factors = {s};
        return {scalar};
    }

    // Shapes depend only on the rank; memoize with a placeholder symbol.
    static std::map<std::pair<int, std::uint64_t>, std::vector<ContractionPattern>> memo;
    const TensorSymbol ph = TensorSymbol::irreducible(s.rank, s.rank);
    {
        std::lock_guard<std::mutex> lock(g_memo_mu);
        auto it = memo.find({s.rank, cfg.seed});
        if (it != memo.end()) return relabel(it->second, {{ph, s}});
    }

    const int target = pure_count(s.rank);
    int max_exp = 10;
    std::vector<ContractionPattern> found;
    for (int attempt = 0;; ++attempt) {
        try {
            found = scan_multisets({ph}, power_multisets(ph, max_exp), target, cfg, {});
            break;
        } catch (const TargetNotReached&) {
            if (attempt >= 1) throw;
            max_exp += 2;
        }
    }
    {
        std::lock_guard<std::mutex> lock(g_memo_mu);
        memo[{s.rank, cfg.seed}] = found;
    }
    return relabel(found, {{ph, s}});
}

std::vector<ContractionPattern> mixed_invariants(const TensorSymbol& a, const TensorSymbol& b,
                                                 const SelectionConfig& cfg) {
    if (a == b) throw std::invalid_argument("mixed invariants need two distinct symbols");
    const int target = mixed_count(a.rank, b.rank);
    if (target == 0) return {};

    // Normalize to placeholders ordered by rank so shapes memoize per rank
    // pair regardless of the source orders.
    const TensorSymbol lo = a.rank <= b.rank ? a : b;
    const TensorSymbol hi = a.rank <= b.rank ? b : a;
    const TensorSymbol pl = TensorSymbol::irreducible(91, lo.rank);
    const TensorSymbol ph = TensorSymbol::irreducible(92, hi.rank);

    static std::map<std::tuple<int, int, std::uint64_t>, std::vector<ContractionPattern>> memo;
    {
        std::lock_guard<std::mutex> lock(g_memo_mu);
        auto it = memo.find({lo.rank, hi.rank, cfg.seed});
        if (it != memo.end()) return relabel(it->second, {{pl, lo}, {ph, hi}});
    }

    std::vector<ContractionPattern> prefill = pure_invariants(pl, cfg);
    for (const auto& p : pure_invariants(ph, cfg)) prefill.push_back(p);

    int max_exp = 10, max_rank = 24;
    std::vector<ContractionPattern> found;
    for (int attempt = 0;; ++attempt) {
        try {
            found = scan_multisets({pl, ph}, pair_multisets(pl, ph, max_exp, max_rank), target,
                                   cfg, prefill);
            break;
        } catch (const TargetNotReached&) {
            if (attempt >= 1) throw;
            max_exp += 2;
            max_rank += 4;
        }
    }
    {
        std::lock_guard<std::mutex> lock(g_memo_mu);
        memo[{lo.rank, hi.rank, cfg.seed}] = found;
    }
    return relabel(found, {{pl, lo}, {ph, hi}});
}

std::vector<Decomposition> decompose_all(const MomentSet& m) {
    std::vector<Decomposition> out;
    for (int l = 0; l <= m.lmax; ++l) out.push_back(decompose(m.order(l)));
    return out;
}

bool part_vanishes(const IrreducibleTensor& part, double moment_set_norm) {
    return part.data.norm() <= 1e-10 * std::max(1.0, moment_set_norm);
}

namespace {

TensorSymbol auto_select_robust(int lmax, Flavor flavor,
                                const std::vector<Decomposition>& reference) {
    double total = 0.0;
    int count = 0;
    std::map<TensorSymbol, double> norms;
    for (const auto& d : reference) {
        if (d.order > lmax) continue;
        for (const auto& part : d.parts) {
            if (flavor == Flavor::spherical && part.rank != part.source_order) continue;
            const double n = part.data.norm();
            norms[TensorSymbol::irreducible(part.source_order, part.rank)] = n;
            total += n;
            ++count;
        }
    }
    const double mean = count ? total / count : 0.0;
    std::optional<TensorSymbol> best;
    for (const auto& [s, n] : norms) {
        if (s.rank < 2 || n <= mean) continue;
        if (!best || s.rank < best->rank || (s.rank == best->rank && s.order < best->order))
            best = s;
    }
    if (!best)
        throw NoRobustCandidate(
            "no irreducible tensor of rank >= 2 exceeds the mean part norm; "
            "fall back to the minimal flexible set");
    return *best;
}

} // namespace

InvariantSet specific_flexible_basis(int lmax, Flavor flavor, std::optional<TensorSymbol> robust,
                                     const std::vector<Decomposition>* reference,
                                     const SelectionConfig& cfg) {
    const std::vector<TensorSymbol> symbols = irreducible_symbols(lmax, flavor);
    InvariantSet set;
    set.mode = SetMode::specific;
    set.flavor = flavor;
    set.lmax = lmax;
    set.seed = cfg.seed;

    const bool needs_anchor = lmax >= 2;
    if (needs_anchor) {
        if (!robust) {
            if (!reference)
                throw std::invalid_argument(
                    "specific basis needs a robust symbol or reference moments");
            robust = auto_select_robust(lmax, flavor, *reference);
        }
        if (robust->rank < 2)
            throw std::invalid_argument("robust symbol must have rank >= 2");
        if (std::find(symbols.begin(), symbols.end(), *robust) == symbols.end())
            throw std::invalid_argument("robust symbol " + robust->name() + " not in scope");
        if (reference) {
            double total_norm = 0.0;
            for (const auto& d : *reference)
                for (const auto& part : d.parts) total_norm += std::pow(part.data.norm(), 2);
            total_norm = std::sqrt(total_norm);
            for (const auto& d : *reference)
                for (const auto& part : d.parts)
                    if (TensorSymbol::irreducible(part.source_order, part.rank) == *robust &&
                        part_vanishes(part, total_norm))
                        throw NoRobustCandidate("requested robust symbol " + robust->name() +
                                                " vanishes in the reference moments");
        }
        set.robust = robust;
    }

    for (const auto& s : symbols)
        for (const auto& p : pure_invariants(s, cfg)) set.members.push_back({p, std::nullopt});
    if (needs_anchor)
        for (const auto& s : symbols) {
            if (s == *robust || s.rank == 0) continue;
            for (const auto& p : mixed_invariants(*robust, s, cfg))
                set.members.push_back({p, std::make_pair(*robust, s)});
        }
    return set;
}

InvariantSet minimal_flexible_set(int lmax, Flavor flavor, const SelectionConfig& cfg) {
    const std::vector<TensorSymbol> symbols = irreducible_symbols(lmax, flavor);
    InvariantSet set;
    set.mode = SetMode::minimal;
    set.flavor = flavor;
    set.lmax = lmax;
    set.seed = cfg.seed;
    for (const auto& s : symbols)
        for (const auto& p : pure_invariants(s, cfg)) set.members.push_back({p, std::nullopt});
    for (std::size_t i = 0; i < symbols.size(); ++i)
        for (std::size_t j = i + 1; j < symbols.size(); ++j) {
            if (symbols[i].rank == 0 || symbols[j].rank == 0) continue;
            for (const auto& p : mixed_invariants(symbols[i], symbols[j], cfg))
                set.members.push_back({p, std::make_pair(symbols[i], symbols[j])});
        }
    return set;
}

std::vector<double> evaluate_set(const InvariantSet& set, const MomentSet& m) {
    if (set.flavor != m.flavor)
        throw FlavorMismatch("invariant set is " + to_string(set.flavor) + ", moments are " +
                             to_string(m.flavor));
    if (set.lmax > m.lmax)
        throw std::invalid_argument("moment set only reaches order " + std::to_string(m.lmax));

    SymbolAssignment at;
    for (int l = 0; l <= set.lmax; ++l) {
        const Decomposition d = decompose(m.order(l));
        for (const auto& part : d.parts) {
            if (set.flavor == Flavor::spherical && part.rank != part.source_order) continue;
            at.emplace(TensorSymbol::irreducible(part.source_order, part.rank), part.data);
        }
    }
    std::vector<double> out;
    out.reserve(set.members.size());
    for (const auto& member : set.members)
        out.push_back(evaluate_pattern(member.pattern, at, /*cap=*/16));
    return out;
}

CountRow expected_counts(int lmax, Flavor flavor, SetMode mode) {
    const std::vector<TensorSymbol> symbols = irreducible_symbols(lmax, flavor);
    CountRow row;
    for (const auto& s : symbols) row.pure += pure_count(s.rank);
    if (mode == SetMode::minimal) {
        for (std::size_t i = 0; i < symbols.size(); ++i)
            for (std::size_t j = i + 1; j < symbols.size(); ++j)
                row.mixed += mixed_count(symbols[i].rank, symbols[j].rank);
    } else if (lmax >= 2) {
        // Anchored around one rank-2 symbol; counts are rank-determined and
        // independent of which robust symbol is picked.
        for (const auto& s : symbols)
            if (s.rank >= 1) row.mixed += mixed_count(2, s.rank);
        row.mixed -= mixed_count(2, 2); // the robust symbol itself
    }
    row.total = row.pure + row.mixed;
    return row;
}

std::vector<int> published_sequence(Flavor flavor, SetMode mode) {
    if (flavor == Flavor::volumetric)
        return mode == SetMode::specific ? std::vector<int>{1, 2, 7, 17, 32, 53, 81}
                                         : std::vector<int>{1, 2, 12, 22, 89, 116};
    return mode == SetMode::specific ? std::vector<int>{1, 3, 6, 13, 22, 33, 46}
                                     : std::vector<int>{1, 3, 8, 20, 37, 59};
}

std::string InvariantSet::to_json() const {
    nlohmann::json j;
    j["schema"] = "momenta/1";
    j["mode"] = momenta::to_string(mode);
    j["flavor"] = momenta::to_string(flavor);
    j["lmax"] = lmax;
    j["seed"] = seed;
    if (robust) j["robust"] = nlohmann::json::array({robust->order, robust->rank});
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : members) {
        nlohmann::json e = nlohmann::json::parse(m.pattern.to_json());
        if (m.anchor)
            e["anchor"] = nlohmann::json::array(
                {nlohmann::json::array({m.anchor->first.order, m.anchor->first.rank}),
                 nlohmann::json::array({m.anchor->second.order, m.anchor->second.rank})});
        e["notation"] = m.pattern.notation();
        ms.push_back(std::move(e));
    }
    j["members"] = std::move(ms);
    return j.dump(2);
}

InvariantSet InvariantSet::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("schema", "") != "momenta/1")
        throw std::invalid_argument("unsupported schema in invariant set JSON");
    InvariantSet set;
    set.mode = mode_from_string(j.at("mode").get<std::string>());
    set.flavor = flavor_from_string(j.at("flavor").get<std::string>());
    set.lmax = j.at("lmax").get<int>();
    set.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("robust"))
        set.robust = TensorSymbol::irreducible(j["robust"].at(0).get<int>(),
                                               j["robust"].at(1).get<int>());
    for (const auto& e : j.at("members")) {
        InvariantSetMember m;
        m.pattern = ContractionPattern::from_json(e.dump());
        if (e.contains("anchor"))
            m.anchor = std::make_pair(
                TensorSymbol::irreducible(e["anchor"].at(0).at(0).get<int>(),
                                          e["anchor"].at(0).at(1).get<int>()),
                TensorSymbol::irreducible(e["anchor"].at(1).at(0).get<int>(),
                                          e["anchor"].at(1).at(1).get<int>()));
        set.members.push_back(std::move(m));
    }
    return set;
}

InvariantSet generate_cached(int lmax, Flavor flavor, SetMode mode,
                             std::optional<TensorSymbol> robust, const SelectionConfig& cfg,
                             const std::string& cache_dir) {
    std::string dir = cache_dir;
    if (dir.empty())
        if (const char* env = std::getenv("MOMENTA_CACHE")) dir = env;

    std::filesystem::path file;
    if (!dir.empty()) {
        std::ostringstream name;
        name << "set_l" << lmax << "_" << to_string(flavor) << "_" << to_string(mode);
        if (robust) name << "_r" << robust->order << "." << robust->rank;
        name << "_s" << cfg.seed << ".json";
        file = std::filesystem::path(dir) / name.str();
        if (std::filesystem::exists(file)) {
            std::ifstream in(file);
            std::stringstream buf;
            buf << in.rdbuf();
            return InvariantSet::from_json(buf.str());
        }
    }
    InvariantSet set = mode == SetMode::minimal
                           ? minimal_flexible_set(lmax, flavor, cfg)
                           : specific_flexible_basis(lmax, flavor, robust, nullptr, cfg);
    if (!file.empty()) {
        std::filesystem::create_directories(file.parent_path());
        std::ofstream out(file);
        out << set.to_json();
    }
    return set;
}

} // namespace momenta
