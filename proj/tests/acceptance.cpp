// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line. Tolerances are pinned in code.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "appendix_fixtures.hpp"
#include "momenta/basis_builder.hpp"
#include "momenta/errors.hpp"
#include "momenta/expr.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

using namespace momenta;

namespace {

constexpr double kC = 8.0 * std::numbers::pi / 315.0;

struct Criterion {
    int number;
    std::string title;
    int failures = 0;
    std::vector<std::string> notes;

    Criterion(int n, std::string t) : number(n), title(std::move(t)) {}
    ~Criterion() {
        std::printf("criterion %d (%s): %s\n", number, title.c_str(),
                    failures == 0 ? "PASS" : "FAIL");
        for (const auto& n : notes) std::printf("  - %s\n", n.c_str());
        std::fflush(stdout);
    }
    void check(bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            notes.push_back("failed: " + what);
        }
        CHECK_MESSAGE(ok, what);
    }
    void note(const std::string& what) { notes.push_back(what); }
};

MomentSet random_moments(int lmax, std::mt19937_64& rng) {
    MomentSet m;
    m.flavor = Flavor::volumetric;
    m.lmax = lmax;
    for (int l = 0; l <= lmax; ++l) m.tensors.emplace(l, oracles::random_sym(l, rng));
    return m;
}

} // namespace

TEST_CASE("criterion 1: discrimination fixture") {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c(1, "f1/f2 discrimination");

    const MomentSet m1 = volumetric_moments(fixture_f1(), 3);
    const MomentSet m2 = volumetric_moments(fixture_f2(), 3);
    const TensorSymbol m3 = TensorSymbol::moment(3);
    SymbolAssignment a1, a2;
    a1.emplace(m3, m1.order(3));
    a2.emplace(m3, m2.order(3));

    auto equal_vectors = [&](const std::vector<fixtures::Entry>& entries, const char* name) {
        for (const auto& e : entries) {
            const double u = evaluate_pattern(e.pattern(), a1);
            const double v = evaluate_pattern(e.pattern(), a2);
            c.check(std::abs(u - v) <= 1e-10 * (1.0 + std::abs(u)),
                    std::string(name) + " member " + e.pattern().notation() +
                        " differs between f1 and f2");
        }
    };
    equal_vectors(fixtures::bujack_order3(), "overcomplete set");
    equal_vectors(fixtures::langbein_order3(), "greedy set");

    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const auto bj = fixtures::bujack_order3();
    c.check(rel(evaluate_pattern(bj[1].pattern(), a1), 14 * kC * kC) <= 1e-8,
            "second overcomplete member is 14 c^2");
    c.check(rel(evaluate_pattern(bj[4].pattern(), a1), 92 * std::pow(kC, 4)) <= 1e-8,
            "fifth overcomplete member is 92 c^4");
    const auto lb = fixtures::langbein_order3();
    c.check(rel(evaluate_pattern(lb[5].pattern(), a1), 6 * std::pow(kC, 4)) <= 1e-8,
            "greedy set's last member is 6 c^4");

    const InvariantSet set =
        specific_flexible_basis(3, Flavor::volumetric, fixtures::H(2, 2));
    const auto v1 = evaluate_set(set, m1);
    const auto v2 = evaluate_set(set, m2);
    int exp10 = -1;
    for (std::size_t i = 0; i < set.members.size(); ++i)
        if (set.members[i].pattern.factors.size() == 10) exp10 = (int)i;
    REQUIRE(exp10 >= 0);

    // As published: 1418 c^10 for f1 and 1152 c^10 for f2. Evaluating the
    // published pattern on the published moments gives 1408 c^10 for f1
    // (engine and an independent dense-einsum oracle agree); the f2 value
    // matches as printed. Asserted as stated; the 1418 sub-check records the
    // discrepancy.
    c.check(rel(v1[exp10], 1418 * std::pow(kC, 10)) <= 1e-6,
            "f1 exponent-10 value equals the published 1418 c^10 (computed: " +
                std::to_string(v1[exp10] / std::pow(kC, 10)) + " c^10)");
    c.check(rel(v2[exp10], 1152 * std::pow(kC, 10)) <= 1e-6,
            "f2 exponent-10 value equals the published 1152 c^10");
    c.check(std::abs(v1[exp10] - v2[exp10]) > 1e-6 * std::abs(v1[exp10]),
            "the irreducible basis separates f1 from f2");

    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.check(dt < 60.0, "runtime under 60 s");
    c.note("runtime " + std::to_string(dt) + " s");
}

TEST_CASE("criterion 2: count tables") {
    Criterion c(2, "published count tables");

    // Table 1, per order l <= 6.
    const int irr_inv[7] = {1, 1, 2, 4, 6, 8, 10};
    const int pure_of_order[7] = {1, 1, 3, 5, 9, 13, 19};
    const int mixed_of_order[7] = {0, 0, 0, 2, 3, 5, 6};
    for (int l = 0; l <= 6; ++l) {
        c.check((int)pure_invariants(TensorSymbol::irreducible(l, l)).size() == irr_inv[l],
                "Table 1: invariants of a rank-" + std::to_string(l) + " irreducible tensor");
        c.check((int)traceless_basis(l).size() == 2 * l + 1,
                "Table 1: independent moments of a rank-" + std::to_string(l) + " tensor");
        int pure = 0;
        std::vector<TensorSymbol> parts;
        for (int p = l % 2; p <= l; p += 2) parts.push_back(TensorSymbol::irreducible(l, p));
        for (const auto& s : parts) pure += (int)pure_invariants(s).size();
        c.check(pure == pure_of_order[l],
                "Table 1: pure invariants of the order-" + std::to_string(l) + " decomposition");
        int mixed = 0;
        if (l >= 2) {
            // Anchor the lowest rank >= 2 part against the other parts.
            TensorSymbol anchor = TensorSymbol::irreducible(l, l % 2 == 0 ? 2 : 3);
            for (const auto& s : parts) {
                if (s == anchor || s.rank == 0) continue;
                mixed += (int)mixed_invariants(anchor, s).size();
            }
        }
        c.check(mixed == mixed_of_order[l],
                "Table 1: mixed invariants needed at order " + std::to_string(l));
    }

    // Table 2, cumulative volumetric specific basis (lm <= 5 within budget).
    const auto table2 = published_sequence(Flavor::volumetric, SetMode::specific);
    for (int lm = 0; lm <= 5; ++lm) {
        const InvariantSet set = specific_flexible_basis(
            lm, Flavor::volumetric,
            lm >= 2 ? std::optional<TensorSymbol>(fixtures::H(2, 2)) : std::nullopt);
        c.check((int)set.members.size() == table2[lm],
                "Table 2 row " + std::to_string(lm) + ": generated " +
                    std::to_string(set.members.size()) + ", published " +
                    std::to_string(table2[lm]));
    }

    // Table 3, spherical specific basis, lm <= 6.
    const auto table3 = published_sequence(Flavor::spherical, SetMode::specific);
    for (int lm = 0; lm <= 6; ++lm) {
        const InvariantSet set = specific_flexible_basis(
            lm, Flavor::spherical,
            lm >= 2 ? std::optional<TensorSymbol>(fixtures::H(2, 2)) : std::nullopt);
        c.check((int)set.members.size() == table3[lm],
                "Table 3 row " + std::to_string(lm) + ": generated " +
                    std::to_string(set.members.size()) + ", published " +
                    std::to_string(table3[lm]));
    }

    // Minimal-set sequences as printed.
    const auto minvol = published_sequence(Flavor::volumetric, SetMode::minimal);
    for (int lm = 0; lm <= 3; ++lm) {
        const InvariantSet set = minimal_flexible_set(lm, Flavor::volumetric);
        c.check((int)set.members.size() == minvol[lm],
                "volumetric minimal lm=" + std::to_string(lm) + ": generated " +
                    std::to_string(set.members.size()) + ", published " +
                    std::to_string(minvol[lm]));
    }
    const auto minsph = published_sequence(Flavor::spherical, SetMode::minimal);
    for (int lm = 0; lm <= 5; ++lm) {
        const InvariantSet set = minimal_flexible_set(lm, Flavor::spherical);
        c.check((int)set.members.size() == minsph[lm],
                "spherical minimal lm=" + std::to_string(lm) + ": generated " +
                    std::to_string(set.members.size()) + ", published " +
                    std::to_string(minsph[lm]));
    }
    c.note("the published minimal sequences and the spherical lm=1 cell disagree with the "
           "paper's own worked examples and appendix listings; generated sizes follow the "
           "appendix construction (see the decisions ledger)");
}

TEST_CASE("criterion 3: decomposition properties") {
    Criterion c(3, "reconstruction, tracelessness, DOF accounting");
    std::mt19937_64 rng(271828);
    bool recon_ok = true, trace_ok = true, dof_ok = true;
    for (int l = 0; l <= 6; ++l) {
        for (int trial = 0; trial < 100; ++trial) {
            const SymTensor3 m = oracles::random_sym(l, rng);
            const Decomposition d = decompose(m);
            SymTensor3 sum(l);
            int dof = 0;
            for (const auto& part : d.parts) {
                sum += embed(part, l);
                dof += 2 * part.rank + 1;
                if (part.rank >= 2 &&
                    part.data.trace().norm() > 1e-10 * std::max(1e-300, part.data.norm()))
                    trace_ok = false;
            }
            if ((m - sum).norm() > 1e-10 * std::max(1e-300, m.norm())) recon_ok = false;
            if (dof != sym_dim(l)) dof_ok = false;
        }
    }
    c.check(recon_ok, "reconstruction residual <= 1e-10 relative");
    c.check(trace_ok, "part tracelessness <= 1e-10 relative");
    c.check(dof_ok, "degree-of-freedom accounting exact");
}

TEST_CASE("criterion 4: invariance suite") {
    Criterion c(4, "rotation/reflection invariance of generated invariants");
    std::mt19937_64 rng(314159);
    const MomentSet m = random_moments(4, rng);

    std::vector<InvariantSet> sets;
    sets.push_back(specific_flexible_basis(4, Flavor::volumetric, fixtures::H(2, 2)));
    sets.push_back(minimal_flexible_set(4, Flavor::volumetric));

    for (const auto& set : sets) {
        const std::vector<double> base = evaluate_set(set, m);
        double worst = 0.0;
        for (int k = 0; k < 60; ++k) {
            Rotation3 a = oracles::random_rotation(rng);
            if (k >= 50) a = a.compose(Rotation3::reflection(k % 3)); // 10 reflections
            MomentSet rm = m;
            for (auto& [l, t] : rm.tensors) t = rotate(t, a);
            const std::vector<double> got = evaluate_set(set, rm);
            for (std::size_t i = 0; i < base.size(); ++i)
                worst = std::max(worst,
                                 std::abs(got[i] - base[i]) / (1.0 + std::abs(base[i])));
        }
        c.check(worst <= 1e-8, to_string(set.mode) +
                                   " lm=4 invariance, worst relative change " +
                                   std::to_string(worst));
    }
}

TEST_CASE("criterion 5: trace relations") {
    Criterion c(5, "spherical and volumetric trace identities");
    std::mt19937_64 rng(999);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<PolynomialField::Term> terms;
        for (int k = 0; k < 8; ++k)
            terms.push_back({oracles::uniform(rng),
                             {int(rng() % 4), int(rng() % 4), int(rng() % 3)}});
        const PolynomialField f(terms);

        const MomentSet sph = spherical_moments(f, 5);
        const TraceReport rs = check_trace_relation(sph);
        for (int l = 2; l <= 5; ++l)
            c.check(rs.relative_deviation.at(l) <= 1e-10,
                    "spherical trace identity at order " + std::to_string(l));

        const MomentSet vol = volumetric_moments_of_spherical(f, 5);
        const TraceReport rv = check_trace_relation(vol);
        for (int l = 2; l <= 5; ++l)
            c.check(rv.relative_deviation.at(l) <= 1e-10,
                    "volumetric (l+1)/(l+3) trace factor at order " + std::to_string(l));
    }
}

TEST_CASE("criterion 6: derivative oracle") {
    Criterion c(6, "analytic gradients vs central differences");
    std::mt19937_64 rng(777);

    // 20 random patterns of total rank <= 12 over one or two symbols.
    int tested = 0;
    while (tested < 20) {
        const int nsym = 1 + int(rng() % 2);
        std::vector<int> ranks;
        int total = 0;
        std::vector<TensorSymbol> factors;
        while (true) {
            const int r = 1 + int(rng() % 4);
            if (total + r > 12) break;
            total += r;
            factors.push_back(TensorSymbol::moment(r * 10 + int(factors.size() % nsym)));
            ranks.push_back(r);
            if (factors.size() >= 6) break;
        }
        if (total % 2 != 0 || factors.empty()) continue;
        // One random perfect matching of the positions.
        std::vector<int> pos(total);
        std::iota(pos.begin(), pos.end(), 1);
        std::shuffle(pos.begin(), pos.end(), rng);
        Pairing pairing;
        for (int i = 0; i + 1 < total; i += 2) pairing.pairs.push_back({pos[i], pos[i + 1]});

        // Distinct tensors per rank value; all occurrences of a rank share one.
        std::map<int, SymTensor3> by_rank;
        std::vector<SymTensor3> tensors;
        std::map<int, std::vector<int>> occurrences;
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            if (!by_rank.count(ranks[i])) by_rank.emplace(ranks[i], oracles::random_sym(ranks[i], rng));
            tensors.push_back(by_rank.at(ranks[i]));
            occurrences[ranks[i]].push_back((int)i);
        }
        ++tested;
        for (const auto& [rank, occ] : occurrences) {
            std::vector<double> grad;
            try {
                grad = contract_gradient(tensors, pairing, occ, 14);
            } catch (const IntermediateRankExceeded&) {
                break;
            }
            for (int k = 0; k < sym_dim(rank); ++k) {
                const double fd = oracles::fd_derivative(tensors, pairing, occ, k);
                c.check(std::abs(grad[k] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)),
                        "gradient entry matches finite differences");
            }
        }
    }
    c.note("20 random patterns tested");
}

TEST_CASE("criterion 7: brute-force equivalence") {
    Criterion c(7, "tensor network vs dense; class enumeration vs matchings");
    std::mt19937_64 rng(555);

    // Every pattern class of total rank <= 8 over a few symbol pools.
    const std::vector<std::vector<TensorSymbol>> pools = {
        {TensorSymbol::moment(2)},
        {TensorSymbol::moment(3)},
        {TensorSymbol::moment(1), TensorSymbol::moment(2)},
        {TensorSymbol::moment(1), TensorSymbol::moment(3)},
        {TensorSymbol::moment(2), TensorSymbol::moment(4)},
    };
    bool dense_ok = true;
    int patterns = 0;
    for (const auto& pool : pools) {
        SymbolAssignment at = assign_random(pool, SelectionConfig{});
        for (const auto& p : enumerate_patterns(pool, 8, 8)) {
            std::vector<SymTensor3> fs;
            for (const auto& s : p.factors) fs.push_back(at.at(s));
            const double net = contract_full(fs, p.pairing);
            const double ref = oracles::contract_dense(fs, p.pairing);
            ++patterns;
            if (std::abs(net - ref) > 1e-12 * std::max(1.0, std::abs(ref))) dense_ok = false;
        }
    }
    c.check(dense_ok, "network contraction equals dense contraction at 1e-12");
    c.note(std::to_string(patterns) + " pattern classes compared");

    // Class enumeration equals brute-force matchings + grouping, rank <= 6.
    auto brute_classes = [](const std::vector<TensorSymbol>& factors) {
        int total = 0;
        for (const auto& f : factors) total += f.rank;
        std::set<std::string> classes;
        std::vector<std::pair<int, int>> pairs;
        std::vector<bool> used(total + 1, false);
        std::function<void()> rec = [&]() {
            int first = -1;
            for (int q = 1; q <= total; ++q)
                if (!used[q]) {
                    first = q;
                    break;
                }
            if (first < 0) {
                ContractionPattern pat;
                pat.factors = factors;
                pat.pairing.pairs = pairs;
                classes.insert(canonical_form(pat));
                return;
            }
            used[first] = true;
            for (int q = first + 1; q <= total; ++q) {
                if (used[q]) continue;
                used[q] = true;
                pairs.push_back({first, q});
                rec();
                pairs.pop_back();
                used[q] = false;
            }
            used[first] = false;
        };
        if (total % 2 == 0) rec();
        return classes;
    };
    const std::vector<std::vector<TensorSymbol>> multisets = {
        {TensorSymbol::moment(2), TensorSymbol::moment(2)},
        {TensorSymbol::moment(3), TensorSymbol::moment(3)},
        {TensorSymbol::moment(2), TensorSymbol::moment(2), TensorSymbol::moment(2)},
        {TensorSymbol::moment(1), TensorSymbol::moment(2), TensorSymbol::moment(3)},
        {TensorSymbol::moment(1), TensorSymbol::moment(1), TensorSymbol::moment(2),
         TensorSymbol::moment(2)},
    };
    for (const auto& ms : multisets) {
        std::set<std::string> got;
        for_each_matching_class(ms, true, false, [&](const ContractionPattern& p) {
            got.insert(canonical_form(p));
            return true;
        });
        c.check(got == brute_classes(ms), "class enumeration matches brute force");
    }
}

TEST_CASE("criterion 8: flexibility under vanishing parts") {
    Criterion c(8, "rank retention when single parts vanish");
    std::mt19937_64 rng(2024);
    const MomentSet m = random_moments(3, rng);

    const std::vector<TensorSymbol> symbols = irreducible_symbols(3, Flavor::volumetric);
    SymbolAssignment full;
    for (int l = 0; l <= 3; ++l)
        for (const auto& part : decompose(m.order(l)).parts)
            full.emplace(TensorSymbol::irreducible(part.source_order, part.rank), part.data);

    const InvariantSet minimal = minimal_flexible_set(3, Flavor::volumetric);

    for (const auto& zeroed : symbols) {
        SymbolAssignment at = full;
        at.at(zeroed) = SymTensor3(zeroed.rank);

        std::vector<TensorSymbol> survivors;
        int dof = 0;
        for (const auto& s : symbols)
            if (s != zeroed) {
                survivors.push_back(s);
                dof += 2 * s.rank + 1;
            }
        std::vector<ContractionPattern> members;
        for (const auto& mem : minimal.members) {
            bool touches = false;
            for (const auto& f : mem.pattern.factors)
                if (f == zeroed) touches = true;
            if (!touches) members.push_back(mem.pattern);
        }
        const int rank = jacobian_rank(survivors, members, at);
        c.check(rank == dof - 3, "minimal set keeps rank " + std::to_string(dof - 3) +
                                     " with " + zeroed.name() + " zeroed (got " +
                                     std::to_string(rank) + ")");
    }

    // The specific basis loses rank when its robust symbol vanishes.
    const InvariantSet specific =
        specific_flexible_basis(3, Flavor::volumetric, fixtures::H(2, 2));
    SymbolAssignment at = full;
    at.at(fixtures::H(2, 2)) = SymTensor3(2);
    std::vector<TensorSymbol> survivors;
    int dof = 0;
    for (const auto& s : symbols)
        if (s != fixtures::H(2, 2)) {
            survivors.push_back(s);
            dof += 2 * s.rank + 1;
        }
    std::vector<ContractionPattern> members;
    for (const auto& mem : specific.members) {
        bool touches = false;
        for (const auto& f : mem.pattern.factors)
            if (f == fixtures::H(2, 2)) touches = true;
        if (!touches) members.push_back(mem.pattern);
    }
    const int rank = jacobian_rank(survivors, members, at);
    c.check(rank < dof - 3, "specific basis with robust part zeroed drops to rank " +
                                std::to_string(rank) + " < " + std::to_string(dof - 3));
}

TEST_CASE("criterion 9: appendix regeneration") {
    Criterion c(9, "published lm=3 catalogs up to graph isomorphism");

    auto keys = [](const std::vector<fixtures::Entry>& entries) {
        std::multiset<std::string> out;
        for (const auto& e : entries) out.insert(canonical_form(e.pattern()));
        return out;
    };
    auto set_keys = [](const InvariantSet& s) {
        std::multiset<std::string> out;
        for (const auto& m : s.members) out.insert(canonical_form(m.pattern));
        return out;
    };

    auto expect22 = keys(fixtures::pure_lm3());
    for (const auto& k : keys(fixtures::mixed_lm3_robust22())) expect22.insert(k);
    c.check(set_keys(specific_flexible_basis(3, Flavor::volumetric, fixtures::H(2, 2))) ==
                expect22,
            "specific basis, robust (2,2), matches the published 17 members");

    auto expect33 = keys(fixtures::pure_lm3());
    for (const auto& k : keys(fixtures::mixed_lm3_robust33())) expect33.insert(k);
    c.check(set_keys(specific_flexible_basis(3, Flavor::volumetric, fixtures::H(3, 3))) ==
                expect33,
            "specific basis, robust (3,3), matches the published 17 members");

    auto expect_min = keys(fixtures::pure_lm3());
    for (const auto& k : keys(fixtures::mixed_lm3_minimal())) expect_min.insert(k);
    c.check(set_keys(minimal_flexible_set(3, Flavor::volumetric)) == expect_min,
            "minimal set matches the published order <= 3 slice (22 members)");

    const InvariantSet sph22 = specific_flexible_basis(3, Flavor::spherical, fixtures::H(2, 2));
    c.check((int)sph22.members.size() == 13, "spherical specific basis has 13 members");
    auto expect_sph = keys(fixtures::pure_lm3_spherical());
    for (const auto& k : keys(fixtures::mixed_lm3_spherical_robust22())) expect_sph.insert(k);
    c.check(set_keys(sph22) == expect_sph, "spherical specific members match the appendix");

    const InvariantSet sphmin = minimal_flexible_set(3, Flavor::spherical);
    c.check((int)sphmin.members.size() == 15, "spherical minimal set has 15 members");
    auto expect_sphmin = keys(fixtures::pure_lm3_spherical());
    for (const auto& k : keys(fixtures::mixed_lm3_spherical_minimal())) expect_sphmin.insert(k);
    c.check(set_keys(sphmin) == expect_sphmin, "spherical minimal members match the appendix");
}
