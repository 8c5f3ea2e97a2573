#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "momenta/errors.hpp"
#include "momenta/moments.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace momenta;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kC = 8.0 * kPi / 315.0;
} // namespace

TEST_CASE("monomial integrals validated against Monte Carlo") {
    std::mt19937_64 rng(17);
    const int samples = 2'000'000;

    // Ball: sample the cube, keep points inside.
    struct Mono {
        MultiIndex e;
    };
    const std::vector<MultiIndex> monos = {{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {2, 2, 0},
                                           {2, 2, 2}, {4, 0, 0}, {1, 0, 0}, {2, 4, 0}};
    std::vector<double> sums(monos.size(), 0.0), sq(monos.size(), 0.0);
    for (int s = 0; s < samples; ++s) {
        const double x = oracles::uniform(rng), y = oracles::uniform(rng),
                     z = oracles::uniform(rng);
        const bool inside = x * x + y * y + z * z <= 1.0;
        for (std::size_t m = 0; m < monos.size(); ++m) {
            const double v = inside ? std::pow(x, monos[m].a) * std::pow(y, monos[m].b) *
                                          std::pow(z, monos[m].c)
                                    : 0.0;
            sums[m] += v;
            sq[m] += v * v;
        }
    }
    for (std::size_t m = 0; m < monos.size(); ++m) {
        const double mean = sums[m] / samples;
        const double var = sq[m] / samples - mean * mean;
        const double est = 8.0 * mean; // cube volume
        const double sigma = 8.0 * std::sqrt(var / samples);
        CHECK(std::abs(ball_monomial_integral(monos[m]) - est) <= 3.0 * sigma + 1e-12);
    }

    // Sphere: uniform directions from normal deviates.
    std::vector<double> ssum(monos.size(), 0.0), ssq(monos.size(), 0.0);
    for (int s = 0; s < samples / 4; ++s) {
        double g[3];
        for (double& gi : g) {
            // Box-Muller from two uniforms.
            const double u1 = oracles::uniform(rng, 1e-12, 1.0), u2 = oracles::uniform(rng, 0, 1);
            gi = std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * kPi * u2);
        }
        const double r = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        for (std::size_t m = 0; m < monos.size(); ++m) {
            const double v = std::pow(g[0] / r, monos[m].a) * std::pow(g[1] / r, monos[m].b) *
                             std::pow(g[2] / r, monos[m].c);
            ssum[m] += v;
            ssq[m] += v * v;
        }
    }
    for (std::size_t m = 0; m < monos.size(); ++m) {
        const int n = samples / 4;
        const double mean = ssum[m] / n;
        const double var = ssq[m] / n - mean * mean;
        const double est = 4.0 * kPi * mean;
        const double sigma = 4.0 * kPi * std::sqrt(var / n);
        CHECK(std::abs(sphere_monomial_integral(monos[m]) - est) <= 3.0 * sigma + 1e-12);
    }
}

TEST_CASE("ball and sphere closed forms at the stated values") {
    CHECK(ball_monomial_integral({0, 0, 0}) == doctest::Approx(4.0 * kPi / 3.0));
    CHECK(ball_monomial_integral({2, 0, 0}) == doctest::Approx(4.0 * kPi / 15.0));
    CHECK(ball_monomial_integral({1, 0, 0}) == 0.0);
    CHECK(sphere_monomial_integral({0, 0, 0}) == doctest::Approx(4.0 * kPi));
    CHECK(sphere_monomial_integral({2, 0, 0}) == doctest::Approx(4.0 * kPi / 3.0));
}

TEST_CASE("f1 volumetric moments match the published entries") {
    const MomentSet m = volumetric_moments(fixture_f1(), 3);
    for (int l = 0; l <= 2; ++l) CHECK(m.order(l).norm() < 1e-15);
    const SymTensor3& t = m.order(3);
    CHECK(t.at({1, 2, 0}) == doctest::Approx(kC).epsilon(1e-12));
    CHECK(t.at({1, 0, 2}) == doctest::Approx(-kC).epsilon(1e-12));
    CHECK(t.at({0, 2, 1}) == doctest::Approx(-std::sqrt(2.0) * kC).epsilon(1e-12));
    CHECK(t.at({0, 0, 3}) == doctest::Approx(std::sqrt(2.0) * kC).epsilon(1e-12));
    CHECK(t.at({3, 0, 0}) == doctest::Approx(0.0));
    CHECK(t.at({1, 1, 1}) == doctest::Approx(0.0));

    const MomentSet m2 = volumetric_moments(fixture_f2(), 3);
    for (int l = 0; l <= 2; ++l) CHECK(m2.order(l).norm() < 1e-15);
    const SymTensor3& u = m2.order(3);
    CHECK(u.at({1, 2, 0}) == doctest::Approx(kC).epsilon(1e-12));
    CHECK(u.at({1, 0, 2}) == doctest::Approx(-kC).epsilon(1e-12));
    CHECK(u.at({0, 3, 0}) == doctest::Approx(kC).epsilon(1e-12));
    CHECK(u.at({0, 2, 1}) == doctest::Approx(-kC).epsilon(1e-12));
    CHECK(u.at({0, 1, 2}) == doctest::Approx(-kC).epsilon(1e-12));
    CHECK(u.at({0, 0, 3}) == doctest::Approx(kC).epsilon(1e-12));
}

TEST_CASE("volumetric and spherical moments of an r-independent field differ by 1/(l+3)") {
    std::mt19937_64 rng(29);
    std::vector<PolynomialField::Term> terms;
    for (int k = 0; k < 6; ++k)
        terms.push_back({oracles::uniform(rng),
                         {int(rng() % 3), int(rng() % 3), int(rng() % 2)}});
    const PolynomialField f(terms);
    const MomentSet vol = volumetric_moments_of_spherical(f, 4);
    const MomentSet sph = spherical_moments(f, 4);
    for (int l = 0; l <= 4; ++l) {
        const SymTensor3 scaled = sph.order(l) * (1.0 / (l + 3));
        const double denom = std::max(1e-300, scaled.norm());
        CHECK((vol.order(l) - scaled).norm() / denom < 1e-10);
    }
}

TEST_CASE("linearity and rotation equivariance of moments") {
    std::mt19937_64 rng(41);
    const PolynomialField f = fixture_f1();
    const PolynomialField g = fixture_f2();
    const MomentSet mf = volumetric_moments(f, 3);
    const MomentSet mg = volumetric_moments(g, 3);
    const MomentSet sum = volumetric_moments(2.0 * f + g * -0.5, 3);
    for (int l = 0; l <= 3; ++l) {
        const SymTensor3 expect = mf.order(l) * 2.0 + mg.order(l) * -0.5;
        CHECK((sum.order(l) - expect).norm() <= 1e-14 * (1.0 + expect.norm()));
    }

    for (int k = 0; k < 5; ++k) {
        const Rotation3 a = oracles::random_rotation(rng);
        const MomentSet rotated_field = volumetric_moments(f.rotated(a), 3);
        for (int l = 0; l <= 3; ++l) {
            const SymTensor3 expect = rotate(mf.order(l), a);
            CHECK((rotated_field.order(l) - expect).norm() <= 1e-8 * (1.0 + expect.norm()));
        }
    }
}

TEST_CASE("grid moments: constant ball, rasterized f1, zero grid") {
    const int n = 64;
    std::vector<float> ones(std::size_t(n) * n * n, 1.0f);
    const MomentSet m0 = moments_from_grid(SampledField::volumetric(n, std::move(ones)), 0);
    CHECK(m0.order(0)[0] == doctest::Approx(4.0 * kPi / 3.0).epsilon(0.01));

    const int n1 = 96;
    const PolynomialField f1 = fixture_f1();
    std::vector<float> vals(std::size_t(n1) * n1 * n1);
    const double h = 2.0 / n1;
    std::size_t v = 0;
    for (int iz = 0; iz < n1; ++iz)
        for (int iy = 0; iy < n1; ++iy)
            for (int ix = 0; ix < n1; ++ix, ++v)
                vals[v] = static_cast<float>(f1.evaluate(-1 + (ix + 0.5) * h, -1 + (iy + 0.5) * h,
                                                         -1 + (iz + 0.5) * h));
    const MomentSet mg = moments_from_grid(SampledField::volumetric(n1, std::move(vals)), 3);
    const MomentSet ma = volumetric_moments(f1, 3);
    for (const MultiIndex& mi : multi_indices(3)) {
        const double a = ma.order(3).at(mi);
        const double g = mg.order(3).at(mi);
        if (std::abs(a) > 1e-12)
            CHECK(std::abs(g - a) / std::abs(a) < 0.02);
        else
            CHECK(std::abs(g) < 0.02 * kC);
    }

    std::vector<float> zeros(std::size_t(16) * 16 * 16, 0.0f);
    const MomentSet mz = moments_from_grid(SampledField::volumetric(16, std::move(zeros)), 2);
    for (int l = 0; l <= 2; ++l) CHECK(mz.order(l).norm() == 0.0);
}

TEST_CASE("trace relations for spherical-function moments") {
    // Spherical moments of f1: trace of M3 equals M1 exactly (both zero).
    const MomentSet sph = spherical_moments(fixture_f1(), 3);
    CHECK(sph.order(3).trace().norm() < 1e-15);
    CHECK(sph.order(1).norm() < 1e-15);

    // f = x^2 on the sphere: tr M2^ = M0^.
    const PolynomialField x2 = PolynomialField::monomial(1.0, {2, 0, 0});
    const MomentSet sx2 = spherical_moments(x2, 2);
    CHECK(sx2.order(2).trace()[0] == doctest::Approx(sx2.order(0)[0]).epsilon(1e-10));
    CHECK(check_trace_relation(sx2).max_relative_deviation < 1e-10);

    // Volumetric f = 1: tr M2 = (3/5) M0.
    const MomentSet v1 = volumetric_moments(PolynomialField::constant(1.0), 2);
    CHECK(v1.order(2).trace()[0] == doctest::Approx(0.6 * v1.order(0)[0]).epsilon(1e-10));
    CHECK(check_trace_relation(v1).max_relative_deviation < 1e-10);

    // Volumetric r-independent random polynomial: (l+1)/(l+3) factor, orders 2..5.
    std::mt19937_64 rng(53);
    std::vector<PolynomialField::Term> terms;
    for (int k = 0; k < 8; ++k)
        terms.push_back({oracles::uniform(rng),
                         {int(rng() % 4), int(rng() % 3), int(rng() % 3)}});
    const MomentSet vol = volumetric_moments_of_spherical(PolynomialField(terms), 5);
    const TraceReport rep = check_trace_relation(vol);
    for (int l = 2; l <= 5; ++l) CHECK(rep.relative_deviation.at(l) < 1e-10);
}

TEST_CASE("spherical quadrature samples and flavor mismatch") {
    // Gauss-like uniform grid in phi, midpoint in cos(theta).
    std::vector<SampledField::SphericalSample> samples;
    const int nt = 256, np = 256;
    const PolynomialField f = fixture_f1();
    for (int it = 0; it < nt; ++it) {
        const double ct = -1.0 + (it + 0.5) * 2.0 / nt;
        const double theta = std::acos(ct);
        for (int ip = 0; ip < np; ++ip) {
            const double phi = (ip + 0.5) * 2.0 * kPi / np;
            const double st = std::sin(theta);
            const double val =
                f.evaluate(st * std::cos(phi), st * std::sin(phi), ct);
            samples.push_back({theta, phi, val, (2.0 / nt) * (2.0 * kPi / np)});
        }
    }
    const MomentSet mq = spherical_moments(SampledField::spherical(samples), 3);
    const MomentSet ma = spherical_moments(f, 3);
    for (const MultiIndex& mi : multi_indices(3)) {
        CHECK(mq.order(3).at(mi) ==
              doctest::Approx(ma.order(3).at(mi)).epsilon(1e-3).scale(1.0));
    }

    std::vector<float> zeros(std::size_t(8) * 8 * 8, 0.0f);
    const SampledField grid = SampledField::volumetric(8, std::move(zeros));
    CHECK_THROWS_AS(spherical_moments(grid, 2), FlavorMismatch);

    std::vector<SampledField::SphericalSample> bad = {{0.1, 0.2, 1.0, 1.0}};
    CHECK_THROWS_AS(SampledField::spherical(bad), std::invalid_argument);
}

TEST_CASE("moment set JSON round-trips bit-exactly") {
    const MomentSet m = volumetric_moments(fixture_f2(), 3);
    const MomentSet back = MomentSet::from_json(m.to_json());
    CHECK(back.flavor == m.flavor);
    CHECK(back.lmax == m.lmax);
    for (int l = 0; l <= 3; ++l)
        for (int i = 0; i < m.order(l).size(); ++i) CHECK(back.order(l)[i] == m.order(l)[i]);
}

TEST_CASE("voxel grid file round-trip and rescale radius") {
    std::vector<float> vals(std::size_t(8) * 8 * 8, 0.0f);
    vals[0] = 2.5f; // corner voxel, radius ~ sqrt(3) * (7/8)
    const SampledField g = SampledField::volumetric(8, vals);
    std::stringstream ss;
    save_voxel_grid(g, ss);
    const SampledField back = load_voxel_grid(ss);
    CHECK(back.resolution == 8);
    CHECK(back.grid == g.grid);
    CHECK(max_nonzero_radius(g) == doctest::Approx(std::sqrt(3.0) * 0.875));

    std::stringstream bad("NOPExxxxxxxxxxxx");
    CHECK_THROWS_AS(load_voxel_grid(bad), std::invalid_argument);
}
