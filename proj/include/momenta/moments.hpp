#ifndef MOMENTA_MOMENTS_HPP
#define MOMENTA_MOMENTS_HPP

#include "momenta/polynomial.hpp"
#include "momenta/sym_tensor.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace momenta {

enum class Flavor { volumetric, spherical };

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);

/// Moment tensors per order up to lmax.
struct MomentSet {
    Flavor flavor = Flavor::volumetric;
    int lmax = 0;
    std::map<int, SymTensor3> tensors;

    const SymTensor3& order(int l) const { return tensors.at(l); }
    double norm() const;

    std::string to_json() const;
    static MomentSet from_json(const std::string& text);
};

/// Sampled input: either a voxel grid over [-1,1]^3 (values outside the unit
/// ball ignored) or a weighted sample list on the unit sphere.
struct SampledField {
    enum class Kind { volumetric_grid, spherical_samples };
    struct SphericalSample {
        double theta, phi, value, weight;
    };

    Kind kind = Kind::volumetric_grid;
    int resolution = 0;               // grid: n, data has n^3 values, x fastest
    std::vector<float> grid;          // grid values
    std::vector<SphericalSample> samples;

    static SampledField volumetric(int n, std::vector<float> values);
    static SampledField spherical(std::vector<SphericalSample> samples);
};

/// Integral of x^a y^b z^c over the unit ball; zero when any exponent is odd.
double ball_monomial_integral(const MultiIndex& e);
/// Integral of the unit-direction monomial over the unit sphere.
double sphere_monomial_integral(const MultiIndex& e);

/// Moment tensors of a polynomial over the unit ball, exact.
MomentSet volumetric_moments(const PolynomialField& f, int lmax);

/// Spherical moment tensors of a polynomial restricted to the unit sphere.
MomentSet spherical_moments(const PolynomialField& f, int lmax);
/// Quadrature spherical moments from weighted sphere samples.
MomentSet spherical_moments(const SampledField& samples, int lmax);

/// Volumetric moments of the r-independent extension f(x/|x|): every order is
/// the spherical moment scaled by 1/(l+3).
MomentSet volumetric_moments_of_spherical(const PolynomialField& f, int lmax);

/// Midpoint-rule moments of a voxel grid; voxels with centers outside the
/// support ball are dropped. Summation is pairwise in a fixed tree order.
/// `support_radius` rescales coordinates by that radius (the --rescale path);
/// the default 1.0 integrates over the unit ball as-is.
MomentSet moments_from_grid(const SampledField& grid, int lmax, double support_radius = 1.0);

/// Trace check for moments of spherical functions: volumetric moments must
/// satisfy tr(lM) = (l+1)/(l+3) * (l-2)M, spherical ones tr(lM^) = (l-2)M^.
struct TraceReport {
    std::map<int, double> relative_deviation; // per order l >= 2
    double max_relative_deviation = 0.0;
};
TraceReport check_trace_relation(const MomentSet& m);

/// Voxel file I/O: 16-byte header (magic "MOMV", u32 n little-endian, 8 bytes
/// reserved) followed by n^3 float32 values, x fastest.
SampledField load_voxel_grid(std::istream& in);
void save_voxel_grid(const SampledField& grid, std::ostream& out);

/// Rescale support into the unit ball: voxel coordinates divided by the max
/// radius over nonzero voxels.
double max_nonzero_radius(const SampledField& grid);

} // namespace momenta

#endif
