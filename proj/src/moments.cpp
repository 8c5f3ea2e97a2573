#include "momenta/moments.hpp"
#include "momenta/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace momenta {

namespace {
constexpr double kPi = std::numbers::pi;

double double_factorial(int n) { // (-1)!! = 0!! = 1
    double p = 1.0;
    for (int k = n; k >= 2; k -= 2) p *= k;
    return p;
}
} // namespace

std::string to_string(Flavor f) {
    return f == Flavor::volumetric ? "volumetric" : "spherical";
}

Flavor flavor_from_string(const std::string& s) {
    if (s == "volumetric") return Flavor::volumetric;
    if (s == "spherical") return Flavor::spherical;
    throw std::invalid_argument("unknown flavor: " + s);
}

double MomentSet::norm() const {
    double s = 0.0;
    for (const auto& [l, t] : tensors) {
        const double n = t.norm();
        s += n * n;
    }
    return std::sqrt(s);
}

double sphere_monomial_integral(const MultiIndex& e) {
    if (e.a % 2 || e.b % 2 || e.c % 2) return 0.0;
    const int l = e.order();
    return 4.0 * kPi * double_factorial(e.a - 1) * double_factorial(e.b - 1) *
           double_factorial(e.c - 1) / double_factorial(l + 1);
}

double ball_monomial_integral(const MultiIndex& e) {
    return sphere_monomial_integral(e) / (e.order() + 3);
}

namespace {

template <typename Integral>
MomentSet analytic_moments(const PolynomialField& f, int lmax, Flavor flavor, Integral integral) {
    MomentSet out;
    out.flavor = flavor;
    out.lmax = lmax;
    for (int l = 0; l <= lmax; ++l) {
        SymTensor3 t(l);
        for (const MultiIndex& mi : multi_indices(l)) {
            double v = 0.0;
            for (const auto& term : f.terms())
                v += term.coeff * integral({mi.a + term.exponents.a, mi.b + term.exponents.b,
                                            mi.c + term.exponents.c});
            t.at(mi) = v;
        }
        out.tensors.emplace(l, std::move(t));
    }
    return out;
}

} // namespace

MomentSet volumetric_moments(const PolynomialField& f, int lmax) {
    return analytic_moments(f, lmax, Flavor::volumetric, ball_monomial_integral);
}

MomentSet spherical_moments(const PolynomialField& f, int lmax) {
    return analytic_moments(f, lmax, Flavor::spherical, sphere_monomial_integral);
}

MomentSet volumetric_moments_of_spherical(const PolynomialField& f, int lmax) {
    MomentSet m = spherical_moments(f, lmax);
    m.flavor = Flavor::volumetric;
    for (auto& [l, t] : m.tensors) t *= 1.0 / (l + 3);
    return m;
}

SampledField SampledField::volumetric(int n, std::vector<float> values) {
    if (n < 8) throw std::invalid_argument("volumetric grid resolution must be >= 8");
    if (values.size() != static_cast<std::size_t>(n) * n * n)
        throw std::invalid_argument("grid value count does not match resolution^3");
    SampledField s;
    s.kind = Kind::volumetric_grid;
    s.resolution = n;
    s.grid = std::move(values);
    return s;
}

SampledField SampledField::spherical(std::vector<SphericalSample> samples) {
    double wsum = 0.0;
    for (const auto& s : samples) wsum += s.weight;
    if (std::abs(wsum - 4.0 * kPi) > 1e-6)
        throw std::invalid_argument("spherical quadrature weights must sum to 4*pi");
    SampledField s;
    s.kind = Kind::spherical_samples;
    s.samples = std::move(samples);
    return s;
}

MomentSet spherical_moments(const SampledField& samples, int lmax) {
    if (samples.kind != SampledField::Kind::spherical_samples)
        throw FlavorMismatch("spherical_moments needs spherical samples, got a volumetric grid");
    MomentSet out;
    out.flavor = Flavor::spherical;
    out.lmax = lmax;
    for (int l = 0; l <= lmax; ++l) out.tensors.emplace(l, SymTensor3(l));
    for (const auto& s : samples.samples) {
        const double st = std::sin(s.theta);
        const double dir[3] = {st * std::cos(s.phi), st * std::sin(s.phi), std::cos(s.theta)};
        const double wv = s.weight * s.value;
        for (int l = 0; l <= lmax; ++l) {
            SymTensor3& t = out.tensors.at(l);
            for (const MultiIndex& mi : multi_indices(l))
                t.at(mi) += wv * std::pow(dir[0], mi.a) * std::pow(dir[1], mi.b) *
                            std::pow(dir[2], mi.c);
        }
    }
    return out;
}

namespace {

// Pairwise (fixed-tree) reduction over the voxel range for bit-stable sums.
void grid_block_sum(const SampledField& g, int lmax, double radius, std::size_t begin,
                    std::size_t end, std::vector<double>& acc) {
    if (end - begin > 4096) {
        const std::size_t mid = begin + (end - begin) / 2;
        std::vector<double> left(acc.size(), 0.0), right(acc.size(), 0.0);
        grid_block_sum(g, lmax, radius, begin, mid, left);
        grid_block_sum(g, lmax, radius, mid, end, right);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += left[i] + right[i];
        return;
    }
    const int n = g.resolution;
    const double h = 2.0 / n;
    for (std::size_t v = begin; v < end; ++v) {
        const double f = g.grid[v];
        if (f == 0.0) continue;
        const int ix = static_cast<int>(v % n);
        const int iy = static_cast<int>((v / n) % n);
        const int iz = static_cast<int>(v / (static_cast<std::size_t>(n) * n));
        const double x = (-1.0 + (ix + 0.5) * h) / radius;
        const double y = (-1.0 + (iy + 0.5) * h) / radius;
        const double z = (-1.0 + (iz + 0.5) * h) / radius;
        if (x * x + y * y + z * z > 1.0) continue;
        std::size_t k = 0;
        for (int l = 0; l <= lmax; ++l)
            for (const MultiIndex& mi : multi_indices(l))
                acc[k++] += f * std::pow(x, mi.a) * std::pow(y, mi.b) * std::pow(z, mi.c);
    }
}

} // namespace

MomentSet moments_from_grid(const SampledField& grid, int lmax, double support_radius) {
    if (grid.kind != SampledField::Kind::volumetric_grid)
        throw FlavorMismatch("moments_from_grid needs a volumetric grid");
    if (support_radius <= 0.0) throw std::invalid_argument("support radius must be positive");
    std::size_t ncoeff = 0;
    for (int l = 0; l <= lmax; ++l) ncoeff += sym_dim(l);
    std::vector<double> acc(ncoeff, 0.0);
    grid_block_sum(grid, lmax, support_radius, 0, grid.grid.size(), acc);

    const double voxel = std::pow(2.0 / grid.resolution, 3) / std::pow(support_radius, 3);
    MomentSet out;
    out.flavor = Flavor::volumetric;
    out.lmax = lmax;
    std::size_t k = 0;
    for (int l = 0; l <= lmax; ++l) {
        SymTensor3 t(l);
        for (int i = 0; i < t.size(); ++i) t[i] = acc[k++] * voxel;
        out.tensors.emplace(l, std::move(t));
    }
    return out;
}

TraceReport check_trace_relation(const MomentSet& m) {
    TraceReport rep;
    for (const auto& [l, t] : m.tensors) {
        if (l < 2) continue;
        const SymTensor3 tr = t.trace();
        SymTensor3 expect = m.tensors.at(l - 2);
        if (m.flavor == Flavor::volumetric) expect *= double(l + 1) / double(l + 3);
        const double denom = std::max(expect.norm(), tr.norm());
        const double dev = denom > 0.0 ? (tr - expect).norm() / denom : 0.0;
        rep.relative_deviation[l] = dev;
        rep.max_relative_deviation = std::max(rep.max_relative_deviation, dev);
    }
    return rep;
}

std::string MomentSet::to_json() const {
    nlohmann::json j;
    j["schema"] = "momenta/1";
    j["flavor"] = momenta::to_string(flavor);
    j["lmax"] = lmax;
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [l, tensor] : tensors) t[std::to_string(l)] = tensor.coeffs();
    j["tensors"] = std::move(t);
    return j.dump(2);
}

MomentSet MomentSet::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("schema", "") != "momenta/1")
        throw std::invalid_argument("unsupported schema in moment set JSON");
    MomentSet m;
    m.flavor = flavor_from_string(j.at("flavor").get<std::string>());
    m.lmax = j.at("lmax").get<int>();
    for (const auto& [key, coeffs] : j.at("tensors").items()) {
        const int l = std::stoi(key);
        m.tensors.emplace(l, SymTensor3(l, coeffs.get<std::vector<double>>()));
    }
    for (int l = 0; l <= m.lmax; ++l)
        if (!m.tensors.count(l))
            throw std::invalid_argument("moment set JSON is missing order " + std::to_string(l));
    return m;
}

SampledField load_voxel_grid(std::istream& in) {
    char header[16];
    in.read(header, 16);
    if (!in || std::memcmp(header, "MOMV", 4) != 0)
        throw std::invalid_argument("bad voxel file header (expected MOMV magic)");
    std::uint32_t n;
    std::memcpy(&n, header + 4, 4);
    std::vector<float> values(static_cast<std::size_t>(n) * n * n);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
    if (!in) throw std::invalid_argument("voxel file truncated");
    return SampledField::volumetric(static_cast<int>(n), std::move(values));
}

void save_voxel_grid(const SampledField& grid, std::ostream& out) {
    char header[16] = {'M', 'O', 'M', 'V'};
    const std::uint32_t n = static_cast<std::uint32_t>(grid.resolution);
    std::memcpy(header + 4, &n, 4);
    out.write(header, 16);
    out.write(reinterpret_cast<const char*>(grid.grid.data()),
              static_cast<std::streamsize>(grid.grid.size() * sizeof(float)));
}

double max_nonzero_radius(const SampledField& grid) {
    const int n = grid.resolution;
    const double h = 2.0 / n;
    double rmax = 0.0;
    for (std::size_t v = 0; v < grid.grid.size(); ++v) {
        if (grid.grid[v] == 0.0f) continue;
        const int ix = static_cast<int>(v % n);
        const int iy = static_cast<int>((v / n) % n);
        const int iz = static_cast<int>(v / (static_cast<std::size_t>(n) * n));
        const double x = -1.0 + (ix + 0.5) * h;
        const double y = -1.0 + (iy + 0.5) * h;
        const double z = -1.0 + (iz + 0.5) * h;
        rmax = std::max(rmax, std::sqrt(x * x + y * y + z * z));
    }
    return rmax;
}

} // namespace momenta
