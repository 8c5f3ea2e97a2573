#include "momenta/basis_builder.hpp"
#include "momenta/errors.hpp"
#include "momenta/expr.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace {

using namespace momenta;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path);
    out << text;
}

TensorSymbol parse_robust(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--robust expects L,P (for example 2,2)");
    return TensorSymbol::irreducible(std::stoi(text.substr(0, comma)),
                                     std::stoi(text.substr(comma + 1)));
}

MomentSet moments_from_input(const std::string& expr, const std::string& grid_path, int lmax,
                             Flavor flavor, bool rescale) {
    if (!expr.empty()) {
        const PolynomialField f = parse_polynomial(expr);
        return flavor == Flavor::spherical ? spherical_moments(f, lmax)
                                           : volumetric_moments(f, lmax);
    }
    if (grid_path.empty())
        throw CLI::ValidationError("provide either --expr or --grid");
    if (flavor == Flavor::spherical)
        throw FlavorMismatch("voxel grids are volumetric input");
    std::ifstream in(grid_path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + grid_path);
    const SampledField grid = load_voxel_grid(in);
    const double radius = rescale ? max_nonzero_radius(grid) : 1.0;
    return moments_from_grid(grid, lmax, radius > 0 ? radius : 1.0);
}

int cmd_moments(const std::string& expr, const std::string& grid, int lmax,
                const std::string& flavor, bool rescale, const std::string& out) {
    const MomentSet m =
        moments_from_input(expr, grid, lmax, flavor_from_string(flavor), rescale);
    write_output(out, m.to_json());
    return 0;
}

int cmd_basis(int lmax, const std::string& mode_s, const std::string& flavor_s,
              const std::string& robust_s, std::uint64_t seed, const std::string& reference,
              const std::string& dot_dir, const std::string& cache_dir, const std::string& out) {
    const SetMode mode = mode_from_string(mode_s);
    const Flavor flavor = flavor_from_string(flavor_s);
    SelectionConfig cfg;
    cfg.seed = seed;

    std::optional<TensorSymbol> robust;
    if (!robust_s.empty()) robust = parse_robust(robust_s);

    InvariantSet set;
    if (mode == SetMode::specific && !robust && !reference.empty()) {
        const MomentSet m = MomentSet::from_json(read_file(reference));
        if (m.lmax < lmax)
            throw CLI::ValidationError("reference moments only reach order " +
                                       std::to_string(m.lmax));
        const auto decomps = decompose_all(m);
        set = specific_flexible_basis(lmax, flavor, std::nullopt, &decomps, cfg);
    } else if (mode == SetMode::specific) {
        if (!robust && lmax >= 2) robust = TensorSymbol::irreducible(2, 2);
        set = generate_cached(lmax, flavor, mode, robust, cfg, cache_dir);
    } else {
        set = generate_cached(lmax, flavor, mode, std::nullopt, cfg, cache_dir);
    }
    write_output(out, set.to_json());

    if (!dot_dir.empty()) {
        std::filesystem::create_directories(dot_dir);
        for (std::size_t i = 0; i < set.members.size(); ++i) {
            std::ostringstream name;
            name << "member_" << i << ".dot";
            std::ofstream dot(std::filesystem::path(dot_dir) / name.str());
            dot << to_dot(set.members[i].pattern);
        }
    }
    return 0;
}

int cmd_eval(const std::string& set_path, const std::string& expr, const std::string& grid,
             bool csv, bool rescale, const std::string& out) {
    const InvariantSet set = InvariantSet::from_json(read_file(set_path));
    const MomentSet m = moments_from_input(expr, grid, set.lmax, set.flavor, rescale);
    const std::vector<double> values = evaluate_set(set, m);
    std::ostringstream text;
    text.precision(17);
    if (csv) {
        for (std::size_t i = 0; i < values.size(); ++i)
            text << set.members[i].pattern.notation() << "," << values[i] << "\n";
    } else {
        nlohmann::json j = values;
        text << j.dump();
    }
    write_output(out, text.str());
    return 0;
}

int cmd_export_dot(const std::string& set_path, const std::string& out_dir) {
    const InvariantSet set = InvariantSet::from_json(read_file(set_path));
    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        std::ostringstream name;
        name << "member_" << i << ".dot";
        std::ofstream dot(std::filesystem::path(out_dir) / name.str());
        dot << to_dot(set.members[i].pattern);
    }
    std::cout << "wrote " << set.members.size() << " dot files to " << out_dir << "\n";
    return 0;
}

int cmd_demo(bool rotate_f1, const std::string& flavor_s) {
    const Flavor flavor = flavor_from_string(flavor_s);
    PolynomialField f1 = fixture_f1();
    const PolynomialField f2 = fixture_f2();
    if (rotate_f1) {
        const Rotation3 a = Rotation3::from_quaternion(0.8, 0.5, -0.3, 0.11);
        PolynomialField rotated = f1.rotated(a);
        const MomentSet ma = flavor == Flavor::spherical ? spherical_moments(f1, 3)
                                                         : volumetric_moments(f1, 3);
        const MomentSet mb = flavor == Flavor::spherical ? spherical_moments(rotated, 3)
                                                         : volumetric_moments(rotated, 3);
        const InvariantSet set = specific_flexible_basis(3, flavor, TensorSymbol::irreducible(2, 2));
        const auto va = evaluate_set(set, ma);
        const auto vb = evaluate_set(set, mb);
        double worst = 0.0;
        for (std::size_t i = 0; i < va.size(); ++i)
            worst = std::max(worst, std::abs(va[i] - vb[i]) / (1.0 + std::abs(va[i])));
        std::cout << "rotated f1 vs f1: max relative descriptor deviation " << worst << "\n";
        std::cout << (worst <= 1e-8 ? "invariant: true" : "invariant: FALSE") << "\n";
        return worst <= 1e-8 ? 0 : kExitNumeric;
    }

    const MomentSet m1 = flavor == Flavor::spherical ? spherical_moments(f1, 3)
                                                     : volumetric_moments(f1, 3);
    const MomentSet m2 = flavor == Flavor::spherical ? spherical_moments(f2, 3)
                                                     : volumetric_moments(f2, 3);

    const TensorSymbol m3 = TensorSymbol::moment(3);
    SymbolAssignment a1, a2;
    a1.emplace(m3, m1.order(3));
    a2.emplace(m3, m2.order(3));

    auto compare = [&](const char* name, const std::vector<ContractionPattern>& patterns) {
        double maxdiff = 0.0;
        for (const auto& p : patterns) {
            const double u = evaluate_pattern(p, a1);
            const double v = evaluate_pattern(p, a2);
            maxdiff = std::max(maxdiff, std::abs(u - v) / (1.0 + std::abs(u)));
        }
        std::cout << name << ": max relative difference " << maxdiff
                  << (maxdiff <= 1e-10 ? "  (identical)" : "") << "\n";
        return maxdiff;
    };

    std::vector<ContractionPattern> bujack, langbein;
    {
        using G = std::vector<std::vector<int>>;
        auto mk = [&](int n, const G& groups) {
            return pattern_from_groups(std::vector<TensorSymbol>(n, m3), groups);
        };
        bujack = {
            mk(2, {{1, 1, 2}, {2, 3, 3}}),
            mk(2, {{1, 2, 3}, {1, 2, 3}}),
            mk(4, {{1, 1, 2}, {2, 3, 4}, {3, 5, 5}, {4, 6, 6}}),
            mk(4, {{1, 1, 2}, {2, 3, 4}, {3, 5, 6}, {4, 5, 6}}),
            mk(4, {{1, 2, 3}, {1, 2, 4}, {3, 5, 6}, {4, 5, 6}}),
            mk(4, {{1, 1, 2}, {2, 3, 4}, {3, 4, 5}, {5, 6, 6}}),
            mk(6, {{1, 1, 2}, {2, 3, 4}, {3, 4, 5}, {5, 6, 7}, {6, 7, 8}, {8, 9, 9}}),
        };
        langbein = {
            mk(2, {{1, 1, 2}, {2, 3, 3}}),
            mk(2, {{1, 2, 3}, {1, 2, 3}}),
            mk(4, {{1, 1, 2}, {2, 3, 4}, {3, 5, 5}, {4, 6, 6}}),
            mk(4, {{1, 1, 2}, {2, 3, 4}, {3, 5, 6}, {4, 5, 6}}),
            mk(4, {{1, 2, 3}, {1, 2, 4}, {3, 5, 6}, {4, 5, 6}}),
            mk(4, {{1, 2, 3}, {1, 4, 5}, {2, 5, 6}, {3, 4, 6}}),
        };
    }

    compare("homogeneous order-3 set (overcomplete style)", bujack);
    compare("homogeneous order-3 set (greedy-selected style)", langbein);

    const InvariantSet set = specific_flexible_basis(3, flavor, TensorSymbol::irreducible(2, 2));
    const auto v1 = evaluate_set(set, m1);
    const auto v2 = evaluate_set(set, m2);
    double magnitude = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i)
        magnitude = std::max({magnitude, std::abs(v1[i]), std::abs(v2[i])});
    int member = -1;
    double best = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i) {
        const double scale = std::max(std::abs(v1[i]), std::abs(v2[i]));
        if (scale <= 1e-10 * magnitude) continue; // both vanish
        const double rel = std::abs(v1[i] - v2[i]) / scale;
        if (rel > best) {
            best = rel;
            member = static_cast<int>(i);
        }
    }
    const bool distinguished = best > 1e-6;
    std::cout << "irreducible basis: distinguished: " << (distinguished ? "true" : "false");
    if (distinguished) {
        std::cout << ", member #" << member << " (" << set.members[member].pattern.notation()
                  << "), values " << v1[member] << " vs " << v2[member];
        const double c = 8.0 * std::numbers::pi / 315.0;
        // The fixtures are homogeneous cubics, so their spherical third-order
        // moments are 9x the volumetric ones (the radial weight integrates r^8).
        const double scale = flavor == Flavor::spherical ? std::pow(9.0, 10) : 1.0;
        std::cout << "  [= " << v1[member] / std::pow(c, 10) / scale << " vs "
                  << v2[member] / std::pow(c, 10) / scale << " x c^10]";
    }
    std::cout << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"momenta: rotation-invariant moment descriptors from irreducible tensors"};
    app.require_subcommand(1);

    std::string expr, grid, flavor = "volumetric", out, set_path, robust, reference, dot_dir;
    std::string mode = "specific", cache_dir;
    int lmax = 3;
    bool rescale = false, csv = false, rotate = false;
    std::uint64_t seed = 1;

    auto* mom = app.add_subcommand("moments", "compute moment tensors");
    mom->add_option("--expr", expr, "polynomial field");
    mom->add_option("--grid", grid, "voxel file (MOMV format)");
    mom->add_option("--lmax", lmax, "maximum order")->required();
    mom->add_option("--flavor", flavor, "volumetric|spherical");
    mom->add_flag("--rescale", rescale, "rescale support into the unit ball");
    mom->add_option("-o,--out", out, "output path (default stdout)");

    auto* bas = app.add_subcommand("basis", "generate an invariant set");
    bas->add_option("--lmax", lmax, "maximum order")->required();
    bas->add_option("--mode", mode, "specific|minimal");
    bas->add_option("--flavor", flavor, "volumetric|spherical");
    bas->add_option("--robust", robust, "robust irreducible tensor L,P");
    bas->add_option("--seed", seed, "selection seed");
    bas->add_option("--reference", reference, "moment JSON for robust auto-selection");
    bas->add_option("--dot-dir", dot_dir, "also export DOT graphs here");
    bas->add_option("--cache-dir", cache_dir, "basis cache directory (or MOMENTA_CACHE)");
    bas->add_option("-o,--out", out, "output path (default stdout)");

    auto* ev = app.add_subcommand("eval", "evaluate an invariant set on an input");
    ev->add_option("--set", set_path, "invariant set JSON")->required();
    ev->add_option("--expr", expr, "polynomial field");
    ev->add_option("--grid", grid, "voxel file");
    ev->add_flag("--csv", csv, "CSV output instead of JSON");
    ev->add_flag("--rescale", rescale, "rescale support into the unit ball");
    ev->add_option("-o,--out", out, "output path (default stdout)");

    auto* demo = app.add_subcommand("demo-discriminate",
                                    "third-order discrimination demonstration");
    demo->add_flag("--rotate", rotate, "compare f1 against a rotated copy instead");
    demo->add_option("--flavor", flavor, "volumetric|spherical");

    auto* dot = app.add_subcommand("export-dot", "write DOT graphs for a set");
    dot->add_option("--set", set_path, "invariant set JSON")->required();
    dot->add_option("--out", out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (mom->parsed()) return cmd_moments(expr, grid, lmax, flavor, rescale, out);
        if (bas->parsed())
            return cmd_basis(lmax, mode, flavor, robust, seed, reference, dot_dir, cache_dir,
                             out);
        if (ev->parsed()) return cmd_eval(set_path, expr, grid, csv, rescale, out);
        if (demo->parsed()) return cmd_demo(rotate, flavor);
        if (dot->parsed()) return cmd_export_dot(set_path, out);
    } catch (const ParseError& e) {
        std::cerr << "parse error at position " << e.pos << ": " << e.what() << "\n";
        return kExitValidation;
    } catch (const TargetNotReached& e) {
        std::cerr << "selection failed: " << e.what()
                  << " (raise the candidate bounds)\n";
        return kExitNumeric;
    } catch (const NoRobustCandidate& e) {
        std::cerr << "no robust tensor: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
