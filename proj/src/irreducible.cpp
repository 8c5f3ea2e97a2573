#include "momenta/irreducible.hpp"
#include "momenta/errors.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <map>
#include <mutex>
#include <stdexcept>

namespace momenta {

const IrreducibleTensor& Decomposition::part(int rank) const {
    for (const auto& p : parts)
        if (p.rank == rank) return p;
    throw std::out_of_range("decomposition has no part of rank " + std::to_string(rank));
}

SymTensor3 embed(const SymTensor3& h, int target_order) {
    const int p = h.order();
    if (target_order < p || (target_order - p) % 2 != 0)
        throw ParityMismatch("cannot embed rank " + std::to_string(p) + " into order " +
                             std::to_string(target_order));
    const int k = (target_order - p) / 2;
    GeneralTensor dense = GeneralTensor::from_sym(h);
    const GeneralTensor delta = GeneralTensor::from_sym(SymTensor3::delta());
    for (int i = 0; i < k; ++i) dense = outer(dense, delta);
    // Sum over the distinct index arrangements (the parenthesized product in
    // the decomposition expands without an averaging factor): l!/(p! k! 2^k)
    // copies of the permutation average.
    double n = 1.0;
    for (int i = p + 1; i <= target_order; ++i) n *= i;
    for (int i = 1; i <= k; ++i) n /= 2.0 * i;
    return symmetrize(dense) * n;
}

SymTensor3 embed(const IrreducibleTensor& h, int target_order) {
    return embed(h.data, target_order);
}

namespace {

struct OrderSolver {
    std::vector<int> ranks;              // p = l, l-2, ...
    std::vector<int> col_offset;         // per part
    int cols = 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

// Builds the square system: reconstruction rows (one per compact coefficient
// of the order-l tensor) plus traceless rows per part.
OrderSolver build_solver(int l) {
    OrderSolver s;
    for (int p = l; p >= 0; p -= 2) s.ranks.push_back(p);
    for (int p : s.ranks) {
        s.col_offset.push_back(s.cols);
        s.cols += sym_dim(p);
    }
    int rows = sym_dim(l);
    for (int p : s.ranks)
        if (p >= 2) rows += sym_dim(p - 2);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, s.cols);
    for (std::size_t k = 0; k < s.ranks.size(); ++k) {
        const int p = s.ranks[k];
        for (int i = 0; i < sym_dim(p); ++i) {
            SymTensor3 basis(p);
            basis[i] = 1.0;
            const SymTensor3 emb = embed(basis, l);
            for (int r = 0; r < sym_dim(l); ++r) a(r, s.col_offset[k] + i) = emb[r];
        }
    }
    int row = sym_dim(l);
    for (std::size_t k = 0; k < s.ranks.size(); ++k) {
        const int p = s.ranks[k];
        if (p < 2) continue;
        for (int i = 0; i < sym_dim(p); ++i) {
            SymTensor3 basis(p);
            basis[i] = 1.0;
            const SymTensor3 tr = basis.trace();
            for (int r = 0; r < sym_dim(p - 2); ++r) a(row + r, s.col_offset[k] + i) = tr[r];
        }
        row += sym_dim(p - 2);
    }
    s.qr = a.colPivHouseholderQr();
    return s;
}

const OrderSolver& solver_for(int l) {
    static std::mutex mu;
    static std::map<int, OrderSolver> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(l);
    if (it == cache.end()) it = cache.emplace(l, build_solver(l)).first;
    return it->second;
}

} // namespace

Decomposition decompose(const SymTensor3& m) {
    const int l = m.order();
    const OrderSolver& s = solver_for(l);

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s.qr.rows());
    for (int i = 0; i < sym_dim(l); ++i) rhs(i) = m[i];
    const Eigen::VectorXd x = s.qr.solve(rhs);

    Decomposition d;
    d.order = l;
    for (std::size_t k = 0; k < s.ranks.size(); ++k) {
        const int p = s.ranks[k];
        IrreducibleTensor part{l, p, SymTensor3(p)};
        for (int i = 0; i < sym_dim(p); ++i) part.data[i] = x(s.col_offset[k] + i);
        d.parts.push_back(std::move(part));
    }
    return d;
}

IrreducibleTensor detrace(const SymTensor3& t) { return decompose(t).parts.front(); }

const std::vector<SymTensor3>& traceless_basis(int rank) {
    static std::mutex mu;
    static std::map<int, std::vector<SymTensor3>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(rank);
    if (it != cache.end()) return it->second;

    std::vector<SymTensor3> basis;
    if (rank == 0) {
        SymTensor3 one(0);
        one[0] = 1.0;
        basis.push_back(one);
    } else {
        // Detraced unit coefficients with z-exponent <= 1 span the harmonic
        // subspace (2p+1 of them).
        for (const MultiIndex& mi : multi_indices(rank)) {
            if (mi.c > 1) continue;
            SymTensor3 e(rank);
            e.at(mi) = 1.0;
            SymTensor3 h = detrace(e).data;
            h *= 1.0 / h.norm();
            basis.push_back(std::move(h));
        }
    }
    return cache.emplace(rank, std::move(basis)).first->second;
}

std::string decomposition_to_json(const Decomposition& d) {
    nlohmann::json j;
    j["schema"] = "momenta/1";
    j["order"] = d.order;
    nlohmann::json parts = nlohmann::json::object();
    for (const auto& p : d.parts) {
        const std::string key =
            "(" + std::to_string(p.source_order) + "," + std::to_string(p.rank) + ")";
        parts[key] = p.data.coeffs();
    }
    j["parts"] = std::move(parts);
    return j.dump(2);
}

Decomposition decomposition_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("schema", "") != "momenta/1")
        throw std::invalid_argument("unsupported schema in decomposition JSON");
    Decomposition d;
    d.order = j.at("order").get<int>();
    for (int p = d.order; p >= 0; p -= 2) {
        const std::string key = "(" + std::to_string(d.order) + "," + std::to_string(p) + ")";
        const auto coeffs = j.at("parts").at(key).get<std::vector<double>>();
        d.parts.push_back({d.order, p, SymTensor3(p, coeffs)});
    }
    return d;
}

} // namespace momenta
