#include "momenta/sym_tensor.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace momenta {

namespace {

std::vector<MultiIndex> build_multi_indices(int order) {
    std::vector<MultiIndex> out;
    out.reserve(sym_dim(order));
    for (int a = order; a >= 0; --a)
        for (int b = order - a; b >= 0; --b)
            out.push_back({a, b, order - a - b});
    return out;
}

} // namespace

const std::vector<MultiIndex>& multi_indices(int order) {
    static std::mutex mu;
    static std::map<int, std::vector<MultiIndex>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_multi_indices(order)).first;
    return it->second;
}

int multi_index_pos(const MultiIndex& mi) {
    const int l = mi.order();
    // Count entries before (a,b,c): all with a' > a, then those with a' == a, b' > b.
    int pos = 0;
    for (int a = l; a > mi.a; --a) pos += l - a + 1;
    pos += (l - mi.a) - mi.b;
    return pos;
}

double multinomial(const MultiIndex& mi) {
    static const double fact[13] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320,
                                    362880, 3628800, 39916800, 479001600};
    const int l = mi.order();
    if (l <= 12) return fact[l] / (fact[mi.a] * fact[mi.b] * fact[mi.c]);
    double f = 1.0;
    for (int i = 2; i <= l; ++i) f *= i;
    double g = 1.0;
    for (int i = 2; i <= mi.a; ++i) g *= i;
    for (int i = 2; i <= mi.b; ++i) g *= i;
    for (int i = 2; i <= mi.c; ++i) g *= i;
    return f / g;
}

SymTensor3::SymTensor3(int order, std::vector<double> coeffs)
    : order_(order), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != sym_dim(order))
        throw std::invalid_argument("SymTensor3: coefficient count does not match order");
}

double SymTensor3::norm() const {
    const auto& mis = multi_indices(order_);
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        s += multinomial(mis[i]) * coeffs_[i] * coeffs_[i];
    return std::sqrt(s);
}

SymTensor3& SymTensor3::operator+=(const SymTensor3& other) {
    if (other.order_ != order_)
        throw std::invalid_argument("SymTensor3: order mismatch in +=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SymTensor3& SymTensor3::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

SymTensor3 operator-(const SymTensor3& lhs, const SymTensor3& rhs) {
    SymTensor3 out = lhs;
    out += rhs * -1.0;
    return out;
}

SymTensor3 SymTensor3::delta() {
    SymTensor3 d(2);
    d.at({2, 0, 0}) = 1.0;
    d.at({0, 2, 0}) = 1.0;
    d.at({0, 0, 2}) = 1.0;
    return d;
}

SymTensor3 SymTensor3::trace() const {
    if (order_ < 2) throw std::invalid_argument("SymTensor3::trace: order < 2");
    SymTensor3 out(order_ - 2);
    for (const MultiIndex& mi : multi_indices(order_ - 2)) {
        out.at(mi) = at({mi.a + 2, mi.b, mi.c}) + at({mi.a, mi.b + 2, mi.c}) +
                     at({mi.a, mi.b, mi.c + 2});
    }
    return out;
}

Rotation3 Rotation3::identity() {
    Rotation3 r;
    for (int i = 0; i < 3; ++i) r.m[i][i] = 1.0;
    return r;
}

Rotation3 Rotation3::from_quaternion(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n; x /= n; y /= n; z /= n;
    Rotation3 r;
    r.m[0] = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)};
    r.m[1] = {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)};
    r.m[2] = {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)};
    return r;
}

Rotation3 Rotation3::reflection(int axis) {
    Rotation3 r = identity();
    r.m[axis][axis] = -1.0;
    return r;
}

Rotation3 Rotation3::compose(const Rotation3& other) const {
    Rotation3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[i][k] * other.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

Rotation3 Rotation3::transposed() const {
    Rotation3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
}

double Rotation3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double Rotation3::orthogonality_error() const {
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[k][i] * m[k][j];
            err = std::max(err, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    return err;
}

namespace {
std::size_t pow3(int n) {
    std::size_t p = 1;
    for (int i = 0; i < n; ++i) p *= 3;
    return p;
}
} // namespace

GeneralTensor::GeneralTensor(int rank) : rank_(rank), data_(pow3(rank), 0.0) {
    if (rank > 15) throw std::invalid_argument("GeneralTensor: rank too large for dense storage");
}

double& GeneralTensor::at(const std::vector<int>& idx) {
    std::size_t p = 0;
    for (int i = rank_ - 1; i >= 0; --i) p = p * 3 + idx[i];
    return data_[p];
}

double GeneralTensor::at(const std::vector<int>& idx) const {
    return const_cast<GeneralTensor*>(this)->at(idx);
}

GeneralTensor GeneralTensor::from_sym(const SymTensor3& t) {
    GeneralTensor out(t.order());
    std::vector<int> idx(t.order(), 0);
    for (std::size_t p = 0; p < out.size(); ++p) {
        std::size_t q = p;
        MultiIndex mi;
        for (int i = 0; i < t.order(); ++i) {
            int d = static_cast<int>(q % 3);
            q /= 3;
            (d == 0 ? mi.a : d == 1 ? mi.b : mi.c)++;
        }
        out[p] = t.at(mi);
    }
    return out;
}

GeneralTensor rotate(const GeneralTensor& t, const Rotation3& a) {
    // One index at a time: contract axis k of t with A.
    GeneralTensor cur = t;
    const int n = t.rank();
    const std::size_t total = cur.size();
    for (int k = 0; k < n; ++k) {
        GeneralTensor next(n);
        const std::size_t stride = pow3(k);
        for (std::size_t base = 0; base < total; ++base) {
            const int ik = static_cast<int>((base / stride) % 3);
            if (ik != 0) continue; // visit each fiber once, at ik == 0
            const double v0 = cur[base];
            const double v1 = cur[base + stride];
            const double v2 = cur[base + 2 * stride];
            for (int i = 0; i < 3; ++i)
                next[base + i * stride] = a.m[i][0] * v0 + a.m[i][1] * v1 + a.m[i][2] * v2;
        }
        cur = std::move(next);
    }
    return cur;
}

SymTensor3 rotate(const SymTensor3& t, const Rotation3& a) {
    return symmetrize(rotate(GeneralTensor::from_sym(t), a));
}

GeneralTensor outer(const GeneralTensor& t, const GeneralTensor& u) {
    GeneralTensor out(t.rank() + u.rank());
    const std::size_t nt = t.size();
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double uj = u[j];
        for (std::size_t i = 0; i < nt; ++i) out[j * nt + i] = t[i] * uj;
    }
    return out;
}

GeneralTensor outer(const SymTensor3& t, const SymTensor3& u) {
    return outer(GeneralTensor::from_sym(t), GeneralTensor::from_sym(u));
}

SymTensor3 symmetrize(const GeneralTensor& t) {
    // The symmetrized tensor is constant on index multisets; its compact
    // coefficient is the mean over the distinct arrangements of the multiset.
    const int n = t.rank();
    SymTensor3 out(n);
    std::vector<double> sums(sym_dim(n), 0.0);
    for (std::size_t p = 0; p < t.size(); ++p) {
        std::size_t q = p;
        MultiIndex mi;
        for (int i = 0; i < n; ++i) {
            int d = static_cast<int>(q % 3);
            q /= 3;
            (d == 0 ? mi.a : d == 1 ? mi.b : mi.c)++;
        }
        sums[multi_index_pos(mi)] += t[p];
    }
    const auto& mis = multi_indices(n);
    for (int i = 0; i < sym_dim(n); ++i) out[i] = sums[i] / multinomial(mis[i]);
    return out;
}

} // namespace momenta
