#ifndef MOMENTA_SYM_TENSOR_HPP
#define MOMENTA_SYM_TENSOR_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace momenta {

/// Exponent triple (a,b,c) with a+b+c = order; identifies one independent
/// coefficient of a totally symmetric tensor over R^3.
struct MultiIndex {
    int a = 0, b = 0, c = 0;

    int order() const { return a + b + c; }
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Number of independent coefficients of a symmetric tensor of the given order:
/// (l+1)(l+2)/2.
inline int sym_dim(int order) { return (order + 1) * (order + 2) / 2; }

/// All multi-indices of one order in canonical storage order
/// (descending in a, then descending in b).
const std::vector<MultiIndex>& multi_indices(int order);

/// Position of a multi-index within the canonical order.
int multi_index_pos(const MultiIndex& mi);

/// Number of distinct index-tuple arrangements of a multi-index:
/// order! / (a! b! c!).
double multinomial(const MultiIndex& mi);

/// Totally symmetric tensor over R^3 in compact storage. Coefficients carry no
/// multiplicity weighting: coeff(mi) is the value of any dense entry whose
/// index multiset matches mi.
class SymTensor3 {
public:
    SymTensor3() = default;
    explicit SymTensor3(int order) : order_(order), coeffs_(sym_dim(order), 0.0) {}
    SymTensor3(int order, std::vector<double> coeffs);

    int order() const { return order_; }
    int size() const { return static_cast<int>(coeffs_.size()); }

    double& operator[](int i) { return coeffs_[i]; }
    double operator[](int i) const { return coeffs_[i]; }
    double& at(const MultiIndex& mi) { return coeffs_[multi_index_pos(mi)]; }
    double at(const MultiIndex& mi) const { return coeffs_[multi_index_pos(mi)]; }

    const std::vector<double>& coeffs() const { return coeffs_; }

    /// Frobenius norm of the dense tensor this represents
    /// (multiplicity-weighted sum of squared coefficients).
    double norm() const;

    SymTensor3& operator+=(const SymTensor3& other);
    SymTensor3& operator*=(double s);
    friend SymTensor3 operator+(SymTensor3 lhs, const SymTensor3& rhs) { return lhs += rhs; }
    friend SymTensor3 operator*(SymTensor3 lhs, double s) { return lhs *= s; }
    friend SymTensor3 operator*(double s, SymTensor3 rhs) { return rhs *= s; }
    friend SymTensor3 operator-(const SymTensor3& lhs, const SymTensor3& rhs);

    /// Kronecker delta as the order-2 symmetric tensor.
    static SymTensor3 delta();

    /// Single trace over any index pair; zero tensor of order-2 lower.
    /// Requires order >= 2.
    SymTensor3 trace() const;

private:
    int order_ = 0;
    std::vector<double> coeffs_{0.0};
};

/// Orthogonal transform of R^3 (rotation or reflection).
struct Rotation3 {
    std::array<std::array<double, 3>, 3> m{};

    static Rotation3 identity();
    /// From a (not necessarily unit) quaternion; always a proper rotation.
    static Rotation3 from_quaternion(double w, double x, double y, double z);
    /// Flip the given axis: determinant -1.
    static Rotation3 reflection(int axis);

    Rotation3 compose(const Rotation3& other) const; // this * other
    Rotation3 transposed() const;
    double det() const;
    /// Max deviation of A^T A from the identity.
    double orthogonality_error() const;
};

/// Dense tensor of small rank; the expansion target for intermediates and the
/// brute-force reference path. Entries indexed x-fastest per position.
class GeneralTensor {
public:
    GeneralTensor() = default;
    explicit GeneralTensor(int rank);

    int rank() const { return rank_; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return data_.size(); }

    double& at(const std::vector<int>& idx);
    double at(const std::vector<int>& idx) const;

    static GeneralTensor from_sym(const SymTensor3& t);

private:
    int rank_ = 0;
    std::vector<double> data_{std::vector<double>(1, 0.0)};
};

/// Active transformation of every index: T'_{i1..il} = A_{i1 j1}..A_{il jl} T_{j1..jl}.
SymTensor3 rotate(const SymTensor3& t, const Rotation3& a);
GeneralTensor rotate(const GeneralTensor& t, const Rotation3& a);

/// Outer (tensor) product; result rank is the sum of the factor ranks.
GeneralTensor outer(const GeneralTensor& t, const GeneralTensor& u);
GeneralTensor outer(const SymTensor3& t, const SymTensor3& u);

/// Average over all index permutations, returned in compact form.
SymTensor3 symmetrize(const GeneralTensor& t);

} // namespace momenta

#endif
