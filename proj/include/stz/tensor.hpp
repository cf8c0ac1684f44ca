#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace stz {

using cxd = std::complex<double>;
using Index = Eigen::Index;
using Dims3 = std::array<Index, 3>;

// A factor matrix U_i of a Tucker decomposition, shape n_i x r_i with
// r_i <= n_i. Column semi-orthogonality (U^H U = I) is a property of how a
// matrix is produced, checked where required, not carried by the type.
using FactorMatrix = Eigen::MatrixXcd;

// Dense third-order complex tensor. Linearization is fixed: mode-1 index
// fastest, then mode-2, then mode-3, i.e. entry (i,j,k) of an n1 x n2 x n3
// tensor lives at i + n1*(j + n2*k). Every serialized mask and value stream
// downstream inherits this order.
class ComplexTensor3 {
  public:
    ComplexTensor3() : dims_{0, 0, 0} {}

    ComplexTensor3(Index n1, Index n2, Index n3);

    static ComplexTensor3 from_data(Dims3 dims, std::vector<cxd> data);

    const Dims3& dims() const { return dims_; }
    Index dim(int mode) const { return dims_[static_cast<std::size_t>(mode)]; }
    Index size() const { return static_cast<Index>(data_.size()); }

    Index linear_index(Index i, Index j, Index k) const {
        return i + dims_[0] * (j + dims_[1] * k);
    }

    cxd& operator()(Index i, Index j, Index k) { return data_[static_cast<std::size_t>(linear_index(i, j, k))]; }
    const cxd& operator()(Index i, Index j, Index k) const {
        return data_[static_cast<std::size_t>(linear_index(i, j, k))];
    }

    cxd& operator[](Index flat) { return data_[static_cast<std::size_t>(flat)]; }
    const cxd& operator[](Index flat) const { return data_[static_cast<std::size_t>(flat)]; }

    cxd* data() { return data_.data(); }
    const cxd* data() const { return data_.data(); }

    double norm() const;
    double squared_norm() const;
    bool all_finite() const;
    Index nonzero_count() const;

    void set_zero();

    ComplexTensor3& operator+=(const ComplexTensor3& other);
    ComplexTensor3& operator-=(const ComplexTensor3& other);
    ComplexTensor3& operator*=(cxd scalar);

    friend ComplexTensor3 operator+(ComplexTensor3 a, const ComplexTensor3& b) { return a += b; }
    friend ComplexTensor3 operator-(ComplexTensor3 a, const ComplexTensor3& b) { return a -= b; }
    friend ComplexTensor3 operator*(cxd scalar, ComplexTensor3 t) { return t *= scalar; }

  private:
    Dims3 dims_;
    std::vector<cxd> data_;
};

// Mode-m unfolding, shape (dims[m], product of the other two dims). The
// remaining modes are ordered cyclically ascending: for mode m the column
// index is idx[m+1] + dims[m+1]*idx[m+2] (indices mod 3), with mode m+1
// fastest. fold() is the exact inverse.
Eigen::MatrixXcd unfold(const ComplexTensor3& t, int mode);
ComplexTensor3 fold(const Eigen::MatrixXcd& m, const Dims3& dims, int mode);

// Mode-m product contracting the tensor's mode-m dimension against the rows
// of `m`: result(..., k, ...) = sum_j t(..., j, ...) * m(j, k). Requires
// m.rows() == t.dim(mode); the result has m.cols() at that mode. This is
// the "analysis" orientation; synthesis with an n x r factor goes through
// tucker_reconstruct, which contracts against the factor's columns.
ComplexTensor3 mode_product(const ComplexTensor3& t, const Eigen::MatrixXcd& m, int mode);

// [[core; U1, U2, U3]]: core r1 x r2 x r3, factors n_i x r_i, result
// n1 x n2 x n3. Mode products over distinct modes commute, so the
// application order does not matter.
ComplexTensor3 tucker_reconstruct(const ComplexTensor3& core, const FactorMatrix& u1,
                                  const FactorMatrix& u2, const FactorMatrix& u3);

// [[t; U1^H, U2^H, U3^H]]: projects an n1 x n2 x n3 tensor onto the factor
// subspaces, result r1 x r2 x r3.
ComplexTensor3 tucker_project(const ComplexTensor3& t, const FactorMatrix& u1,
                              const FactorMatrix& u2, const FactorMatrix& u3);

// ||a - b||_F / ||b||_F. b must be nonzero.
double relative_error(const ComplexTensor3& a, const ComplexTensor3& b);

namespace detail {
// result_(mode) = m * t_(mode); shared kernel for both product directions.
ComplexTensor3 apply_mode(const ComplexTensor3& t, const Eigen::MatrixXcd& m, int mode);
}  // namespace detail

}  // namespace stz
