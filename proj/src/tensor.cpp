#include "stz/tensor.hpp"

#include <cmath>

#include "stz/errors.hpp"

namespace stz {

ComplexTensor3::ComplexTensor3(Index n1, Index n2, Index n3) : dims_{n1, n2, n3} {
    if (n1 <= 0 || n2 <= 0 || n3 <= 0) {
        throw ContractError("ComplexTensor3: dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(n1 * n2 * n3), cxd(0.0, 0.0));
}

ComplexTensor3 ComplexTensor3::from_data(Dims3 dims, std::vector<cxd> data) {
    ComplexTensor3 t(dims[0], dims[1], dims[2]);
    if (data.size() != t.data_.size()) {
        throw ContractError("ComplexTensor3::from_data: data length does not match dims");
    }
    t.data_ = std::move(data);
    return t;
}

double ComplexTensor3::squared_norm() const {
    double s = 0.0;
    for (const cxd& v : data_) s += std::norm(v);
    return s;
}

double ComplexTensor3::norm() const { return std::sqrt(squared_norm()); }

bool ComplexTensor3::all_finite() const {
    for (const cxd& v : data_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

Index ComplexTensor3::nonzero_count() const {
    Index n = 0;
    for (const cxd& v : data_) {
        if (v != cxd(0.0, 0.0)) ++n;
    }
    return n;
}

void ComplexTensor3::set_zero() { std::fill(data_.begin(), data_.end(), cxd(0.0, 0.0)); }

ComplexTensor3& ComplexTensor3::operator+=(const ComplexTensor3& other) {
    if (dims_ != other.dims_) throw ContractError("tensor +=: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexTensor3& ComplexTensor3::operator-=(const ComplexTensor3& other) {
    if (dims_ != other.dims_) throw ContractError("tensor -=: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexTensor3& ComplexTensor3::operator*=(cxd scalar) {
    for (cxd& v : data_) v *= scalar;
    return *this;
}

static void check_mode(int mode) {
    if (mode < 0 || mode > 2) throw ContractError("mode index must be 0, 1 or 2");
}

Eigen::MatrixXcd unfold(const ComplexTensor3& t, int mode) {
    check_mode(mode);
    const Dims3& d = t.dims();
    const int a = (mode + 1) % 3;
    const int b = (mode + 2) % 3;
    const Index rows = d[static_cast<std::size_t>(mode)];
    const Index da = d[static_cast<std::size_t>(a)];
    const Index db = d[static_cast<std::size_t>(b)];

    if (mode == 0) {
        // Contiguous: linearization is exactly column-major n1 x (n2*n3).
        return Eigen::Map<const Eigen::MatrixXcd>(t.data(), rows, da * db);
    }

    Eigen::MatrixXcd m(rows, da * db);
    Index idx[3];
    for (Index kb = 0; kb < db; ++kb) {
        idx[b] = kb;
        for (Index ka = 0; ka < da; ++ka) {
            idx[a] = ka;
            const Index col = ka + da * kb;
            for (Index r = 0; r < rows; ++r) {
                idx[mode] = r;
                m(r, col) = t(idx[0], idx[1], idx[2]);
            }
        }
    }
    return m;
}

ComplexTensor3 fold(const Eigen::MatrixXcd& m, const Dims3& dims, int mode) {
    check_mode(mode);
    const int a = (mode + 1) % 3;
    const int b = (mode + 2) % 3;
    const Index da = dims[static_cast<std::size_t>(a)];
    const Index db = dims[static_cast<std::size_t>(b)];
    if (m.rows() != dims[static_cast<std::size_t>(mode)] || m.cols() != da * db) {
        throw ContractError("fold: matrix shape does not match target dims");
    }

    ComplexTensor3 t(dims[0], dims[1], dims[2]);
    Index idx[3];
    for (Index kb = 0; kb < db; ++kb) {
        idx[b] = kb;
        for (Index ka = 0; ka < da; ++ka) {
            idx[a] = ka;
            const Index col = ka + da * kb;
            for (Index r = 0; r < m.rows(); ++r) {
                idx[mode] = r;
                t(idx[0], idx[1], idx[2]) = m(r, col);
            }
        }
    }
    return t;
}

namespace detail {

ComplexTensor3 apply_mode(const ComplexTensor3& t, const Eigen::MatrixXcd& m, int mode) {
    check_mode(mode);
    if (m.cols() != t.dim(mode)) {
        throw ContractError("apply_mode: matrix columns do not match tensor mode dimension");
    }
    Dims3 out_dims = t.dims();
    out_dims[static_cast<std::size_t>(mode)] = m.rows();
    Eigen::MatrixXcd prod = m * unfold(t, mode);
    return fold(prod, out_dims, mode);
}

}  // namespace detail

ComplexTensor3 mode_product(const ComplexTensor3& t, const Eigen::MatrixXcd& m, int mode) {
    check_mode(mode);
    if (m.rows() != t.dim(mode)) {
        throw ContractError("mode_product: matrix rows do not match tensor mode dimension");
    }
    return detail::apply_mode(t, m.transpose(), mode);
}

ComplexTensor3 tucker_reconstruct(const ComplexTensor3& core, const FactorMatrix& u1,
                                  const FactorMatrix& u2, const FactorMatrix& u3) {
    const FactorMatrix* u[3] = {&u1, &u2, &u3};
    for (int mode = 0; mode < 3; ++mode) {
        if (u[mode]->cols() != core.dim(mode)) {
            throw ContractError("tucker_reconstruct: factor columns do not match core dims");
        }
    }
    ComplexTensor3 t = core;
    for (int mode = 0; mode < 3; ++mode) t = detail::apply_mode(t, *u[mode], mode);
    return t;
}

ComplexTensor3 tucker_project(const ComplexTensor3& t, const FactorMatrix& u1,
                              const FactorMatrix& u2, const FactorMatrix& u3) {
    const FactorMatrix* u[3] = {&u1, &u2, &u3};
    for (int mode = 0; mode < 3; ++mode) {
        if (u[mode]->rows() != t.dim(mode)) {
            throw ContractError("tucker_project: factor rows do not match tensor dims");
        }
    }
    ComplexTensor3 out = t;
    for (int mode = 0; mode < 3; ++mode) out = detail::apply_mode(out, u[mode]->adjoint(), mode);
    return out;
}

double relative_error(const ComplexTensor3& a, const ComplexTensor3& b) {
    if (a.dims() != b.dims()) throw ContractError("relative_error: dimension mismatch");
    const double ref = b.norm();
    if (ref == 0.0) throw ContractError("relative_error: reference tensor is zero");
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s) / ref;
}

}  // namespace stz
