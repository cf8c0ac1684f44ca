#include "stz/hosvd.hpp"

#include <cmath>
#include <string>

#include "stz/errors.hpp"

namespace stz {

namespace {

// Leading `rank` left singular vectors of the mode unfolding. Wide
// unfoldings (the common case) go through the Gram matrix of the rows;
// tall ones through the one-sided Jacobi SVD directly.
FactorMatrix mode_basis(const ComplexTensor3& t, int mode, Index rank) {
    const Eigen::MatrixXcd a = unfold(t, mode);
    FactorMatrix u;
    try {
        if (a.cols() >= a.rows()) {
            HermitianEig eig = hermitian_eig(a * a.adjoint());
            u = eig.vectors.leftCols(rank);
        } else {
            ThinSvd svd = thin_svd(a);
            u = svd.u.leftCols(rank);
        }
    } catch (const NumericError& e) {
        throw NumericError("hosvd: decomposition failed at mode " + std::to_string(mode + 1) +
                           ": " + e.what());
    }
    phase_fix_columns(u);
    return u;
}

}  // namespace

HosvdResult hosvd(const ComplexTensor3& t, const Dims3& ranks) {
    for (int mode = 0; mode < 3; ++mode) {
        const Index r = ranks[static_cast<std::size_t>(mode)];
        if (r < 1 || r > t.dim(mode)) {
            throw ContractError("hosvd: rank out of range at mode " + std::to_string(mode + 1));
        }
    }
    HosvdResult out;
    for (int mode = 0; mode < 3; ++mode) {
        out.factors[static_cast<std::size_t>(mode)] =
            mode_basis(t, mode, ranks[static_cast<std::size_t>(mode)]);
    }
    out.core = tucker_project(t, out.factors[0], out.factors[1], out.factors[2]);
    return out;
}

HosvdBasis hosvd_full(const ComplexTensor3& t) {
    HosvdBasis out;
    for (int mode = 0; mode < 3; ++mode) {
        out.bases[static_cast<std::size_t>(mode)] = mode_basis(t, mode, t.dim(mode));
    }
    out.core = tucker_project(t, out.bases[0], out.bases[1], out.bases[2]);
    return out;
}

double hosvd_truncation_error(const HosvdBasis& basis, const Dims3& ranks, double tensor_norm) {
    if (tensor_norm <= 0.0) throw ContractError("hosvd_truncation_error: zero reference norm");
    double kept = 0.0;
    for (Index k = 0; k < ranks[2]; ++k)
        for (Index j = 0; j < ranks[1]; ++j)
            for (Index i = 0; i < ranks[0]; ++i) kept += std::norm(basis.core(i, j, k));
    const double total = tensor_norm * tensor_norm;
    const double err2 = std::max(0.0, total - kept);
    return std::sqrt(err2) / tensor_norm;
}

}  // namespace stz
