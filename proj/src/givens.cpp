#include "stz/givens.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "stz/linalg.hpp"

namespace stz {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_to_2pi(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    if (y >= kTwoPi) y = 0.0;
    return y;
}

// Runs the elimination sweep in place. For pair (i, j) the rotation G_ij^H
// zeroes X(j, i) against the pivot X(i, i); the pivot keeps its phase and
// grows to the two-entry hypotenuse. Returns the residual diagonal phases.
std::vector<cxd> run_elimination(Eigen::MatrixXcd& x, GivensParams* store) {
    const Index n = x.rows();
    const Index r = x.cols();
    std::vector<cxd> diag_phases(static_cast<std::size_t>(r), cxd(1.0, 0.0));

    for (Index i = 0; i < r; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const cxd a = x(i, i);
            const cxd b = x(j, i);
            const double amag = std::abs(a);
            const double bmag = std::abs(b);

            double eta = 0.0;
            double theta = 0.0;
            if (bmag > 0.0) {
                eta = std::atan2(bmag, amag);
                const double alpha = amag > 0.0 ? std::arg(a) : 0.0;
                theta = wrap_to_2pi(alpha - std::arg(b) + M_PI);

                const double c = std::cos(eta);
                const double s = std::sin(eta);
                const cxd eth = std::polar(1.0, theta);
                for (Index col = 0; col < r; ++col) {
                    const cxd xi = x(i, col);
                    const cxd xj = x(j, col);
                    x(i, col) = c * xi - eth * s * xj;
                    x(j, col) = std::conj(eth) * s * xi + c * xj;
                }
                x(j, i) = cxd(0.0, 0.0);
            }
            if (store != nullptr) {
                const Index k = givens_pair_index(n, i, j);
                store->etas[static_cast<std::size_t>(k)] = eta;
                store->thetas[static_cast<std::size_t>(k)] = theta;
            }
        }
        const cxd pivot = x(i, i);
        const double pmag = std::abs(pivot);
        diag_phases[static_cast<std::size_t>(i)] = pmag > 0.0 ? pivot / pmag : cxd(1.0, 0.0);
    }
    return diag_phases;
}

}  // namespace

void GivensParams::validate() const {
    if (n < 1 || r < 1 || r > n) throw ContractError("GivensParams: bad shape");
    const std::size_t expect = static_cast<std::size_t>(pair_count());
    if (etas.size() != expect || thetas.size() != expect) {
        throw ContractError("GivensParams: angle sequence length mismatch");
    }
    for (double e : etas) {
        if (!(e >= 0.0 && e <= M_PI)) throw ContractError("GivensParams: eta out of [0, pi]");
    }
    for (double t : thetas) {
        if (!(t >= 0.0 && t < kTwoPi)) throw ContractError("GivensParams: theta out of [0, 2pi)");
    }
}

Index givens_pair_index(Index n, Index i, Index j) {
    // 1-based map k = (2n - i)(i - 1)/2 + j - i, shifted to 0-based storage.
    const Index i1 = i + 1;
    const Index j1 = j + 1;
    return (2 * n - i1) * (i1 - 1) / 2 + (j1 - i1) - 1;
}

std::pair<FactorMatrix, ComplexTensor3> normalize_column_phases(const FactorMatrix& u,
                                                                const ComplexTensor3& core,
                                                                int mode) {
    if (mode < 0 || mode > 2) throw ContractError("normalize_column_phases: bad mode");
    const Index r = u.cols();
    if (core.dim(mode) != r) {
        throw ContractError("normalize_column_phases: core mode dimension does not match factor");
    }
    if (!is_semi_orthogonal(u, 1e-8)) {
        throw ContractError("normalize_column_phases: factor is not semi-orthogonal");
    }
    for (Index j = 0; j < r; ++j) {
        if (u.col(j).norm() < 1e-12) {
            throw ContractError("normalize_column_phases: degenerate (zero) column " +
                                std::to_string(j));
        }
    }

    // Dry-run elimination: the extracted angles are invariant to column
    // phases, so the residual diagonal phases are exactly the gauge to strip.
    Eigen::MatrixXcd work = u;
    const std::vector<cxd> phases = run_elimination(work, nullptr);

    FactorMatrix u_fixed = u;
    for (Index j = 0; j < r; ++j) {
        u_fixed.col(j) *= std::conj(phases[static_cast<std::size_t>(j)]);
    }

    // Scale the core's mode-m slices by the stripped phases so that
    // [[core; ...]] is unchanged.
    ComplexTensor3 core_fixed = core;
    const Dims3& d = core.dims();
    Index idx[3];
    for (Index k = 0; k < d[2]; ++k) {
        idx[2] = k;
        for (Index jj = 0; jj < d[1]; ++jj) {
            idx[1] = jj;
            for (Index ii = 0; ii < d[0]; ++ii) {
                idx[0] = ii;
                core_fixed(ii, jj, k) =
                    core(ii, jj, k) * phases[static_cast<std::size_t>(idx[mode])];
            }
        }
    }
    return {std::move(u_fixed), std::move(core_fixed)};
}

GivensParams givens_decompose(const FactorMatrix& u) {
    const Index n = u.rows();
    const Index r = u.cols();
    if (n < 1 || r < 1 || r > n) throw ContractError("givens_decompose: bad shape");
    if (!is_semi_orthogonal(u, 1e-8)) {
        throw ContractError("givens_decompose: factor is not semi-orthogonal");
    }

    GivensParams p;
    p.n = n;
    p.r = r;
    p.etas.assign(static_cast<std::size_t>(p.pair_count()), 0.0);
    p.thetas.assign(static_cast<std::size_t>(p.pair_count()), 0.0);

    Eigen::MatrixXcd work = u;
    run_elimination(work, &p);

    Eigen::MatrixXcd ibar = Eigen::MatrixXcd::Zero(n, r);
    for (Index i = 0; i < r; ++i) ibar(i, i) = cxd(1.0, 0.0);
    const double residual = (work - ibar).norm();
    if (residual > 1e-8 * std::sqrt(static_cast<double>(r))) {
        throw PhaseNormalizationError(
            "givens_decompose: elimination residual " + std::to_string(residual) +
            " indicates column phases were not normalized");
    }
    p.phase_absorbed = true;
    return p;
}

FactorMatrix givens_reconstruct(const GivensParams& p) {
    p.validate();
    const Index n = p.n;
    const Index r = p.r;
    FactorMatrix x = FactorMatrix::Zero(n, r);
    for (Index i = 0; i < r; ++i) x(i, i) = cxd(1.0, 0.0);

    // Reverse elimination order: the product's rightmost rotation acts first.
    for (Index i = r - 1; i >= 0; --i) {
        for (Index j = n - 1; j >= i + 1; --j) {
            const Index k = givens_pair_index(n, i, j);
            const double eta = p.etas[static_cast<std::size_t>(k)];
            const double theta = p.thetas[static_cast<std::size_t>(k)];
            if (eta == 0.0) continue;  // exact identity rotation
            const double c = std::cos(eta);
            const double s = std::sin(eta);
            const cxd eth = std::polar(1.0, theta);
            for (Index col = 0; col < r; ++col) {
                const cxd xi = x(i, col);
                const cxd xj = x(j, col);
                x(i, col) = c * xi + eth * s * xj;
                x(j, col) = -std::conj(eth) * s * xi + c * xj;
            }
        }
    }
    return x;
}

}  // namespace stz
