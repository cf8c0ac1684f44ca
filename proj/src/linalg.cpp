#include "stz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "stz/errors.hpp"

namespace stz {

namespace {

constexpr double kJacobiTol = 1e-12;
constexpr int kMaxSweeps = 64;

using cxd = std::complex<double>;

double sign_or_one(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Inner 2x2 symmetric Schur step for [[app, g],[g, aqq]] with g > 0.
void sym_schur2(double app, double aqq, double g, double& c, double& s) {
    const double tau = (aqq - app) / (2.0 * g);
    const double t = sign_or_one(tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    c = 1.0 / std::sqrt(1.0 + t * t);
    s = t * c;
}

// Stable descending sort of values with a permutation; equal values keep
// their pre-sort (sweep) order.
std::vector<Eigen::Index> descending_permutation(const Eigen::VectorXd& vals) {
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(vals.size()));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return vals(a) > vals(b); });
    return perm;
}

}  // namespace

HermitianEig hermitian_eig(const Eigen::MatrixXcd& a_in) {
    if (a_in.rows() != a_in.cols()) throw ContractError("hermitian_eig: matrix must be square");
    const Eigen::Index n = a_in.rows();

    Eigen::MatrixXcd a = 0.5 * (a_in + a_in.adjoint());
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);

    const double scale = a.norm();
    if (scale > 0.0) {
        bool converged = false;
        for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
            double off = 0.0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
            if (std::sqrt(2.0 * off) <= kJacobiTol * scale) {
                converged = true;
                break;
            }
            for (Eigen::Index p = 0; p + 1 < n; ++p) {
                for (Eigen::Index q = p + 1; q < n; ++q) {
                    const cxd apq = a(p, q);
                    const double g = std::abs(apq);
                    if (g <= kJacobiTol * scale * 1e-4) continue;
                    const double app = a(p, p).real();
                    const double aqq = a(q, q).real();
                    double c, s;
                    sym_schur2(app, aqq, g, c, s);
                    // J = D * R with D = diag(1, e^{-i phi}), phi = arg(apq);
                    // columns p,q get J from the right, rows get J^H from
                    // the left, eigenvectors accumulate J on columns.
                    const cxd eph = apq / g;           // e^{i phi}
                    const cxd emph = std::conj(eph);   // e^{-i phi}

                    // A <- A * J
                    for (Eigen::Index r = 0; r < n; ++r) {
                        const cxd arp = a(r, p);
                        const cxd arq = a(r, q);
                        a(r, p) = c * arp - s * emph * arq;
                        a(r, q) = s * arp + c * emph * arq;
                    }
                    // A <- J^H * A
                    for (Eigen::Index col = 0; col < n; ++col) {
                        const cxd apc = a(p, col);
                        const cxd aqc = a(q, col);
                        a(p, col) = c * apc - s * eph * aqc;
                        a(q, col) = s * apc + c * eph * aqc;
                    }
                    a(p, q) = cxd(0.0, 0.0);
                    a(q, p) = cxd(0.0, 0.0);
                    for (Eigen::Index r = 0; r < n; ++r) {
                        const cxd vrp = v(r, p);
                        const cxd vrq = v(r, q);
                        v(r, p) = c * vrp - s * emph * vrq;
                        v(r, q) = s * vrp + c * emph * vrq;
                    }
                }
            }
        }
        if (!converged) {
            double off = 0.0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
            if (std::sqrt(2.0 * off) > kJacobiTol * scale) {
                throw NumericError("hermitian_eig: Jacobi sweep did not converge");
            }
        }
    }

    Eigen::VectorXd diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = a(i, i).real();

    const auto perm = descending_permutation(diag);
    HermitianEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = diag(perm[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = v.col(perm[static_cast<std::size_t>(i)]);
    }
    return out;
}

ThinSvd thin_svd(const Eigen::MatrixXcd& a) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (m < n) throw ContractError("thin_svd: requires rows >= cols");

    Eigen::MatrixXcd w = a;
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
    const double scale = a.norm();

    if (scale > 0.0) {
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            bool rotated = false;
            for (Eigen::Index p = 0; p + 1 < n; ++p) {
                for (Eigen::Index q = p + 1; q < n; ++q) {
                    const cxd gamma = w.col(p).dot(w.col(q));  // w_p^H w_q
                    const double alpha = w.col(p).squaredNorm();
                    const double beta = w.col(q).squaredNorm();
                    const double g = std::abs(gamma);
                    if (g <= kJacobiTol * std::sqrt(alpha * beta) || alpha == 0.0 || beta == 0.0) {
                        continue;
                    }
                    rotated = true;
                    double c, s;
                    sym_schur2(alpha, beta, g, c, s);
                    const cxd eph = gamma / g;          // e^{i phi}
                    const cxd emph = std::conj(eph);
                    // Rotate the (implicitly phase-aligned) column pair in
                    // both the working matrix and the right factor.
                    for (Eigen::Index r = 0; r < m; ++r) {
                        const cxd wp = w(r, p);
                        const cxd wq = w(r, q);
                        w(r, p) = c * wp - s * emph * wq;
                        w(r, q) = s * eph * wp + c * wq;
                    }
                    for (Eigen::Index r = 0; r < n; ++r) {
                        const cxd vp = v(r, p);
                        const cxd vq = v(r, q);
                        v(r, p) = c * vp - s * emph * vq;
                        v(r, q) = s * eph * vp + c * vq;
                    }
                }
            }
            if (!rotated) break;
            if (sweep == kMaxSweeps - 1) {
                throw NumericError("thin_svd: one-sided Jacobi did not converge");
            }
        }
    }

    Eigen::VectorXd sigma(n);
    for (Eigen::Index j = 0; j < n; ++j) sigma(j) = w.col(j).norm();

    const auto perm = descending_permutation(sigma);
    ThinSvd out;
    out.u.resize(m, n);
    out.s.resize(n);
    out.v.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = perm[static_cast<std::size_t>(j)];
        out.s(j) = sigma(src);
        out.v.col(j) = v.col(src);
        out.u.col(j) = w.col(src);
    }

    const double sigma_max = out.s.size() > 0 ? out.s(0) : 0.0;
    const double null_tol = sigma_max * 1e-13;
    std::vector<Eigen::Index> null_cols;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (out.s(j) > null_tol && out.s(j) > 0.0) {
            out.u.col(j) /= out.s(j);
        } else {
            null_cols.push_back(j);
        }
    }
    // Complete null columns against the already-orthonormal ones with the
    // first canonical basis vector that survives; deterministic scan order.
    for (std::size_t idx = 0; idx < null_cols.size(); ++idx) {
        const Eigen::Index j = null_cols[idx];
        out.rank_deficient = true;
        bool placed = false;
        for (Eigen::Index e = 0; e < m && !placed; ++e) {
            Eigen::VectorXcd cand = Eigen::VectorXcd::Zero(m);
            cand(e) = cxd(1.0, 0.0);
            for (Eigen::Index prev = 0; prev < n; ++prev) {
                if (prev == j) continue;
                const bool prev_null =
                    std::find(null_cols.begin(), null_cols.end(), prev) != null_cols.end();
                const bool prev_ready = !prev_null || prev < j;
                if (!prev_ready) continue;
                cand -= out.u.col(prev).dot(cand) * out.u.col(prev);
            }
            const double nrm = cand.norm();
            if (nrm > 0.5) {
                out.u.col(j) = cand / nrm;
                placed = true;
            }
        }
        if (!placed) throw NumericError("thin_svd: failed to complete null column");
    }
    return out;
}

Eigen::MatrixXcd polar_factor(const Eigen::MatrixXcd& a, bool* rank_deficient) {
    ThinSvd svd = thin_svd(a);
    if (rank_deficient != nullptr) *rank_deficient = svd.rank_deficient;
    return svd.u * svd.v.adjoint();
}

double spectral_norm(const Eigen::MatrixXcd& a) {
    if (a.size() == 0) return 0.0;
    const Eigen::MatrixXcd gram =
        a.rows() <= a.cols() ? Eigen::MatrixXcd(a * a.adjoint()) : Eigen::MatrixXcd(a.adjoint() * a);
    HermitianEig eig = hermitian_eig(gram);
    const double top = eig.values.size() > 0 ? std::max(eig.values(0), 0.0) : 0.0;
    return std::sqrt(top);
}

void phase_fix_columns(Eigen::MatrixXcd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double mag = std::abs(m(i, j));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (best <= 0.0) continue;
        const cxd ph = m(pivot, j) / best;
        m.col(j) *= std::conj(ph);
        // Kill the residual imaginary dust on the pivot.
        m(pivot, j) = cxd(m(pivot, j).real(), 0.0);
    }
}

bool is_semi_orthogonal(const Eigen::MatrixXcd& a, double tol) {
    const Eigen::MatrixXcd g = a.adjoint() * a;
    const Eigen::MatrixXcd i = Eigen::MatrixXcd::Identity(a.cols(), a.cols());
    return (g - i).norm() <= tol;
}

}  // namespace stz
