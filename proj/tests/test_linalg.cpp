#include <doctest.h>

#include "stz/linalg.hpp"
#include "support/oracles.hpp"

using namespace stz;

namespace {

Eigen::MatrixXcd random_hermitian(Index n, std::uint64_t seed) {
    const Eigen::MatrixXcd a = oracles::random_matrix(n, n, seed);
    return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("hermitian_eig: known 2x2") {
    Eigen::MatrixXcd a(2, 2);
    a << cxd(2, 0), cxd(0, 1), cxd(0, -1), cxd(2, 0);
    // Eigenvalues of [[2, i], [-i, 2]] are 3 and 1.
    const HermitianEig e = hermitian_eig(a);
    CHECK(e.values(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_eig: residuals and orthonormality") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Eigen::MatrixXcd a = random_hermitian(12, seed);
        const HermitianEig e = hermitian_eig(a);
        for (Index i = 0; i < 12; ++i) {
            const double resid = (a * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm();
            CHECK(resid < 1e-10 * a.norm());
        }
        CHECK((e.vectors.adjoint() * e.vectors - Eigen::MatrixXcd::Identity(12, 12)).norm() < 1e-12);
        for (Index i = 0; i + 1 < 12; ++i) CHECK(e.values(i) >= e.values(i + 1));
    }
}

TEST_CASE("hermitian_eig: deterministic") {
    const Eigen::MatrixXcd a = random_hermitian(9, 77);
    const HermitianEig e1 = hermitian_eig(a);
    const HermitianEig e2 = hermitian_eig(a);
    CHECK((e1.vectors - e2.vectors).norm() == 0.0);
    CHECK((e1.values - e2.values).norm() == 0.0);
}

TEST_CASE("thin_svd: factorization residual and orthogonality") {
    for (auto [m, n] : std::vector<std::pair<Index, Index>>{{8, 3}, {10, 10}, {7, 1}}) {
        const Eigen::MatrixXcd a = oracles::random_matrix(m, n, static_cast<std::uint64_t>(m * 100 + n));
        const ThinSvd svd = thin_svd(a);
        CHECK((svd.u.adjoint() * svd.u - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-11);
        CHECK((svd.v.adjoint() * svd.v - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-11);
        const Eigen::MatrixXcd rec = svd.u * svd.s.asDiagonal() * svd.v.adjoint();
        CHECK((rec - a).norm() < 1e-10 * a.norm());
        for (Index i = 0; i + 1 < n; ++i) CHECK(svd.s(i) >= svd.s(i + 1));
        CHECK_FALSE(svd.rank_deficient);
    }
}

TEST_CASE("thin_svd: singular values match Gram eigenvalues") {
    const Eigen::MatrixXcd a = oracles::random_matrix(9, 4, 123);
    const ThinSvd svd = thin_svd(a);
    const HermitianEig e = hermitian_eig(a.adjoint() * a);
    for (Index i = 0; i < 4; ++i) {
        CHECK(svd.s(i) * svd.s(i) == doctest::Approx(e.values(i)).epsilon(1e-9));
    }
}

TEST_CASE("thin_svd: rank-deficient input is completed and flagged") {
    Eigen::MatrixXcd a = oracles::random_matrix(6, 3, 321);
    a.col(2) = a.col(0) * cxd(2.0, 1.0);  // exact rank 2
    const ThinSvd svd = thin_svd(a);
    CHECK(svd.rank_deficient);
    CHECK((svd.u.adjoint() * svd.u - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
    const Eigen::MatrixXcd rec = svd.u * svd.s.asDiagonal() * svd.v.adjoint();
    CHECK((rec - a).norm() < 1e-9 * a.norm());
}

TEST_CASE("polar_factor: semi-orthogonal input is its own polar factor") {
    const Eigen::MatrixXcd q = oracles::random_semi_orthogonal(7, 3, 11);
    const Eigen::MatrixXcd p = polar_factor(q);
    CHECK((p - q).norm() < 1e-10);
}

TEST_CASE("polar_factor: maximizes the real inner product over the Stiefel set") {
    const Eigen::MatrixXcd m = oracles::random_matrix(6, 3, 999);
    const Eigen::MatrixXcd p = polar_factor(m);
    CHECK(is_semi_orthogonal(p, 1e-10));
    const double best = (p.adjoint() * m).trace().real();
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const Eigen::MatrixXcd c = oracles::random_semi_orthogonal(6, 3, 5000 + s);
        CHECK((c.adjoint() * m).trace().real() <= best + 1e-9);
    }
}

TEST_CASE("spectral_norm agrees with the SVD") {
    const Eigen::MatrixXcd a = oracles::random_matrix(8, 5, 42);
    const ThinSvd svd = thin_svd(a);
    CHECK(spectral_norm(a) == doctest::Approx(svd.s(0)).epsilon(1e-9));
    CHECK(spectral_norm(a.adjoint()) == doctest::Approx(svd.s(0)).epsilon(1e-9));
}

TEST_CASE("phase_fix_columns: pivot becomes real nonnegative, deterministic") {
    Eigen::MatrixXcd m = oracles::random_matrix(6, 4, 17);
    Eigen::MatrixXcd m2 = m;
    phase_fix_columns(m);
    phase_fix_columns(m2);
    CHECK((m - m2).norm() == 0.0);
    for (Index j = 0; j < m.cols(); ++j) {
        Index pivot = 0;
        double best = -1.0;
        for (Index i = 0; i < m.rows(); ++i) {
            if (std::abs(m(i, j)) > best) {
                best = std::abs(m(i, j));
                pivot = i;
            }
        }
        CHECK(m(pivot, j).imag() == 0.0);
        CHECK(m(pivot, j).real() >= 0.0);
    }
}
