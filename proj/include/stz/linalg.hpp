#pragma once

#include <Eigen/Dense>

namespace stz {

// Deterministic dense decompositions used everywhere a singular value or
// eigenvalue decomposition is needed. Cyclic Jacobi with a fixed sweep
// order (p ascending, q ascending within p) and a fixed convergence
// threshold of 1e-12, so identical inputs give bit-identical outputs on a
// given platform. Matrices here are small (<= 512 per side), accuracy and
// determinism matter more than asymptotics.

struct HermitianEig {
    Eigen::VectorXd values;    // descending; equal values keep sweep order
    Eigen::MatrixXcd vectors;  // columns, orthonormal
};

// Eigendecomposition of a Hermitian matrix (the Hermitian part of the
// input is used). Throws NumericError if the sweep does not converge.
HermitianEig hermitian_eig(const Eigen::MatrixXcd& a);

struct ThinSvd {
    Eigen::MatrixXcd u;   // m x n, semi-orthogonal columns
    Eigen::VectorXd s;    // descending, nonnegative
    Eigen::MatrixXcd v;   // n x n, unitary
    bool rank_deficient = false;  // true if null columns of u were completed
};

// One-sided Jacobi SVD of an m x n matrix with m >= n: a = u * diag(s) * v^H.
// For (numerically) rank-deficient input the null columns of u are completed
// deterministically to an orthonormal set and flagged.
ThinSvd thin_svd(const Eigen::MatrixXcd& a);

// Closest matrix with orthonormal columns: u * v^H from the thin SVD.
// Maximizes Re<Q, a> over semi-orthogonal Q. Requires rows >= cols.
Eigen::MatrixXcd polar_factor(const Eigen::MatrixXcd& a, bool* rank_deficient = nullptr);

// Largest singular value, via the Gram matrix of the thinner side.
double spectral_norm(const Eigen::MatrixXcd& a);

// Rotates each column by a unit phase so that its largest-modulus entry
// (lowest index on ties) is real nonnegative. Zero columns are left alone.
void phase_fix_columns(Eigen::MatrixXcd& m);

// ||a^H a - I||_F <= tol
bool is_semi_orthogonal(const Eigen::MatrixXcd& a, double tol);

}  // namespace stz
