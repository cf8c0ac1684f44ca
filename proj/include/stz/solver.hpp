#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stz/tensor.hpp"

namespace stz {

// Configuration of the sparse Tucker fit. alpha1 = floor(s1*r1*r2*r3) core
// nonzeros (must be >= 1), alpha2 = floor(s2*n1*n2*n3) residual nonzeros
// (0 disables the residual term entirely).
struct StdConfig {
    Dims3 ranks{1, 1, 1};
    double s1 = 0.5;          // core sparsity, (0, 1]
    double s2 = 0.0;          // residual sparsity, [0, 1]
    double beta = 0.3;        // inertial weight, [0, 1)
    bool eta_auto = true;     // derive step sizes from Lipschitz estimates
    double eta_core = 1.0;    // used when eta_auto == false
    double eta_sparse = 1.0;
    std::array<double, 3> eta_factor{1.0, 1.0, 1.0};
    int eta_refresh = 10;     // recompute auto step sizes every N iterations
    int max_iters = 50;
    double tol = 1e-4;        // stop when |d rel_err| < tol for 3 iterations
    std::uint64_t seed = 0;   // carried for manifests; the solve itself is deterministic

    Index alpha1() const;
    Index alpha2(const Dims3& dims) const;
    void validate(const Dims3& dims) const;
};

// Decomposition state: V ~ S + [[G; U1, U2, U3]], plus the extrapolated
// factors the inertial scheme iterates on.
struct SparseTucker {
    ComplexTensor3 core;                        // r1 x r2 x r3, nnz <= alpha1
    std::array<FactorMatrix, 3> factors;        // n_i x r_i, semi-orthogonal
    ComplexTensor3 residual;                    // n1 x n2 x n3, nnz <= alpha2
    std::array<FactorMatrix, 3> factors_extrap; // inertial companions
    int iterations = 0;
    int rank_deficient_updates = 0;  // factor updates that needed SVD completion

    ComplexTensor3 reconstruct() const;
};

struct DescentRecord {
    int iter;
    double objective;  // 1/2 ||V - S - [[G;U]]||_F^2 at the actual factors
    double aux;        // objective + sum_i gamma_i ||U_i - Ubar_i||_F^2
    double step_sq;    // ||X^{k+1} - X^k||_F^2 over all blocks
    double rel_err;    // ||V - S - [[G;U]]|| / ||V||
};

struct DescentTrace {
    std::vector<DescentRecord> records;

    void write_csv(std::ostream& out) const;  // iter, objective, H, step_sq, rel_err
};

// Per-block proximal weights plus the auxiliary-function weights gamma_i
// derived from the same Lipschitz estimates.
struct StepSizes {
    double core = 1.0;
    double sparse = 1.0;
    std::array<double, 3> factor{1.0, 1.0, 1.0};
    std::array<double, 3> gamma{0.0, 0.0, 0.0};
};

// Keeps the k largest-modulus entries, zeroes the rest. Deterministic
// tie-breaking: among equal moduli the lower linear index survives.
ComplexTensor3 prox_l0_topk(const ComplexTensor3& t, Index k);

// One proximal core step: A = (eta*[[V-S; Ubar^H]] + G) / (eta+1), then
// keep the alpha1 largest entries. Uses the extrapolated factors.
ComplexTensor3 update_core(const SparseTucker& state, const ComplexTensor3& v, double eta_core,
                           Index alpha1);

// Closed-form semi-orthogonal factor step: the polar factor of
// (V-S)_(i) * B_i^H + (1/eta_i) * Ubar_i, where B_i is the mode-i unfolding
// of the core expanded through the companion extrapolated factors.
// Gauss-Seidel order: call with state.factors_extrap already refreshed for
// modes < i. Sets *rank_deficient when the SVD needed completion.
FactorMatrix update_factor(const SparseTucker& state, const ComplexTensor3& v, int mode,
                           double eta_factor, bool* rank_deficient = nullptr);

// Proximal residual step: B = (eta*(V - [[G;Ubar]]) + S) / (eta+1), then
// keep the alpha2 largest entries. alpha2 == 0 returns the zero tensor.
ComplexTensor3 update_sparse(const SparseTucker& state, const ComplexTensor3& v,
                             double eta_sparse, Index alpha2);

// Ubar <- U + beta * (U - Ubar_old). beta = 0 gives plain BCD.
FactorMatrix extrapolate_factor(const FactorMatrix& u_new, const FactorMatrix& u_bar_old,
                                double beta);

// Step sizes eta = 1/(L_block + M) from blockwise Lipschitz estimates
// (core block has L = 1 under orthonormal factors; factor blocks scale with
// ||G||^2 and the companion spectral norms; M bounds the cross-block
// coupling via the current gradient magnitude, floored at 1e-6), plus the
// auxiliary weights gamma_i used by the descent trace.
StepSizes auto_step_sizes(const SparseTucker& state, const ComplexTensor3& v, double beta);

struct SolveResult {
    SparseTucker state;
    DescentTrace trace;
};

// Full solve: HOSVD-truncation init, then block sweeps (core, factors with
// extrapolation, residual) until the relative-error change stays below tol
// for 3 consecutive iterations or max_iters is hit. Throws NumericError if
// the objective exceeds 10x its initial value (bad step size) or any
// intermediate goes non-finite.
SolveResult apbcd_solve(const ComplexTensor3& v, const StdConfig& cfg);

// Same, but starting from a caller-supplied state (warm starts, tests).
SolveResult apbcd_solve_from(const ComplexTensor3& v, const StdConfig& cfg, SparseTucker init);

}  // namespace stz
