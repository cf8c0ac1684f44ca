#pragma once

#include <utility>
#include <vector>

#include "stz/errors.hpp"
#include "stz/tensor.hpp"

namespace stz {

// Raised by givens_decompose when the elimination does not land on the
// identity block, i.e. the input's column phases were not canonicalized by
// normalize_column_phases first.
class PhaseNormalizationError : public ContractError {
  public:
    using ContractError::ContractError;
};

// Angle-pair parameterization of an n x r column-semi-orthogonal matrix:
// U = (prod_{i=1..r} prod_{j=i+1..n} G_ij) * Ibar, where each G_ij rotates
// rows (i, j) by the 2x2 unitary block
//   [ cos(eta)            e^{i theta} sin(eta) ]
//   [ -e^{-i theta} sin(eta)   cos(eta)        ]
// and Ibar is the n x r top identity block. (2n-r-1)r/2 pairs, i.e.
// (2n-r-1)r real parameters; the r column-phase degrees of freedom the
// product cannot express are removed beforehand by normalize_column_phases.
struct GivensParams {
    Index n = 0;
    Index r = 0;
    std::vector<double> etas;    // in [0, pi]
    std::vector<double> thetas;  // in [0, 2*pi)
    bool phase_absorbed = false;

    static Index pair_count(Index n, Index r) { return (2 * n - r - 1) * r / 2; }
    Index pair_count() const { return pair_count(n, r); }

    void validate() const;
};

// Storage index of the pair (i, j), 0-based, in column-major elimination
// order (i ascending, j ascending within i).
Index givens_pair_index(Index n, Index i, Index j);

// Multiplies each column of u by the unit phase that makes the Givens
// elimination land exactly on the identity block, and absorbs the inverse
// phases into the core along `mode` so the Tucker reconstruction is
// unchanged. Must be called before givens_decompose.
std::pair<FactorMatrix, ComplexTensor3> normalize_column_phases(const FactorMatrix& u,
                                                                const ComplexTensor3& core,
                                                                int mode);

// Extracts the angle pairs by applying the inverse rotations G_ij^H in
// elimination order until u maps to Ibar. Requires a semi-orthogonal,
// phase-normalized input.
GivensParams givens_decompose(const FactorMatrix& u);

// Applies the rotations in product order to Ibar. The output has
// orthonormal columns for any angle values, so the decoder stays
// well-defined on quantized or corrupted angles.
FactorMatrix givens_reconstruct(const GivensParams& p);

}  // namespace stz
