#pragma once

#include <array>

#include "stz/linalg.hpp"
#include "stz/tensor.hpp"

namespace stz {

struct HosvdResult {
    ComplexTensor3 core;                 // r1 x r2 x r3
    std::array<FactorMatrix, 3> factors; // n_i x r_i, semi-orthogonal
};

// Truncated higher-order SVD: factor i holds the leading r_i left singular
// vectors of the mode-i unfolding (singular-vector phases fixed so the
// largest-modulus entry is real nonnegative), core = [[t; U1^H,U2^H,U3^H]].
HosvdResult hosvd(const ComplexTensor3& t, const Dims3& ranks);

struct HosvdBasis {
    ComplexTensor3 core;                 // full-rank core, n1 x n2 x n3
    std::array<FactorMatrix, 3> bases;   // n_i x n_i unitary
};

// Full-rank HOSVD. Because truncating the core of a full orthonormal basis
// is an orthogonal projection, the reconstruction error at ranks (r1,r2,r3)
// is sqrt(||t||^2 - ||core[0:r1,0:r2,0:r3]||^2), which makes rank sweeps
// cheap.
HosvdBasis hosvd_full(const ComplexTensor3& t);

// Relative reconstruction error of the truncation of a full-rank HOSVD.
double hosvd_truncation_error(const HosvdBasis& basis, const Dims3& ranks, double tensor_norm);

}  // namespace stz
