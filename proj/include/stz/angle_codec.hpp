#pragma once

#include <cstdint>
#include <vector>

#include "stz/bitstream.hpp"
#include "stz/givens.hpp"
#include "stz/quantize.hpp"

namespace stz {

struct AngleStreamInfo {
    bool raw_fallback = false;
    int tau_exponent = 0;      // threshold = 2^tau_exponent (coded mode only)
    int angle_bits = 0;        // refinement width actually used
    Index surviving = 0;       // etas at or above threshold
    std::uint64_t bits = 0;    // exact stream length
};

// Two-part code for one factor's angle sequence. Significance pass: the
// largest power-of-two threshold tau such that zeroing every eta below tau
// (and quantizing the survivors) keeps the reconstructed factor within
// q.rle_rel_err_target relative error, verified by trial reconstruction;
// sub-threshold positions are stored as Elias-gamma zero-run lengths.
// Refinement pass: surviving etas over [0, pi] and their thetas over
// [0, 2pi) at angle_bits. Thetas of zeroed etas are not stored (eta = 0
// makes the rotation the identity). Falls back to raw storage when no
// threshold meets the target; escalates angle_bits if quantization alone
// would break the target.
AngleStreamInfo encode_angles(BitWriter& w, const GivensParams& p, const QuantizerSpec& q);

// Decodes a stream produced by encode_angles; n and r come from the
// enclosing container.
GivensParams decode_angles(BitReader& r, Index n, Index rank);

}  // namespace stz
