#pragma once

#include <cmath>
#include <cstdint>

#include "stz/errors.hpp"

namespace stz {

struct QuantizerSpec {
    int bits_per_component = 16;    // complex values: bits per re/im component
    int angle_bits = 14;            // Givens angle refinement width
    double rle_rel_err_target = 0.01;  // per-factor relative error budget

    void validate() const {
        if (bits_per_component < 1 || bits_per_component > 32) {
            throw ContractError("QuantizerSpec: bits_per_component must be in [1, 32]");
        }
        if (angle_bits < 1 || angle_bits > 32) {
            throw ContractError("QuantizerSpec: angle_bits must be in [1, 32]");
        }
        if (!(rle_rel_err_target > 0.0)) {
            throw ContractError("QuantizerSpec: rle_rel_err_target must be positive");
        }
    }
};

// Uniform midrise quantizer for a signed component in [-scale, scale]:
// 2^bits cells of width scale/2^{bits-1}, reconstruction at cell midpoints,
// so the decode error is at most scale/2^bits everywhere including the
// endpoints. Codes are stored offset-binary in `bits` bits.
inline std::uint64_t quantize_signed(double x, double scale, int bits) {
    const std::int64_t half = std::int64_t{1} << (bits - 1);
    if (scale <= 0.0) return static_cast<std::uint64_t>(half);  // code for 0
    const double delta = scale / static_cast<double>(half);
    std::int64_t k = static_cast<std::int64_t>(std::floor(x / delta));
    if (k < -half) k = -half;
    if (k > half - 1) k = half - 1;
    return static_cast<std::uint64_t>(k + half);
}

inline double dequantize_signed(std::uint64_t code, double scale, int bits) {
    const std::int64_t half = std::int64_t{1} << (bits - 1);
    if (scale <= 0.0) return 0.0;
    const double delta = scale / static_cast<double>(half);
    const std::int64_t k = static_cast<std::int64_t>(code) - half;
    return (static_cast<double>(k) + 0.5) * delta;
}

// Same construction for a nonnegative quantity in [0, range].
inline std::uint64_t quantize_unsigned(double x, double range, int bits) {
    const std::int64_t cells = std::int64_t{1} << bits;
    if (range <= 0.0) return 0;
    const double delta = range / static_cast<double>(cells);
    std::int64_t k = static_cast<std::int64_t>(std::floor(x / delta));
    if (k < 0) k = 0;
    if (k > cells - 1) k = cells - 1;
    return static_cast<std::uint64_t>(k);
}

inline double dequantize_unsigned(std::uint64_t code, double range, int bits) {
    const std::int64_t cells = std::int64_t{1} << bits;
    if (range <= 0.0) return 0.0;
    const double delta = range / static_cast<double>(cells);
    return (static_cast<double>(code) + 0.5) * delta;
}

}  // namespace stz
