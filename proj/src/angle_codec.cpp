#include "stz/angle_codec.hpp"

#include <cmath>

#include "stz/errors.hpp"

namespace stz {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr int kMinTauExp = -40;
constexpr int kMaxTauExp = 2;  // 2^2 = 4 > pi zeroes everything

// Quantized decode of the angle sequence under threshold tau (tau <= 0
// means keep everything).
GivensParams decoded_under(const GivensParams& p, double tau, int bits) {
    GivensParams out = p;
    for (std::size_t k = 0; k < p.etas.size(); ++k) {
        if (tau > 0.0 && p.etas[k] < tau) {
            out.etas[k] = 0.0;
            out.thetas[k] = 0.0;
        } else {
            out.etas[k] = dequantize_unsigned(quantize_unsigned(p.etas[k], M_PI, bits), M_PI, bits);
            out.thetas[k] =
                dequantize_unsigned(quantize_unsigned(p.thetas[k], kTwoPi, bits), kTwoPi, bits);
        }
    }
    return out;
}

double factor_rel_err(const FactorMatrix& ref, const GivensParams& candidate) {
    const FactorMatrix rec = givens_reconstruct(candidate);
    return (rec - ref).norm() / ref.norm();
}

}  // namespace

AngleStreamInfo encode_angles(BitWriter& w, const GivensParams& p, const QuantizerSpec& q) {
    p.validate();
    q.validate();
    const FactorMatrix ref = givens_reconstruct(p);
    const Index total = p.pair_count();

    AngleStreamInfo info;
    int bits = q.angle_bits;
    bool have_plan = false;
    bool raw = false;
    int chosen_exp = 0;

    while (!have_plan) {
        // Largest power-of-two threshold meeting the target; error grows
        // with tau, so binary search the exponent range.
        int lo = kMinTauExp, hi = kMaxTauExp, best = kMinTauExp - 1;
        while (lo <= hi) {
            const int mid = lo + (hi - lo) / 2;
            const double err = factor_rel_err(ref, decoded_under(p, std::ldexp(1.0, mid), bits));
            if (err <= q.rle_rel_err_target) {
                best = mid;
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        if (best >= kMinTauExp) {
            chosen_exp = best;
            raw = false;
            have_plan = true;
        } else if (factor_rel_err(ref, decoded_under(p, 0.0, bits)) <= q.rle_rel_err_target) {
            raw = true;
            have_plan = true;
        } else if (bits < 32) {
            bits = std::min(bits + 4, 32);  // quantization alone broke the target
        } else {
            throw NumericError("encode_angles: cannot meet relative error target at 32 bits");
        }
    }

    const std::uint64_t start = w.bit_count();
    w.put_bit(raw);
    w.put_bits(static_cast<std::uint64_t>(bits), 6);

    if (raw) {
        for (Index k = 0; k < total; ++k) {
            w.put_bits(quantize_unsigned(p.etas[static_cast<std::size_t>(k)], M_PI, bits), bits);
        }
        for (Index k = 0; k < total; ++k) {
            w.put_bits(quantize_unsigned(p.thetas[static_cast<std::size_t>(k)], kTwoPi, bits), bits);
        }
        info.surviving = total;
    } else {
        const double tau = std::ldexp(1.0, chosen_exp);
        w.put_bits(static_cast<std::uint64_t>(chosen_exp - kMinTauExp), 8);

        std::vector<Index> survivors;
        Index pos = 0;
        while (pos < total) {
            Index run = 0;
            while (pos + run < total && p.etas[static_cast<std::size_t>(pos + run)] < tau) ++run;
            w.put_gamma(static_cast<std::uint64_t>(run) + 1);
            if (pos + run < total) {
                survivors.push_back(pos + run);
                pos += run + 1;
            } else {
                pos = total;
            }
        }
        for (Index k : survivors) {
            w.put_bits(quantize_unsigned(p.etas[static_cast<std::size_t>(k)], M_PI, bits), bits);
        }
        for (Index k : survivors) {
            w.put_bits(quantize_unsigned(p.thetas[static_cast<std::size_t>(k)], kTwoPi, bits), bits);
        }
        info.surviving = static_cast<Index>(survivors.size());
        info.tau_exponent = chosen_exp;
    }

    info.raw_fallback = raw;
    info.angle_bits = bits;
    info.bits = w.bit_count() - start;
    return info;
}

GivensParams decode_angles(BitReader& r, Index n, Index rank) {
    GivensParams p;
    p.n = n;
    p.r = rank;
    const Index total = p.pair_count();
    p.etas.assign(static_cast<std::size_t>(total), 0.0);
    p.thetas.assign(static_cast<std::size_t>(total), 0.0);

    const bool raw = r.get_bit();
    const int bits = static_cast<int>(r.get_bits(6));
    if (bits < 1 || bits > 32) {
        throw FormatError(FormatError::Kind::BadLayout, "angle stream: bad refinement width");
    }

    if (raw) {
        for (Index k = 0; k < total; ++k) {
            p.etas[static_cast<std::size_t>(k)] = dequantize_unsigned(r.get_bits(bits), M_PI, bits);
        }
        for (Index k = 0; k < total; ++k) {
            p.thetas[static_cast<std::size_t>(k)] =
                dequantize_unsigned(r.get_bits(bits), kTwoPi, bits);
        }
    } else {
        r.get_bits(8);  // threshold exponent, informational for inspect
        std::vector<Index> survivors;
        Index pos = 0;
        while (pos < total) {
            const std::uint64_t run = r.get_gamma() - 1;
            if (static_cast<Index>(run) > total - pos) {
                throw FormatError(FormatError::Kind::BadLayout, "angle stream: run overflows");
            }
            pos += static_cast<Index>(run);
            if (pos < total) {
                survivors.push_back(pos);
                ++pos;
            }
        }
        for (Index k : survivors) {
            p.etas[static_cast<std::size_t>(k)] = dequantize_unsigned(r.get_bits(bits), M_PI, bits);
        }
        for (Index k : survivors) {
            p.thetas[static_cast<std::size_t>(k)] =
                dequantize_unsigned(r.get_bits(bits), kTwoPi, bits);
        }
    }
    p.phase_absorbed = true;
    return p;
}

}  // namespace stz
