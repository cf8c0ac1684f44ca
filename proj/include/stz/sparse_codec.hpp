#pragma once

#include <cstdint>
#include <vector>

#include "stz/bitstream.hpp"
#include "stz/quantize.hpp"
#include "stz/tensor.hpp"

namespace stz {

// A run of uniformly quantized complex values: one stored f64 scale
// (max-abs over all re/im components), then 2*bits per value.
struct QuantizedBlock {
    double scale = 0.0;
    int bits = 16;
    std::vector<std::uint64_t> codes;  // re, im interleaved, codes.size() = 2 * count

    Index count() const { return static_cast<Index>(codes.size() / 2); }
    cxd value(Index i) const {
        return {dequantize_signed(codes[static_cast<std::size_t>(2 * i)], scale, bits),
                dequantize_signed(codes[static_cast<std::size_t>(2 * i + 1)], scale, bits)};
    }
    std::uint64_t bit_cost() const { return 64 + codes.size() * static_cast<std::uint64_t>(bits); }
};

QuantizedBlock quantize_block(const cxd* data, Index count, int bits);

void write_block(BitWriter& w, const QuantizedBlock& b);
QuantizedBlock read_block(BitReader& r, Index count, int bits);

// Sparse tensor wire form: a position bitmap over the full linearization
// (LSB-first within mask bytes) plus the nonzero values in mask order.
struct SparsePayload {
    Dims3 dims{0, 0, 0};
    std::vector<bool> mask;  // length = n1*n2*n3
    QuantizedBlock values;   // one entry per set mask bit

    Index nnz() const;
    // 64 scale bits + one mask bit per tensor entry + 2*bits per nonzero.
    std::uint64_t bit_cost() const;
};

// Records the exact-zero structure of a post-thresholding tensor and
// quantizes the nonzeros. An all-zero tensor yields a valid empty payload.
SparsePayload encode_sparse(const ComplexTensor3& t, const QuantizerSpec& q);
ComplexTensor3 decode_sparse(const SparsePayload& p);

void write_sparse(BitWriter& w, const SparsePayload& p);
SparsePayload read_sparse(BitReader& r, const Dims3& dims, int bits);

// Dense wire form (no mask): every entry quantized, used by the plain
// truncation baseline and raw factor storage.
QuantizedBlock encode_dense(const ComplexTensor3& t, int bits);
ComplexTensor3 decode_dense(const QuantizedBlock& b, const Dims3& dims);

QuantizedBlock encode_matrix(const Eigen::MatrixXcd& m, int bits);
Eigen::MatrixXcd decode_matrix(const QuantizedBlock& b, Index rows, Index cols);

}  // namespace stz
