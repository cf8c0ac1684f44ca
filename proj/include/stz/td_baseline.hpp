#pragma once

#include "stz/pipeline.hpp"

namespace stz {

struct TdResult {
    CompressedBlob blob;
    ComplexTensor3 decoded;
    CompressStats stats;
};

// Plain Tucker-truncation baseline: HOSVD truncation at the given ranks,
// dense quantized core, raw quantized factors, no sparsity and no angle
// coding.
TdResult td_baseline(const ComplexTensor3& v, const Dims3& ranks, const QuantizerSpec& q);

}  // namespace stz
