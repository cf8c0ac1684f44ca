#pragma once

#include <cstdint>
#include <optional>

#include "stz/blob.hpp"
#include "stz/quantize.hpp"
#include "stz/solver.hpp"
#include "stz/tensor.hpp"

namespace stz {

// Coding route for the decomposition parts.
//   StdFc : sparse core + residual payloads, factors as Givens angle
//           streams with run-length significance coding (the full two-stage
//           pipeline).
//   StdRaw: same stage 1, factors stored as raw quantized matrices.
//   Td    : plain truncation baseline; dense core, raw factors, no solve.
enum class CodecMethod { StdFc, StdRaw, Td };

const char* method_name(CodecMethod m);
std::optional<CodecMethod> method_from_name(const std::string& name);

struct CompressStats {
    double compression_ratio = 0.0;
    double relative_error = 0.0;
    int iterations = 0;
    std::uint64_t bit_size = 0;
};

CompressedBlob compress_tensor(const ComplexTensor3& v, const StdConfig& cfg,
                               const QuantizerSpec& q, CodecMethod method = CodecMethod::StdFc,
                               CompressStats* stats = nullptr, DescentTrace* trace = nullptr);

// Rebuilds S + [[G; U1, U2, U3]] from any blob produced above. Raw-tensor
// sections decode verbatim.
ComplexTensor3 decompress_blob(const CompressedBlob& blob);

}  // namespace stz
