#include "stz/td_baseline.hpp"

namespace stz {

TdResult td_baseline(const ComplexTensor3& v, const Dims3& ranks, const QuantizerSpec& q) {
    StdConfig cfg;
    cfg.ranks = ranks;
    cfg.s1 = 1.0;
    cfg.s2 = 0.0;
    TdResult out;
    out.blob = compress_tensor(v, cfg, q, CodecMethod::Td, &out.stats);
    out.decoded = decompress_blob(out.blob);
    return out;
}

}  // namespace stz
