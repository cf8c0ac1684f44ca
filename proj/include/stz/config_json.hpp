#pragma once

#include <json.hpp>

#include "stz/pipeline.hpp"
#include "stz/quantize.hpp"
#include "stz/solver.hpp"

namespace stz {

// JSON keys: ranks [r1,r2,r3], s1, s2, beta, eta {"auto": true} or
// {"values": {"core", "sparse", "factor": [..]}}, max_iters, tol, seed.
StdConfig std_config_from_json(const nlohmann::json& j);
nlohmann::json std_config_to_json(const StdConfig& cfg);

// Keys: bits, angle_bits, rle_rel_err.
QuantizerSpec quantizer_from_json(const nlohmann::json& j);
nlohmann::json quantizer_to_json(const QuantizerSpec& q);

}  // namespace stz
