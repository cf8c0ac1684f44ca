#pragma once

#include <vector>

#include "stz/channel.hpp"
#include "stz/tensor.hpp"

namespace stz {

// Per-user weight tensors V_k (streams x tx_antennas x RBs) and the
// matching precoders W_k[rb] (tx_antennas x streams).
struct WeightSet {
    std::vector<ComplexTensor3> v;
    std::vector<std::vector<Eigen::MatrixXcd>> w;
};

// Eigen-based zero forcing. V_k[rb]'s rows are the adjoints of the top-r
// eigenvectors of the (RB-aggregated) Gram matrix H^H H, with the
// largest-entry-real-nonnegative phase convention; W = V^H (V V^H)^{-1},
// so V W = I_r by construction.
WeightSet zf_weights(const ChannelSet& ch);

// The pseudo-inverse precoder for one RB from the (possibly decoded,
// non-orthonormal) weight rows.
Eigen::MatrixXcd zf_precoder(const Eigen::MatrixXcd& v_rows);

// RRU-side reassembly: recompute every precoder from decoded weight
// tensors.
WeightSet weights_from_tensors(const ChannelSet& ch, std::vector<ComplexTensor3> tensors);

}  // namespace stz
