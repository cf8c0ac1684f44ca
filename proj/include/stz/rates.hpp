#pragma once

#include "stz/channel.hpp"
#include "stz/zf.hpp"

namespace stz {

// Aggregate downlink sum rate in bits/s/Hz. For stream l of user k_l at
// resource element j, with unit-normalized precoder columns w_i:
//   C_{l,j} = n I + sum_{i != l} H_{k_l}[j] w_i w_i^H H_{k_l}[j]^H
//   R_{l,j} = log2(1 + w_l^H H^H C^{-1} H w_l)
// and the result is the sum over all streams and REs.
double sum_rate(const ChannelSet& ch, const WeightSet& w);

// RL = 1 - sum_rate(cmp) / sum_rate(ref).
double rate_loss(const ChannelSet& ch, const WeightSet& ref, const WeightSet& cmp);

// Post-precoding SINR per (stream, RE); row l = k*streams + s. The rate of
// each cell is log2(1 + value).
Eigen::MatrixXd per_stream_snr(const ChannelSet& ch, const WeightSet& w);

}  // namespace stz
