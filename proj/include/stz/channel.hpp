#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stz/tensor.hpp"

namespace stz {

enum class ChannelModel { Iid, Geometric };

struct ChannelSpec {
    ChannelModel model = ChannelModel::Geometric;
    int users = 2;          // K
    int res_elements = 64;  // J, total resource elements
    int tx_antennas = 64;   // N_t
    int rx_antennas = 2;    // N_u
    int streams = 2;        // r, parallel streams per user
    double snr_db = 20.0;
    int paths = 3;          // plane-wave paths (geometric model)
    int res_per_rb = 1;     // REs aggregated per resource block
    std::uint64_t seed = 0;

    void validate() const;
};

// Per-user, per-RE channel matrices plus the noise level derived from the
// SNR. Weights are computed per resource block; rates per resource element.
struct ChannelSet {
    ChannelSpec spec;
    std::vector<std::vector<Eigen::MatrixXcd>> h;  // h[k][j]: N_u x N_t
    double noise_power = 0.0;                      // n_k[j], uniform across users/REs

    int rb_count() const { return spec.res_elements / spec.res_per_rb; }
    double noise(int /*user*/, int /*re*/) const { return noise_power; }
};

// Deterministic synthetic channels. `iid`: unit-variance complex Gaussian
// entries. `geometric`: sum of `paths` random plane waves over uniform
// linear arrays with a smooth phase ramp across resource elements, which
// concentrates energy in a few spatial directions and makes the resulting
// weight tensors approximately low-rank.
ChannelSet synth_channels(const ChannelSpec& spec);

}  // namespace stz
