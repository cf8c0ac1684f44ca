#include "stz/channel.hpp"

#include <cmath>

#include "stz/errors.hpp"
#include "stz/rng.hpp"

namespace stz {

void ChannelSpec::validate() const {
    if (users < 1) throw ContractError("ChannelSpec: users must be >= 1");
    if (res_elements < 1) throw ContractError("ChannelSpec: res_elements must be >= 1");
    if (tx_antennas < 1 || rx_antennas < 1) throw ContractError("ChannelSpec: antenna counts must be >= 1");
    if (streams < 1 || streams > rx_antennas || streams > tx_antennas) {
        throw ContractError("ChannelSpec: streams must satisfy 1 <= r <= min(N_u, N_t)");
    }
    if (paths < 1) throw ContractError("ChannelSpec: paths must be >= 1");
    if (res_per_rb < 1 || res_elements % res_per_rb != 0) {
        throw ContractError("ChannelSpec: res_per_rb must divide res_elements");
    }
}

namespace {

Eigen::VectorXcd steering(int n, double sin_angle) {
    Eigen::VectorXcd a(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        a(m) = std::polar(scale, M_PI * sin_angle * static_cast<double>(m));
    }
    return a;
}

}  // namespace

ChannelSet synth_channels(const ChannelSpec& spec) {
    spec.validate();
    ChannelSet out;
    out.spec = spec;
    out.noise_power = std::pow(10.0, -spec.snr_db / 10.0);
    out.h.resize(static_cast<std::size_t>(spec.users));

    if (spec.model == ChannelModel::Iid) {
        CounterRng rng(spec.seed, "channels/iid");
        for (int k = 0; k < spec.users; ++k) {
            auto& user = out.h[static_cast<std::size_t>(k)];
            user.resize(static_cast<std::size_t>(spec.res_elements));
            for (int j = 0; j < spec.res_elements; ++j) {
                Eigen::MatrixXcd m(spec.rx_antennas, spec.tx_antennas);
                for (int row = 0; row < spec.rx_antennas; ++row) {
                    for (int col = 0; col < spec.tx_antennas; ++col) {
                        m(row, col) = rng.complex_gaussian();
                    }
                }
                user[static_cast<std::size_t>(j)] = std::move(m);
            }
        }
        return out;
    }

    // Geometric: per user, `paths` plane waves with random directions,
    // exponentially decaying power profile, and a small delay so the phase
    // ramps smoothly across resource elements (at most ~2 cycles over the
    // band). Gains scaled for unit per-entry variance.
    CounterRng rng(spec.seed, "channels/geometric");
    const int p_count = spec.paths;
    std::vector<double> power(static_cast<std::size_t>(p_count));
    double power_sum = 0.0;
    for (int p = 0; p < p_count; ++p) {
        power[static_cast<std::size_t>(p)] = std::pow(0.5, p);
        power_sum += power[static_cast<std::size_t>(p)];
    }
    for (double& w : power) w /= power_sum;

    const double max_cycles = 2.0;
    for (int k = 0; k < spec.users; ++k) {
        auto& user = out.h[static_cast<std::size_t>(k)];
        user.assign(static_cast<std::size_t>(spec.res_elements),
                    Eigen::MatrixXcd::Zero(spec.rx_antennas, spec.tx_antennas));
        for (int p = 0; p < p_count; ++p) {
            const double sin_tx = rng.uniform_symmetric();
            const double sin_rx = rng.uniform_symmetric();
            const double delay = rng.uniform() * max_cycles / static_cast<double>(spec.res_elements);
            const cxd gain = rng.complex_gaussian() *
                             std::sqrt(power[static_cast<std::size_t>(p)] *
                                       static_cast<double>(spec.rx_antennas) *
                                       static_cast<double>(spec.tx_antennas));
            const Eigen::VectorXcd a_rx = steering(spec.rx_antennas, sin_rx);
            const Eigen::VectorXcd a_tx = steering(spec.tx_antennas, sin_tx);
            const Eigen::MatrixXcd outer = a_rx * a_tx.adjoint();
            for (int j = 0; j < spec.res_elements; ++j) {
                const cxd ramp = std::polar(1.0, -2.0 * M_PI * delay * static_cast<double>(j));
                user[static_cast<std::size_t>(j)] += gain * ramp * outer;
            }
        }
    }
    return out;
}

}  // namespace stz
