#include "stz/rates.hpp"

#include <cmath>

#include "stz/errors.hpp"

namespace stz {

namespace {

// Unit-normalized precoder column for stream s of user k in the given RB.
Eigen::VectorXcd stream_precoder(const WeightSet& w, int k, int rb, int s) {
    Eigen::VectorXcd col = w.w[static_cast<std::size_t>(k)][static_cast<std::size_t>(rb)].col(s);
    const double nrm = col.norm();
    if (nrm > 0.0) col /= nrm;
    return col;
}

}  // namespace

Eigen::MatrixXd per_stream_snr(const ChannelSet& ch, const WeightSet& w) {
    const ChannelSpec& spec = ch.spec;
    const int r = spec.streams;
    const int streams_total = spec.users * r;
    Eigen::MatrixXd table(streams_total, spec.res_elements);

    for (int j = 0; j < spec.res_elements; ++j) {
        const int rb = j / spec.res_per_rb;
        // Normalized precoders of every stream at this RE.
        std::vector<Eigen::VectorXcd> pre(static_cast<std::size_t>(streams_total));
        for (int k = 0; k < spec.users; ++k) {
            for (int s = 0; s < r; ++s) {
                pre[static_cast<std::size_t>(k * r + s)] = stream_precoder(w, k, rb, s);
            }
        }
        for (int l = 0; l < streams_total; ++l) {
            const int k = l / r;
            const Eigen::MatrixXcd& h = ch.h[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            Eigen::MatrixXcd c = ch.noise(k, j) *
                                 Eigen::MatrixXcd::Identity(spec.rx_antennas, spec.rx_antennas);
            for (int i = 0; i < streams_total; ++i) {
                if (i == l) continue;
                const Eigen::VectorXcd hw = h * pre[static_cast<std::size_t>(i)];
                c += hw * hw.adjoint();
            }
            const Eigen::VectorXcd hw_l = h * pre[static_cast<std::size_t>(l)];
            const Eigen::VectorXcd solved = Eigen::LDLT<Eigen::MatrixXcd>(c).solve(hw_l);
            const double sinr = std::max(0.0, (hw_l.dot(solved)).real());
            table(l, j) = sinr;
        }
    }
    return table;
}

double sum_rate(const ChannelSet& ch, const WeightSet& w) {
    const Eigen::MatrixXd sinr = per_stream_snr(ch, w);
    double total = 0.0;
    for (Eigen::Index l = 0; l < sinr.rows(); ++l) {
        for (Eigen::Index j = 0; j < sinr.cols(); ++j) {
            total += std::log2(1.0 + sinr(l, j));
        }
    }
    return total;
}

double rate_loss(const ChannelSet& ch, const WeightSet& ref, const WeightSet& cmp) {
    const double base = sum_rate(ch, ref);
    if (base <= 0.0) throw ContractError("rate_loss: reference sum rate is zero");
    return 1.0 - sum_rate(ch, cmp) / base;
}

}  // namespace stz
