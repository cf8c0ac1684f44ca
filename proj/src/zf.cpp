#include "stz/zf.hpp"

#include <string>

#include "stz/errors.hpp"
#include "stz/linalg.hpp"

namespace stz {

Eigen::MatrixXcd zf_precoder(const Eigen::MatrixXcd& v_rows) {
    const Eigen::MatrixXcd gram = v_rows * v_rows.adjoint();  // r x r
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(gram);
    // W = V^H (V V^H)^{-1}  <=>  W^H = (V V^H)^{-1} V
    return lu.solve(v_rows).adjoint();
}

WeightSet zf_weights(const ChannelSet& ch) {
    const ChannelSpec& spec = ch.spec;
    const int rbs = ch.rb_count();
    const int r = spec.streams;

    WeightSet out;
    out.v.reserve(static_cast<std::size_t>(spec.users));
    out.w.resize(static_cast<std::size_t>(spec.users));

    for (int k = 0; k < spec.users; ++k) {
        ComplexTensor3 vk(r, spec.tx_antennas, rbs);
        auto& wk = out.w[static_cast<std::size_t>(k)];
        wk.resize(static_cast<std::size_t>(rbs));

        for (int rb = 0; rb < rbs; ++rb) {
            // Stack the REs of this RB; the right singular vectors of the
            // stack are the eigenvectors of the aggregated Gram H^H H, and
            // the small dual H_s H_s^H keeps the eigenproblem tiny.
            const int m = spec.res_per_rb;
            Eigen::MatrixXcd stack(m * spec.rx_antennas, spec.tx_antennas);
            for (int i = 0; i < m; ++i) {
                stack.middleRows(i * spec.rx_antennas, spec.rx_antennas) =
                    ch.h[static_cast<std::size_t>(k)][static_cast<std::size_t>(rb * m + i)];
            }
            HermitianEig eig = hermitian_eig(stack * stack.adjoint());
            if (eig.values(r - 1) <= 1e-12 * std::max(eig.values(0), 1e-300)) {
                throw NumericError("zf_weights: eigenspace collapse at user " + std::to_string(k) +
                                   ", rb " + std::to_string(rb));
            }

            Eigen::MatrixXcd v_cols(spec.tx_antennas, r);
            for (int i = 0; i < r; ++i) {
                v_cols.col(i) = stack.adjoint() * eig.vectors.col(i) / std::sqrt(eig.values(i));
            }
            phase_fix_columns(v_cols);

            const Eigen::MatrixXcd v_rows = v_cols.adjoint();  // r x N_t
            wk[static_cast<std::size_t>(rb)] = zf_precoder(v_rows);
            for (int i = 0; i < r; ++i)
                for (int a = 0; a < spec.tx_antennas; ++a) vk(i, a, rb) = v_rows(i, a);
        }
        out.v.push_back(std::move(vk));
    }
    return out;
}

WeightSet weights_from_tensors(const ChannelSet& ch, std::vector<ComplexTensor3> tensors) {
    const ChannelSpec& spec = ch.spec;
    if (tensors.size() != static_cast<std::size_t>(spec.users)) {
        throw ContractError("weights_from_tensors: one tensor per user required");
    }
    const int rbs = ch.rb_count();
    WeightSet out;
    out.w.resize(static_cast<std::size_t>(spec.users));
    for (int k = 0; k < spec.users; ++k) {
        const ComplexTensor3& vk = tensors[static_cast<std::size_t>(k)];
        if (vk.dim(0) != spec.streams || vk.dim(1) != spec.tx_antennas || vk.dim(2) != rbs) {
            throw ContractError("weights_from_tensors: tensor shape mismatch at user " +
                                std::to_string(k));
        }
        auto& wk = out.w[static_cast<std::size_t>(k)];
        wk.resize(static_cast<std::size_t>(rbs));
        for (int rb = 0; rb < rbs; ++rb) {
            Eigen::MatrixXcd v_rows(spec.streams, spec.tx_antennas);
            for (int i = 0; i < spec.streams; ++i)
                for (int a = 0; a < spec.tx_antennas; ++a) v_rows(i, a) = vk(i, a, rb);
            wk[static_cast<std::size_t>(rb)] = zf_precoder(v_rows);
        }
    }
    out.v = std::move(tensors);
    return out;
}

}  // namespace stz
