#pragma once

// Independent oracles used to pin expected values. Everything here is
// deliberately written as literal loop translations of the defining
// formulas, separate from any library code path it checks.

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include "stz/channel.hpp"
#include "stz/rng.hpp"
#include "stz/tensor.hpp"
#include "stz/zf.hpp"

namespace oracles {

using stz::ComplexTensor3;
using stz::cxd;
using stz::Index;

// Elementwise mode product: (T x_m A)_{..k..} = sum_j T_{..j..} A_{j,k}.
inline ComplexTensor3 mode_product_loops(const ComplexTensor3& t, const Eigen::MatrixXcd& a,
                                         int mode) {
    stz::Dims3 out_dims = t.dims();
    out_dims[static_cast<std::size_t>(mode)] = a.cols();
    ComplexTensor3 out(out_dims[0], out_dims[1], out_dims[2]);
    for (Index i = 0; i < out_dims[0]; ++i) {
        for (Index j = 0; j < out_dims[1]; ++j) {
            for (Index k = 0; k < out_dims[2]; ++k) {
                cxd acc(0.0, 0.0);
                for (Index c = 0; c < t.dim(mode); ++c) {
                    Index idx[3] = {i, j, k};
                    const Index target = idx[mode];
                    idx[mode] = c;
                    acc += t(idx[0], idx[1], idx[2]) * a(c, target);
                }
                out(i, j, k) = acc;
            }
        }
    }
    return out;
}

// Full summation Tucker reconstruction: V_{abc} = sum_{pqr} G_{pqr}
// U1_{a,p} U2_{b,q} U3_{c,r}.
inline ComplexTensor3 tucker_loops(const ComplexTensor3& g, const Eigen::MatrixXcd& u1,
                                   const Eigen::MatrixXcd& u2, const Eigen::MatrixXcd& u3) {
    ComplexTensor3 out(u1.rows(), u2.rows(), u3.rows());
    for (Index a = 0; a < u1.rows(); ++a) {
        for (Index b = 0; b < u2.rows(); ++b) {
            for (Index c = 0; c < u3.rows(); ++c) {
                cxd acc(0.0, 0.0);
                for (Index p = 0; p < g.dim(0); ++p)
                    for (Index q = 0; q < g.dim(1); ++q)
                        for (Index r = 0; r < g.dim(2); ++r)
                            acc += g(p, q, r) * u1(a, p) * u2(b, q) * u3(c, r);
                out(a, b, c) = acc;
            }
        }
    }
    return out;
}

// Keep-top-k by full stable sort on (modulus desc, linear index asc).
inline ComplexTensor3 topk_full_sort(const ComplexTensor3& t, Index k) {
    std::vector<Index> idx(static_cast<std::size_t>(t.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        const double ma = std::abs(t[a]);
        const double mb = std::abs(t[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    ComplexTensor3 out(t.dims()[0], t.dims()[1], t.dims()[2]);
    for (Index i = 0; i < k; ++i) out[idx[static_cast<std::size_t>(i)]] = t[idx[static_cast<std::size_t>(i)]];
    return out;
}

inline ComplexTensor3 random_tensor(Index n1, Index n2, Index n3, std::uint64_t seed,
                                    const char* label = "tensor") {
    stz::CounterRng rng(seed, label);
    ComplexTensor3 t(n1, n2, n3);
    for (Index i = 0; i < t.size(); ++i) t[i] = rng.complex_gaussian();
    return t;
}

inline Eigen::MatrixXcd random_matrix(Index rows, Index cols, std::uint64_t seed,
                                      const char* label = "matrix") {
    stz::CounterRng rng(seed, label);
    Eigen::MatrixXcd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.complex_gaussian();
    return m;
}

// Gram-Schmidt of Gaussian columns; deterministic given the seed.
inline Eigen::MatrixXcd random_semi_orthogonal(Index n, Index r, std::uint64_t seed) {
    Eigen::MatrixXcd m = random_matrix(n, r, seed, "semi_orth");
    for (Index j = 0; j < r; ++j) {
        for (Index prev = 0; prev < j; ++prev) {
            m.col(j) -= m.col(prev).dot(m.col(j)) * m.col(prev);
        }
        // Re-orthogonalize once; plain GS drifts at these sizes.
        for (Index prev = 0; prev < j; ++prev) {
            m.col(j) -= m.col(prev).dot(m.col(j)) * m.col(prev);
        }
        m.col(j) /= m.col(j).norm();
    }
    return m;
}

// Literal sum-rate evaluation: explicit interference assembly, explicit
// matrix inverse, determinant form of the rate display.
inline double sum_rate_literal(const stz::ChannelSet& ch, const stz::WeightSet& w) {
    const auto& spec = ch.spec;
    const int r = spec.streams;
    const int total = spec.users * r;
    double sum = 0.0;
    for (int j = 0; j < spec.res_elements; ++j) {
        const int rb = j / spec.res_per_rb;
        for (int l = 0; l < total; ++l) {
            const int kl = l / r;
            const int sl = l % r;
            const Eigen::MatrixXcd& h = ch.h[static_cast<std::size_t>(kl)][static_cast<std::size_t>(j)];
            Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(spec.rx_antennas, spec.rx_antennas);
            for (int d = 0; d < spec.rx_antennas; ++d) c(d, d) = ch.noise(kl, j);
            for (int i = 0; i < total; ++i) {
                if (i == l) continue;
                Eigen::VectorXcd wi =
                    w.w[static_cast<std::size_t>(i / r)][static_cast<std::size_t>(rb)].col(i % r);
                if (wi.norm() > 0.0) wi /= wi.norm();
                const Eigen::VectorXcd hw = h * wi;
                for (int a = 0; a < spec.rx_antennas; ++a)
                    for (int b = 0; b < spec.rx_antennas; ++b) c(a, b) += hw(a) * std::conj(hw(b));
            }
            Eigen::VectorXcd wl = w.w[static_cast<std::size_t>(kl)][static_cast<std::size_t>(rb)].col(sl);
            if (wl.norm() > 0.0) wl /= wl.norm();
            const Eigen::VectorXcd hw = h * wl;
            const Eigen::MatrixXcd cinv = c.fullPivLu().inverse();
            cxd quad(0.0, 0.0);
            for (int a = 0; a < spec.rx_antennas; ++a)
                for (int b = 0; b < spec.rx_antennas; ++b) quad += std::conj(hw(a)) * cinv(a, b) * hw(b);
            sum += std::log2(std::abs(1.0 + quad));
        }
    }
    return sum;
}

}  // namespace oracles
