#include <doctest.h>

#include <cmath>

#include "stz/errors.hpp"
#include "stz/hosvd.hpp"
#include "stz/linalg.hpp"
#include "stz/solver.hpp"
#include "stz/channel.hpp"
#include "stz/zf.hpp"
#include "support/oracles.hpp"

using namespace stz;

namespace {

// Exactly representable instance: sparse core, random semi-orthogonal
// factors, sparse residual with entries well above the low-rank level.
struct ExactInstance {
    ComplexTensor3 v;
    ComplexTensor3 core;
    std::array<FactorMatrix, 3> factors;
    ComplexTensor3 residual;
};

ExactInstance make_exact(const Dims3& dims, const Dims3& ranks, Index alpha1, Index alpha2,
                         std::uint64_t seed) {
    ExactInstance inst;
    inst.core = oracles::topk_full_sort(
        oracles::random_tensor(ranks[0], ranks[1], ranks[2], seed, "core"), alpha1);
    inst.factors[0] = oracles::random_semi_orthogonal(dims[0], ranks[0], seed + 1);
    inst.factors[1] = oracles::random_semi_orthogonal(dims[1], ranks[1], seed + 2);
    inst.factors[2] = oracles::random_semi_orthogonal(dims[2], ranks[2], seed + 3);
    ComplexTensor3 low = tucker_reconstruct(inst.core, inst.factors[0], inst.factors[1],
                                            inst.factors[2]);
    double peak = 0.0;
    for (Index i = 0; i < low.size(); ++i) peak = std::max(peak, std::abs(low[i]));

    inst.residual = ComplexTensor3(dims[0], dims[1], dims[2]);
    CounterRng rng(seed, "spikes");
    Index placed = 0;
    while (placed < alpha2) {
        const Index pos = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(low.size()));
        if (inst.residual[pos] != cxd(0.0, 0.0)) continue;
        inst.residual[pos] = rng.complex_gaussian() * (3.0 * peak);
        ++placed;
    }
    inst.v = low;
    inst.v += inst.residual;
    return inst;
}

ComplexTensor3 zf_weight_tensor(Index nt, Index j, std::uint64_t seed) {
    ChannelSpec spec;
    spec.model = ChannelModel::Geometric;
    spec.users = 1;
    spec.res_elements = static_cast<int>(j);
    spec.tx_antennas = static_cast<int>(nt);
    spec.rx_antennas = 2;
    spec.streams = 2;
    spec.seed = seed;
    const ChannelSet ch = synth_channels(spec);
    WeightSet w = zf_weights(ch);
    return std::move(w.v[0]);
}

}  // namespace

TEST_CASE("prox_l0_topk: keeps the two largest moduli") {
    ComplexTensor3 t(4, 1, 1);
    t[0] = cxd(3, 0);
    t[1] = cxd(1, 0);
    t[2] = cxd(-4, 0);
    t[3] = cxd(2, 0);
    const ComplexTensor3 r = prox_l0_topk(t, 2);
    CHECK(r[0] == cxd(3, 0));
    CHECK(r[1] == cxd(0, 0));
    CHECK(r[2] == cxd(-4, 0));
    CHECK(r[3] == cxd(0, 0));
}

TEST_CASE("prox_l0_topk: k = numel keeps everything") {
    const ComplexTensor3 t = oracles::random_tensor(2, 3, 2, 5);
    const ComplexTensor3 r = prox_l0_topk(t, t.size());
    for (Index i = 0; i < t.size(); ++i) CHECK(r[i] == t[i]);
}

TEST_CASE("prox_l0_topk: matches full-sort oracle, ties keep lowest index") {
    const ComplexTensor3 t = oracles::random_tensor(2, 3, 4, 6);
    const ComplexTensor3 got = prox_l0_topk(t, 5);
    const ComplexTensor3 want = oracles::topk_full_sort(t, 5);
    for (Index i = 0; i < t.size(); ++i) CHECK(got[i] == want[i]);

    ComplexTensor3 tie(2, 1, 1);
    tie[0] = cxd(1, 0);
    tie[1] = cxd(0, 1);  // equal modulus
    const ComplexTensor3 kept = prox_l0_topk(tie, 1);
    CHECK(kept[0] == cxd(1, 0));
    CHECK(kept[1] == cxd(0, 0));
}

TEST_CASE("update_core: exact decomposition is a fixed point") {
    const ExactInstance inst = make_exact({3, 6, 5}, {2, 3, 3}, 9, 0, 100);
    SparseTucker state;
    state.core = inst.core;
    state.factors = inst.factors;
    state.factors_extrap = inst.factors;
    state.residual = ComplexTensor3(3, 6, 5);
    for (double eta : {0.1, 1.0, 50.0}) {
        const ComplexTensor3 next = update_core(state, inst.v, eta, 9);
        double err = 0.0;
        for (Index i = 0; i < next.size(); ++i) err = std::max(err, std::abs(next[i] - inst.core[i]));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("update_core: large step with square unitary factors back-projects") {
    const ComplexTensor3 v = oracles::random_tensor(3, 4, 2, 101);
    SparseTucker state;
    state.core = ComplexTensor3(3, 4, 2);
    for (int m = 0; m < 3; ++m) {
        const Index n = v.dim(m);
        state.factors[static_cast<std::size_t>(m)] =
            oracles::random_semi_orthogonal(n, n, 200 + static_cast<std::uint64_t>(m));
    }
    state.factors_extrap = state.factors;
    state.residual = ComplexTensor3(3, 4, 2);
    const ComplexTensor3 next = update_core(state, v, 1e12, v.size());
    const ComplexTensor3 want = tucker_project(v, state.factors[0], state.factors[1],
                                               state.factors[2]);
    CHECK(relative_error(next, want) < 1e-9);
}

TEST_CASE("update_core: does not increase the prox subproblem objective") {
    const ComplexTensor3 v = oracles::random_tensor(2, 4, 4, 103);
    const HosvdResult h = hosvd(v, {2, 3, 3});
    SparseTucker state;
    state.core = prox_l0_topk(h.core, 8);
    state.factors = h.factors;
    state.factors_extrap = h.factors;
    state.residual = ComplexTensor3(2, 4, 4);

    const double eta = 0.7;
    const auto prox_objective = [&](const ComplexTensor3& g) {
        ComplexTensor3 dg = g;
        dg -= state.core;
        ComplexTensor3 rec = tucker_reconstruct(g, state.factors_extrap[0],
                                                state.factors_extrap[1], state.factors_extrap[2]);
        double fit = 0.0;
        for (Index i = 0; i < v.size(); ++i) fit += std::norm(v[i] - rec[i]);
        return 0.5 * dg.squared_norm() + 0.5 * eta * fit;
    };

    const ComplexTensor3 next = update_core(state, v, eta, 8);
    CHECK(next.nonzero_count() <= 8);
    CHECK(prox_objective(next) <= prox_objective(state.core) + 1e-12);

    // Proximal-point optimality: no random alpha1-sparse candidate beats it.
    CounterRng rng(104, "candidates");
    for (int trial = 0; trial < 200; ++trial) {
        ComplexTensor3 cand = oracles::topk_full_sort(
            oracles::random_tensor(2, 3, 3, 3000 + static_cast<std::uint64_t>(trial), "cand"), 8);
        cand *= cxd(rng.uniform() * 2.0, 0.0);
        CHECK(prox_objective(next) <= prox_objective(cand) + 1e-12);
    }
}

TEST_CASE("update_factor: semi-orthogonal target is returned unchanged") {
    // With a zero core the polar argument reduces to Ubar / eta, so the
    // update must return Ubar itself.
    const ComplexTensor3 v = oracles::random_tensor(5, 4, 3, 105);
    SparseTucker state;
    state.core = ComplexTensor3(2, 2, 2);
    state.factors[0] = oracles::random_semi_orthogonal(5, 2, 300);
    state.factors[1] = oracles::random_semi_orthogonal(4, 2, 301);
    state.factors[2] = oracles::random_semi_orthogonal(3, 2, 302);
    state.factors_extrap = state.factors;
    state.residual = ComplexTensor3(5, 4, 3);
    const FactorMatrix u = update_factor(state, v, 0, 2.0);
    CHECK((u - state.factors[0]).norm() < 1e-10);
}

TEST_CASE("update_factor: Procrustes limit recovers the true factor") {
    const ExactInstance inst = make_exact({5, 6, 4}, {2, 3, 2}, 12, 0, 107);
    SparseTucker state;
    state.core = inst.core;
    state.factors = inst.factors;
    state.factors_extrap = inst.factors;
    // Perturb the mode-0 extrapolated factor; a huge eta ignores it.
    state.factors_extrap[0] = oracles::random_semi_orthogonal(5, 2, 400);
    state.residual = ComplexTensor3(5, 6, 4);
    const FactorMatrix u = update_factor(state, inst.v, 0, 1e12);
    CHECK((u - inst.factors[0]).norm() < 1e-8);
}

TEST_CASE("update_factor: result is optimal over random semi-orthogonal candidates") {
    const ComplexTensor3 v = oracles::random_tensor(6, 4, 3, 109);
    SparseTucker state;
    state.core = oracles::random_tensor(3, 2, 2, 110, "core");
    state.factors[0] = oracles::random_semi_orthogonal(6, 3, 500);
    state.factors[1] = oracles::random_semi_orthogonal(4, 2, 501);
    state.factors[2] = oracles::random_semi_orthogonal(3, 2, 502);
    state.factors_extrap = state.factors;
    state.residual = ComplexTensor3(6, 4, 3);

    const double eta = 1.5;
    const FactorMatrix u = update_factor(state, v, 0, eta);
    CHECK(is_semi_orthogonal(u, 1e-10));

    // Recompute the polar argument the way the update defines it.
    ComplexTensor3 expanded = state.core;
    expanded = detail::apply_mode(expanded, state.factors_extrap[1], 1);
    expanded = detail::apply_mode(expanded, state.factors_extrap[2], 2);
    const Eigen::MatrixXcd m =
        unfold(v, 0) * unfold(expanded, 0).adjoint() + (1.0 / eta) * state.factors_extrap[0];
    const double best = (u.adjoint() * m).trace().real();
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const Eigen::MatrixXcd c = oracles::random_semi_orthogonal(6, 3, 7000 + s);
        CHECK((c.adjoint() * m).trace().real() <= best + 1e-9);
    }
}

TEST_CASE("update_sparse: alpha2 = 0 returns the zero tensor") {
    const ExactInstance inst = make_exact({3, 4, 4}, {2, 2, 2}, 6, 0, 111);
    SparseTucker state;
    state.core = inst.core;
    state.factors = inst.factors;
    state.factors_extrap = inst.factors;
    state.residual = oracles::random_tensor(3, 4, 4, 112);  // ignored
    const ComplexTensor3 s = update_sparse(state, inst.v, 1.0, 0);
    CHECK(s.nonzero_count() == 0);
}

TEST_CASE("update_sparse: exact decomposition keeps the residual at zero") {
    const ExactInstance inst = make_exact({3, 4, 4}, {2, 2, 2}, 6, 0, 113);
    SparseTucker state;
    state.core = inst.core;
    state.factors = inst.factors;
    state.factors_extrap = inst.factors;
    state.residual = ComplexTensor3(3, 4, 4);
    const ComplexTensor3 s = update_sparse(state, inst.v, 2.0, 10);
    double mag = 0.0;
    for (Index i = 0; i < s.size(); ++i) mag = std::max(mag, std::abs(s[i]));
    CHECK(mag < 1e-12);
}

TEST_CASE("update_sparse: matches the two-step oracle") {
    const ComplexTensor3 v = oracles::random_tensor(3, 4, 5, 115);
    SparseTucker state;
    state.core = oracles::random_tensor(2, 2, 2, 116, "core");
    state.factors[0] = oracles::random_semi_orthogonal(3, 2, 600);
    state.factors[1] = oracles::random_semi_orthogonal(4, 2, 601);
    state.factors[2] = oracles::random_semi_orthogonal(5, 2, 602);
    state.factors_extrap = state.factors;
    state.residual = oracles::random_tensor(3, 4, 5, 117, "resid");

    const double eta = 0.8;
    const ComplexTensor3 got = update_sparse(state, v, eta, 10);

    ComplexTensor3 rec = tucker_reconstruct(state.core, state.factors_extrap[0],
                                            state.factors_extrap[1], state.factors_extrap[2]);
    ComplexTensor3 b(3, 4, 5);
    for (Index i = 0; i < b.size(); ++i) {
        b[i] = (eta * (v[i] - rec[i]) + state.residual[i]) / (eta + 1.0);
    }
    const ComplexTensor3 want = oracles::topk_full_sort(b, 10);
    for (Index i = 0; i < b.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-15);
}

TEST_CASE("extrapolate_factor basics") {
    const FactorMatrix u = oracles::random_matrix(4, 2, 118);
    const FactorMatrix ubar = oracles::random_matrix(4, 2, 119);
    CHECK((extrapolate_factor(u, ubar, 0.0) - u).norm() == 0.0);
    CHECK((extrapolate_factor(u, u, 0.7) - u).norm() == 0.0);
    const FactorMatrix two = 2.0 * ubar;
    CHECK((extrapolate_factor(two, ubar, 0.5) - 2.5 * ubar).norm() < 1e-14);
}

TEST_CASE("apbcd_solve: exact recovery of a feasible instance") {
    const Dims3 dims = {2, 16, 24};
    const Dims3 ranks = {2, 4, 5};
    StdConfig cfg;
    cfg.ranks = ranks;
    cfg.s1 = 0.25;  // alpha1 = 10
    cfg.s2 = 0.01;  // alpha2 = 7
    cfg.beta = 0.3;
    cfg.max_iters = 50;
    cfg.tol = 0.0;  // run to max_iters
    const Index alpha1 = cfg.alpha1();
    const Index alpha2 = cfg.alpha2(dims);
    const ExactInstance inst = make_exact(dims, ranks, alpha1, alpha2, 121);

    const SolveResult res = apbcd_solve(inst.v, cfg);
    CHECK(res.trace.records.back().rel_err <= 1e-8);
    CHECK(res.state.core.nonzero_count() <= alpha1);
    CHECK(res.state.residual.nonzero_count() <= alpha2);
    for (const auto& u : res.state.factors) CHECK(is_semi_orthogonal(u, 1e-10));
}

TEST_CASE("apbcd_solve: relative error plateaus on synthetic ZF weights") {
    const ComplexTensor3 v = zf_weight_tensor(16, 24, 123);
    StdConfig cfg;
    cfg.ranks = {2, 6, 8};
    cfg.s1 = 0.5;
    cfg.s2 = 0.01;
    cfg.beta = 0.3;
    cfg.max_iters = 30;
    cfg.tol = 0.0;
    const SolveResult res = apbcd_solve(v, cfg);
    const auto& rec = res.trace.records;
    REQUIRE(rec.size() >= 31);
    for (std::size_t k = 15; k + 1 < rec.size(); ++k) {
        CHECK(std::abs(rec[k].rel_err - rec[k + 1].rel_err) < 1e-3);
    }
}

TEST_CASE("apbcd_solve: step-norm partial sums stay bounded with and without inertia") {
    const ComplexTensor3 v = zf_weight_tensor(12, 16, 125);
    for (double beta : {0.0, 0.3}) {
        StdConfig cfg;
        cfg.ranks = {2, 4, 5};
        cfg.s1 = 0.5;
        cfg.s2 = 0.005;
        cfg.beta = beta;
        cfg.max_iters = 40;
        cfg.tol = 0.0;
        const SolveResult res = apbcd_solve(v, cfg);
        double partial = 0.0;
        for (const auto& r : res.trace.records) {
            partial += r.step_sq;
            CHECK(std::isfinite(partial));
        }
        // Increments shrink: the tail contributes a vanishing share.
        const auto& rec = res.trace.records;
        double head = 0.0, tail = 0.0;
        for (std::size_t k = 1; k <= 5; ++k) head += rec[k].step_sq;
        for (std::size_t k = rec.size() - 5; k < rec.size(); ++k) tail += rec[k].step_sq;
        CHECK(tail <= head + 1e-15);
    }
}

TEST_CASE("apbcd_solve: objective is monotone without inertia") {
    for (std::uint64_t seed : {10u, 11u, 12u, 13u}) {
        const ComplexTensor3 v = oracles::random_tensor(2, 8, 12, seed);
        StdConfig cfg;
        cfg.ranks = {2, 3, 4};
        cfg.s1 = 0.5;
        cfg.s2 = 0.02;
        cfg.beta = 0.0;
        cfg.max_iters = 25;
        cfg.tol = 0.0;
        const SolveResult res = apbcd_solve(v, cfg);
        const auto& rec = res.trace.records;
        for (std::size_t k = 1; k < rec.size(); ++k) {
            CHECK(rec[k].objective <= rec[k - 1].objective + 1e-12);
            CHECK(rec[k].aux == rec[k].objective);  // gamma terms vanish at beta = 0
        }
    }
}

TEST_CASE("apbcd_solve: auxiliary function is monotone with inertia") {
    for (std::uint64_t seed : {20u, 21u, 22u, 23u}) {
        const ComplexTensor3 v = oracles::random_tensor(2, 8, 12, seed);
        StdConfig cfg;
        cfg.ranks = {2, 3, 4};
        cfg.s1 = 0.5;
        cfg.s2 = 0.02;
        cfg.beta = 0.3;
        cfg.max_iters = 30;
        cfg.tol = 0.0;
        const SolveResult res = apbcd_solve(v, cfg);
        const auto& rec = res.trace.records;
        for (std::size_t k = 2; k < rec.size(); ++k) {
            CHECK(rec[k].aux <= rec[k - 1].aux + 1e-9 * std::max(1.0, rec[k - 1].aux));
        }
        // The extrapolation gap dies out: compare early and late gap terms.
        double head = 0.0, tail = 0.0;
        for (std::size_t k = 1; k <= 5; ++k) head += rec[k].aux - rec[k].objective;
        for (std::size_t k = rec.size() - 5; k < rec.size(); ++k) tail += rec[k].aux - rec[k].objective;
        CHECK(tail <= head + 1e-12);
        CHECK(tail / 5.0 < 1e-3);
    }
}

TEST_CASE("apbcd_solve: deterministic, bit-identical reruns") {
    const ComplexTensor3 v = oracles::random_tensor(2, 6, 8, 127);
    StdConfig cfg;
    cfg.ranks = {2, 3, 3};
    cfg.s1 = 0.5;
    cfg.s2 = 0.01;
    cfg.max_iters = 15;
    const SolveResult a = apbcd_solve(v, cfg);
    const SolveResult b = apbcd_solve(v, cfg);
    for (Index i = 0; i < a.state.core.size(); ++i) CHECK(a.state.core[i] == b.state.core[i]);
    for (int m = 0; m < 3; ++m) {
        CHECK((a.state.factors[static_cast<std::size_t>(m)] -
               b.state.factors[static_cast<std::size_t>(m)]).norm() == 0.0);
    }
    for (Index i = 0; i < a.state.residual.size(); ++i) {
        CHECK(a.state.residual[i] == b.state.residual[i]);
    }
    REQUIRE(a.trace.records.size() == b.trace.records.size());
    for (std::size_t k = 0; k < a.trace.records.size(); ++k) {
        CHECK(a.trace.records[k].objective == b.trace.records[k].objective);
    }
}

TEST_CASE("apbcd_solve: zero input returns the zero decomposition") {
    ComplexTensor3 v(2, 4, 4);
    StdConfig cfg;
    cfg.ranks = {1, 2, 2};
    cfg.s1 = 1.0;
    const SolveResult res = apbcd_solve(v, cfg);
    CHECK(res.state.core.nonzero_count() == 0);
    CHECK(res.state.residual.nonzero_count() == 0);
    CHECK(res.trace.records.back().rel_err == 0.0);
}

TEST_CASE("apbcd_solve: divergence is detected and aborts") {
    const ComplexTensor3 v = oracles::random_tensor(3, 5, 4, 129);
    StdConfig cfg;
    cfg.ranks = {2, 2, 2};
    cfg.s1 = 1.0;
    cfg.beta = 0.5;
    cfg.eta_auto = false;
    cfg.eta_core = 1e8;
    cfg.eta_sparse = 1.0;
    cfg.eta_factor = {1.0, 1.0, 1.0};
    cfg.max_iters = 10;
    const HosvdResult h = hosvd(v, cfg.ranks);
    SparseTucker init;
    init.core = h.core;
    init.factors = h.factors;
    init.factors_extrap = h.factors;
    for (auto& u : init.factors_extrap) u *= 40.0;  // corrupted warm start
    init.residual = ComplexTensor3(3, 5, 4);
    CHECK_THROWS_AS(apbcd_solve_from(v, cfg, std::move(init)), NumericError);
}

TEST_CASE("auto_step_sizes: bounds and guards") {
    const ExactInstance inst = make_exact({3, 6, 5}, {2, 3, 3}, 9, 0, 131);
    SparseTucker state;
    state.core = inst.core;
    state.factors = inst.factors;
    state.factors_extrap = inst.factors;
    state.residual = ComplexTensor3(3, 6, 5);

    const StepSizes s = auto_step_sizes(state, inst.v, 0.3);
    CHECK(s.core > 0.0);
    CHECK(s.sparse > 0.0);
    // Orthonormal factors make the core-block Lipschitz constant 1.
    const double m_implied = 1.0 / s.core - 1.0;
    CHECK(s.core <= 2.0 / (1.0 + m_implied) + 1e-15);

    // Doubling the core magnitude must not increase factor steps.
    SparseTucker louder = state;
    louder.core *= cxd(2.0, 0.0);
    const StepSizes s2 = auto_step_sizes(louder, inst.v, 0.3);
    for (int i = 0; i < 3; ++i) {
        CHECK(s2.factor[static_cast<std::size_t>(i)] <= s.factor[static_cast<std::size_t>(i)] + 1e-15);
    }

    // All-zero core still yields positive finite steps.
    SparseTucker quiet = state;
    quiet.core.set_zero();
    const StepSizes s3 = auto_step_sizes(quiet, inst.v, 0.3);
    for (int i = 0; i < 3; ++i) {
        CHECK(s3.factor[static_cast<std::size_t>(i)] > 0.0);
        CHECK(std::isfinite(s3.factor[static_cast<std::size_t>(i)]));
    }
}

TEST_CASE("StdConfig validation rejects bad values") {
    const Dims3 dims = {2, 8, 8};
    StdConfig cfg;
    cfg.ranks = {2, 4, 4};
    cfg.s1 = 0.5;
    CHECK_NOTHROW(cfg.validate(dims));

    StdConfig bad = cfg;
    bad.ranks = {3, 4, 4};  // r1 > n1
    CHECK_THROWS_AS(bad.validate(dims), ContractError);

    bad = cfg;
    bad.s1 = 0.0;
    CHECK_THROWS_AS(bad.validate(dims), ContractError);

    bad = cfg;
    bad.beta = 1.0;
    CHECK_THROWS_AS(bad.validate(dims), ContractError);

    bad = cfg;
    bad.s1 = 0.01;  // alpha1 = 0
    CHECK_THROWS_AS(bad.validate(dims), ContractError);
}
