#include "stz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "stz/errors.hpp"
#include "stz/hosvd.hpp"
#include "stz/linalg.hpp"

namespace stz {

Index StdConfig::alpha1() const {
    return static_cast<Index>(std::floor(s1 * static_cast<double>(ranks[0] * ranks[1] * ranks[2])));
}

Index StdConfig::alpha2(const Dims3& dims) const {
    return static_cast<Index>(std::floor(s2 * static_cast<double>(dims[0] * dims[1] * dims[2])));
}

void StdConfig::validate(const Dims3& dims) const {
    for (int m = 0; m < 3; ++m) {
        const Index r = ranks[static_cast<std::size_t>(m)];
        if (r < 1 || r > dims[static_cast<std::size_t>(m)]) {
            throw ContractError("StdConfig: rank out of range at mode " + std::to_string(m + 1));
        }
    }
    if (!(s1 > 0.0 && s1 <= 1.0)) throw ContractError("StdConfig: s1 must be in (0, 1]");
    if (!(s2 >= 0.0 && s2 <= 1.0)) throw ContractError("StdConfig: s2 must be in [0, 1]");
    if (!(beta >= 0.0 && beta < 1.0)) throw ContractError("StdConfig: beta must be in [0, 1)");
    if (alpha1() < 1) throw ContractError("StdConfig: s1 too small, alpha1 must be >= 1");
    if (max_iters < 1) throw ContractError("StdConfig: max_iters must be >= 1");
    if (!(tol >= 0.0)) throw ContractError("StdConfig: tol must be nonnegative");
    if (!eta_auto) {
        if (!(eta_core > 0.0) || !(eta_sparse > 0.0) || !(eta_factor[0] > 0.0) ||
            !(eta_factor[1] > 0.0) || !(eta_factor[2] > 0.0)) {
            throw ContractError("StdConfig: manual step sizes must be positive");
        }
    }
    if (eta_refresh < 1) throw ContractError("StdConfig: eta_refresh must be >= 1");
}

ComplexTensor3 SparseTucker::reconstruct() const {
    ComplexTensor3 t = tucker_reconstruct(core, factors[0], factors[1], factors[2]);
    t += residual;
    return t;
}

void DescentTrace::write_csv(std::ostream& out) const {
    out << "iter,objective,H,step_sq,rel_err\n";
    for (const DescentRecord& r : records) {
        out << r.iter << ',' << r.objective << ',' << r.aux << ',' << r.step_sq << ','
            << r.rel_err << '\n';
    }
}

ComplexTensor3 prox_l0_topk(const ComplexTensor3& t, Index k) {
    const Index n = t.size();
    if (k < 0 || k > n) throw ContractError("prox_l0_topk: k out of range");
    ComplexTensor3 out(t.dims()[0], t.dims()[1], t.dims()[2]);
    if (k == 0) return out;
    if (k == n) return t;

    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    // Modulus descending, lower linear index wins ties; nth_element with a
    // total order keeps the selection deterministic.
    const auto cmp = [&](Index a, Index b) {
        const double ma = std::abs(t[a]);
        const double mb = std::abs(t[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), cmp);
    for (Index j = 0; j < k; ++j) {
        const Index lin = idx[static_cast<std::size_t>(j)];
        out[lin] = t[lin];
    }
    return out;
}

ComplexTensor3 update_core(const SparseTucker& state, const ComplexTensor3& v, double eta_core,
                           Index alpha1) {
    if (!(eta_core > 0.0)) throw ContractError("update_core: eta must be positive");
    ComplexTensor3 diff = v;
    diff -= state.residual;
    ComplexTensor3 projected = tucker_project(diff, state.factors_extrap[0],
                                              state.factors_extrap[1], state.factors_extrap[2]);
    ComplexTensor3 a = state.core;
    for (Index i = 0; i < a.size(); ++i) {
        a[i] = (eta_core * projected[i] + a[i]) / (eta_core + 1.0);
    }
    if (!a.all_finite()) throw NumericError("update_core: non-finite intermediate");
    return prox_l0_topk(a, alpha1);
}

FactorMatrix update_factor(const SparseTucker& state, const ComplexTensor3& v, int mode,
                           double eta_factor, bool* rank_deficient) {
    if (!(eta_factor > 0.0)) throw ContractError("update_factor: eta must be positive");
    if (mode < 0 || mode > 2) throw ContractError("update_factor: bad mode");

    // Expand the core through the companion extrapolated factors, leaving
    // mode i untouched.
    ComplexTensor3 expanded = state.core;
    for (int j = 0; j < 3; ++j) {
        if (j == mode) continue;
        expanded = detail::apply_mode(expanded, state.factors_extrap[static_cast<std::size_t>(j)], j);
    }
    ComplexTensor3 diff = v;
    diff -= state.residual;

    const Eigen::MatrixXcd lhs = unfold(diff, mode);          // n_i x rest
    const Eigen::MatrixXcd b = unfold(expanded, mode);        // r_i x rest
    Eigen::MatrixXcd m = lhs * b.adjoint();
    m += (1.0 / eta_factor) * state.factors_extrap[static_cast<std::size_t>(mode)];
    if (!m.allFinite()) throw NumericError("update_factor: non-finite intermediate");

    bool deficient = false;
    FactorMatrix u = polar_factor(m, &deficient);
    if (rank_deficient != nullptr) *rank_deficient = deficient;
    return u;
}

ComplexTensor3 update_sparse(const SparseTucker& state, const ComplexTensor3& v,
                             double eta_sparse, Index alpha2) {
    if (!(eta_sparse > 0.0)) throw ContractError("update_sparse: eta must be positive");
    ComplexTensor3 out(v.dims()[0], v.dims()[1], v.dims()[2]);
    if (alpha2 == 0) return out;

    ComplexTensor3 low_rank = tucker_reconstruct(state.core, state.factors_extrap[0],
                                                 state.factors_extrap[1], state.factors_extrap[2]);
    ComplexTensor3 b = state.residual;
    for (Index i = 0; i < b.size(); ++i) {
        b[i] = (eta_sparse * (v[i] - low_rank[i]) + b[i]) / (eta_sparse + 1.0);
    }
    if (!b.all_finite()) throw NumericError("update_sparse: non-finite intermediate");
    return prox_l0_topk(b, alpha2);
}

FactorMatrix extrapolate_factor(const FactorMatrix& u_new, const FactorMatrix& u_bar_old,
                                double beta) {
    if (u_new.rows() != u_bar_old.rows() || u_new.cols() != u_bar_old.cols()) {
        throw ContractError("extrapolate_factor: shape mismatch");
    }
    return u_new + beta * (u_new - u_bar_old);
}

namespace {

double objective_value(const ComplexTensor3& v, const SparseTucker& state) {
    ComplexTensor3 rec = state.reconstruct();
    double s = 0.0;
    for (Index i = 0; i < v.size(); ++i) s += std::norm(v[i] - rec[i]);
    return 0.5 * s;
}

}  // namespace

StepSizes auto_step_sizes(const SparseTucker& state, const ComplexTensor3& v, double beta) {
    constexpr double kMFloor = 1e-6;
    // Damping ratio of the proximal anchors. The anchor stabilizes the
    // nonconvex sweep; at 1/50 of the curvature estimate it no longer
    // throttles the tail convergence rate.
    constexpr double kDamping = 50.0;

    // Blockwise Lipschitz estimates at the current iterate. The core block
    // sees the factor Grams only; each factor block sees the spectral norm
    // of the expanded core's mode unfolding.
    std::array<double, 3> factor_spec{};
    for (int i = 0; i < 3; ++i) {
        factor_spec[static_cast<std::size_t>(i)] =
            spectral_norm(state.factors_extrap[static_cast<std::size_t>(i)]);
    }
    double l_core = 1.0;
    for (int i = 0; i < 3; ++i) {
        const double s = factor_spec[static_cast<std::size_t>(i)];
        l_core *= std::max(s * s, 1.0);
    }
    std::array<double, 3> l_factor{};
    for (int i = 0; i < 3; ++i) {
        const double sigma = spectral_norm(unfold(state.core, i));
        double companions = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            const double s = factor_spec[static_cast<std::size_t>(j)];
            companions *= std::max(s * s, 1.0);
        }
        l_factor[static_cast<std::size_t>(i)] = std::max(sigma * sigma * companions, 1e-12);
    }
    const double l_sparse = 1.0;

    // Cross-block coupling bound: twice the relative magnitude of the
    // residual-based gradient map at the current iterate, floored. It
    // decays as the fit improves, so the prox anchors relax near a fixed
    // point instead of freezing the iteration.
    ComplexTensor3 rec = tucker_reconstruct(state.core, state.factors_extrap[0],
                                            state.factors_extrap[1], state.factors_extrap[2]);
    double resid_sq = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        resid_sq += std::norm(v[i] - state.residual[i] - rec[i]);
    }
    const double v_norm = v.norm();
    const double m =
        std::max(v_norm > 0.0 ? 2.0 * std::sqrt(resid_sq) / v_norm : 0.0, kMFloor);

    StepSizes out;
    out.core = kDamping / (l_core + m);
    out.sparse = kDamping / (l_sparse + m);
    for (int i = 0; i < 3; ++i) {
        out.factor[static_cast<std::size_t>(i)] =
            kDamping / (l_factor[static_cast<std::size_t>(i)] + m);
    }

    // Auxiliary-function weights, instantiated from the descent analysis
    // with eps = (1 - beta^2) / (2 (1 + beta^2)) and the factor step the
    // same analysis prescribes. With no inertia the companion terms vanish
    // and H reduces to the objective.
    if (beta > 0.0) {
        const double b2 = beta * beta;
        const double eps = (1.0 - b2) / (2.0 * (1.0 + b2));
        for (int i = 0; i < 3; ++i) {
            const double li = l_factor[static_cast<std::size_t>(i)];
            const double mi = m * static_cast<double>(i + 1);
            const double ti = (1.0 + eps + beta * (1.0 - eps)) * (li + m) * (1.0 + beta);
            const double eta_lemma = (1.0 + eps - b2 * (1.0 - eps)) /
                                     (5.0 * b2 * m * (1.0 + eps) - 2.0 * mi * eps * b2 + 2.0 * ti);
            double gamma = (1.0 + b2) / (4.0 * eta_lemma * b2) + (2.0 * mi - 5.0) / 4.0 +
                           (li + m) * (1.0 + beta) * (beta - 1.0) / (2.0 * b2);
            out.gamma[static_cast<std::size_t>(i)] = std::max(gamma, 0.0);
        }
    }
    return out;
}

SolveResult apbcd_solve(const ComplexTensor3& v, const StdConfig& cfg) {
    cfg.validate(v.dims());
    if (!v.all_finite()) throw ContractError("apbcd_solve: input has non-finite entries");

    SparseTucker init;
    const Dims3& d = v.dims();
    if (v.norm() == 0.0) {
        // Degenerate input: the all-zero decomposition already attains it.
        init.core = ComplexTensor3(cfg.ranks[0], cfg.ranks[1], cfg.ranks[2]);
        init.residual = ComplexTensor3(d[0], d[1], d[2]);
        for (int i = 0; i < 3; ++i) {
            FactorMatrix u = FactorMatrix::Identity(d[static_cast<std::size_t>(i)],
                                                    cfg.ranks[static_cast<std::size_t>(i)]);
            init.factors[static_cast<std::size_t>(i)] = u;
            init.factors_extrap[static_cast<std::size_t>(i)] = u;
        }
        SolveResult res;
        res.state = std::move(init);
        res.trace.records.push_back({0, 0.0, 0.0, 0.0, 0.0});
        return res;
    }

    HosvdResult h = hosvd(v, cfg.ranks);
    // Threshold the init core so iterate 0 already satisfies the sparsity
    // constraint; the model objective is finite from the start.
    init.core = prox_l0_topk(h.core, cfg.alpha1());
    init.factors = h.factors;
    init.factors_extrap = h.factors;
    init.residual = ComplexTensor3(d[0], d[1], d[2]);
    return apbcd_solve_from(v, cfg, std::move(init));
}

SolveResult apbcd_solve_from(const ComplexTensor3& v, const StdConfig& cfg, SparseTucker init) {
    cfg.validate(v.dims());
    const Index alpha1 = cfg.alpha1();
    const Index alpha2 = cfg.alpha2(v.dims());
    const double v_norm = v.norm();
    if (v_norm == 0.0) throw ContractError("apbcd_solve_from: zero input");

    SparseTucker state = std::move(init);
    StepSizes steps;
    if (cfg.eta_auto) {
        steps = auto_step_sizes(state, v, cfg.beta);
    } else {
        steps.core = cfg.eta_core;
        steps.sparse = cfg.eta_sparse;
        steps.factor = cfg.eta_factor;
        StepSizes gammas = auto_step_sizes(state, v, cfg.beta);
        steps.gamma = gammas.gamma;
    }

    DescentTrace trace;
    const double obj0 = objective_value(v, state);
    double aux0 = obj0;
    for (int i = 0; i < 3; ++i) {
        aux0 += steps.gamma[static_cast<std::size_t>(i)] *
                (state.factors[static_cast<std::size_t>(i)] -
                 state.factors_extrap[static_cast<std::size_t>(i)])
                    .squaredNorm();
    }
    trace.records.push_back({0, obj0, aux0, 0.0, std::sqrt(2.0 * obj0) / v_norm});

    const double divergence_cap = 10.0 * std::max(obj0, 1e-12 * v_norm * v_norm);
    int flat_count = 0;
    double prev_rel_err = trace.records.front().rel_err;

    for (int k = 1; k <= cfg.max_iters; ++k) {
        if (cfg.eta_auto && (k - 1) % cfg.eta_refresh == 0 && k > 1) {
            steps = auto_step_sizes(state, v, cfg.beta);
        }

        const ComplexTensor3 core_prev = state.core;
        const ComplexTensor3 resid_prev = state.residual;
        const std::array<FactorMatrix, 3> factors_prev = state.factors;

        state.core = update_core(state, v, steps.core, alpha1);

        for (int i = 0; i < 3; ++i) {
            bool deficient = false;
            FactorMatrix u = update_factor(state, v, i, steps.factor[static_cast<std::size_t>(i)],
                                           &deficient);
            if (deficient) ++state.rank_deficient_updates;
            state.factors_extrap[static_cast<std::size_t>(i)] =
                extrapolate_factor(u, state.factors_extrap[static_cast<std::size_t>(i)], cfg.beta);
            state.factors[static_cast<std::size_t>(i)] = std::move(u);
        }

        state.residual = update_sparse(state, v, steps.sparse, alpha2);
        state.iterations = k;

        double step_sq = 0.0;
        {
            ComplexTensor3 dc = state.core;
            dc -= core_prev;
            step_sq += dc.squared_norm();
            ComplexTensor3 ds = state.residual;
            ds -= resid_prev;
            step_sq += ds.squared_norm();
            for (int i = 0; i < 3; ++i) {
                step_sq += (state.factors[static_cast<std::size_t>(i)] -
                            factors_prev[static_cast<std::size_t>(i)])
                               .squaredNorm();
            }
        }

        const double obj = objective_value(v, state);
        double aux = obj;
        for (int i = 0; i < 3; ++i) {
            aux += steps.gamma[static_cast<std::size_t>(i)] *
                   (state.factors[static_cast<std::size_t>(i)] -
                    state.factors_extrap[static_cast<std::size_t>(i)])
                       .squaredNorm();
        }
        const double rel_err = std::sqrt(2.0 * obj) / v_norm;
        if (!std::isfinite(obj) || !std::isfinite(step_sq)) {
            throw NumericError("apbcd_solve: non-finite iterate at iteration " + std::to_string(k));
        }
        trace.records.push_back({k, obj, aux, step_sq, rel_err});

        if (obj > divergence_cap) {
            throw NumericError("apbcd_solve: objective exceeded 10x its initial value at iteration " +
                               std::to_string(k) + " (step sizes likely too large)");
        }

        if (std::abs(rel_err - prev_rel_err) < cfg.tol) {
            if (++flat_count >= 3) {
                prev_rel_err = rel_err;
                break;
            }
        } else {
            flat_count = 0;
        }
        prev_rel_err = rel_err;
    }

    SolveResult res;
    res.state = std::move(state);
    res.trace = std::move(trace);
    return res;
}

}  // namespace stz
