#include "geovi/inference.hpp"

#include <cmath>
#include <limits>

#include "geovi/errors.hpp"
#include "geovi/linop.hpp"
#include "geovi/parallel.hpp"

namespace geovi {

namespace {

// One slot of a residual-draw batch: an antithetic pair or a single draw.
struct SlotResult {
    std::vector<Vec> residuals;
    std::vector<double> misfits;
    long newton_iters = 0;
    std::size_t retries = 0;
};

// Draw `slots` pairs (or singles) at the expansion point.  Each slot owns a
// deterministic chain of rng streams, so the batch is reproducible for any
// thread count; a DomainError restarts the slot on its next stream.
std::vector<SlotResult> draw_batch(const ExpansionPoint& at, std::size_t slots, bool pairs,
                                   bool mgvi, const SamplerConfig& scfg, const Rng& rng,
                                   int threads) {
    constexpr std::size_t kAttempts = 4;
    std::vector<SlotResult> out(slots);
    parallel_for(slots, threads, [&](std::size_t slot) {
        SlotResult& res = out[slot];
        for (std::size_t attempt = 0; attempt < kAttempts; ++attempt) {
            Rng draw_rng = rng.fork(slot + attempt * slots);
            try {
                if (pairs) {
                    auto [plus, minus] = mgvi ? draw_mgvi_residual_pair(at, draw_rng, scfg)
                                              : draw_residual_pair(at, draw_rng, scfg);
                    res.residuals = {plus.residual, minus.residual};
                    res.misfits = {plus.misfit, minus.misfit};
                    res.newton_iters += plus.newton_iters + minus.newton_iters;
                } else {
                    DrawResult one = mgvi ? draw_mgvi_residual(at, draw_rng, scfg)
                                          : draw_residual(at, draw_rng, scfg);
                    res.residuals = {one.residual};
                    res.misfits = {one.misfit};
                    res.newton_iters += one.newton_iters;
                }
                return;
            } catch (const DomainError&) {
                res.retries += 1;
            }
        }
        res.residuals.clear();
    });
    for (const SlotResult& res : out)
        if (res.residuals.empty())
            throw Error("residual draw failed persistently; aborting the run");
    return out;
}

// Draw the final residual set at state.xi_bar on a stream space disjoint
// from the per-iteration draws.
void draw_final_samples(const Model& model, const GeoViConfig& cfg, const Rng& rng, bool mgvi,
                        ApproximationState& state) {
    ExpansionPoint at(model, state.xi_bar);
    const std::size_t final_slots =
        cfg.antithetic ? (cfg.final_samples + 1) / 2 : cfg.final_samples;
    Rng final_rng = rng.fork(0x46494e414cULL);
    std::vector<SlotResult> batch =
        draw_batch(at, final_slots, cfg.antithetic, mgvi, cfg.sampler, final_rng, cfg.threads);
    for (SlotResult& s : batch) {
        for (std::size_t k = 0; k < s.residuals.size(); ++k) {
            if (state.residuals.size() == cfg.final_samples) break;
            state.residuals.push_back(std::move(s.residuals[k]));
            state.final_misfits.push_back(s.misfits[k]);
        }
        state.draw_newton_iterations += s.newton_iters;
        state.draw_retries += s.retries;
    }
}

ApproximationState run_alternating(const Model& model, const GeoViConfig& cfg, const Rng& rng,
                                   bool mgvi) {
    if (cfg.outer_max < 1) throw ConfigError("run: outer_max must be >= 1");
    if (cfg.pairs < 1) throw ConfigError("run: need at least one residual pair");
    if (cfg.final_samples < 1) throw ConfigError("run: need at least one final sample");

    ApproximationState state;
    Rng init_rng = rng.fork(0);
    Vec m = init_rng.normal_vec(model.dim);

    const double sqrt_dim = std::sqrt(static_cast<double>(model.dim));

    for (int outer = 1; outer <= cfg.outer_max; ++outer) {
        const Vec xi_bar = m;
        ExpansionPoint at(model, xi_bar);

        const std::size_t slots = cfg.antithetic ? cfg.pairs : 2 * cfg.pairs;
        Rng iter_rng = rng.fork(static_cast<std::uint64_t>(outer));
        std::vector<SlotResult> batch =
            draw_batch(at, slots, cfg.antithetic, mgvi, cfg.sampler, iter_rng, cfg.threads);
        std::vector<Vec> residuals;
        for (SlotResult& s : batch) {
            for (Vec& r : s.residuals) residuals.push_back(std::move(r));
            state.draw_newton_iterations += s.newton_iters;
            state.draw_retries += s.retries;
        }

        Objective obj;
        obj.dim = model.dim;
        obj.value = [&model, &residuals, &cfg](const Vec& p) {
            return kl_value_grad(model, p, residuals, cfg.threads).value;
        };
        obj.gradient = [&model, &residuals, &cfg](const Vec& p) {
            return kl_value_grad(model, p, residuals, cfg.threads).gradient;
        };
        obj.curvature = [&model, &residuals, &cfg](const Vec& p) {
            return averaged_metric(model, p, residuals, cfg.threads);
        };

        NewtonResult nres = newton_cg(obj, m, cfg.kl_newton);
        state.kl_cg_iterations += nres.cg_iterations;

        const KlEval kl_end = kl_value_grad(model, nres.x, residuals, cfg.threads);
        state.kl_dropped += kl_end.dropped;
        if (2 * kl_end.dropped > residuals.size())
            throw Error("more than half the KL samples left the model domain; aborting");
        state.kl_trace.push_back(kl_end.value);
        state.outer_iterations = outer;

        const double shift_norm = norm2(sub(nres.x, xi_bar));
        m = nres.x;

        // Within-iteration KL improvement on the fixed sample set; comparing
        // across iterations would race the sampling noise at small N.
        const double improvement = nres.energies.front() - nres.value;
        const double rel_change = improvement / std::max(1.0, std::fabs(nres.value));
        if (rel_change < cfg.kl_rel_tol && shift_norm < cfg.shift_tol * sqrt_dim) {
            state.converged = true;
            break;
        }
    }

    // Final sample set at the converged expansion point.
    state.xi_bar = m;
    draw_final_samples(model, cfg, rng, mgvi, state);
    return state;
}

}  // namespace

std::vector<Vec> ApproximationState::samples() const {
    std::vector<Vec> out;
    out.reserve(residuals.size());
    for (const Vec& r : residuals) {
        Vec xi = xi_bar;
        axpy(1.0, r, xi);
        out.push_back(std::move(xi));
    }
    return out;
}

ApproximationState run_geovi(const Model& model, const GeoViConfig& cfg, const Rng& rng) {
    return run_alternating(model, cfg, rng, /*mgvi=*/false);
}

ApproximationState run_mgvi(const Model& model, const GeoViConfig& cfg, const Rng& rng) {
    return run_alternating(model, cfg, rng, /*mgvi=*/true);
}

ApproximationState sample_at(const Model& model, const Vec& xi_bar, const GeoViConfig& cfg,
                             const Rng& rng, bool mgvi) {
    require_dim(xi_bar, model.dim, "sample_at expansion point");
    if (cfg.final_samples < 1) throw ConfigError("sample_at: need at least one sample");
    ApproximationState state;
    state.xi_bar = xi_bar;
    draw_final_samples(model, cfg, rng, mgvi, state);
    return state;
}

NewtonResult run_direct_lowdim(const Model& model, const NewtonCgConfig& cfg, const Vec& x0) {
    if (model.dim > kDirectDimLimit)
        throw DimensionTooLarge("run_direct_lowdim: dimension " + std::to_string(model.dim) +
                                " exceeds the dense limit " + std::to_string(kDirectDimLimit));

    auto logdet_at = [&model](const Vec& xi) {
        return cholesky_logdet(dense_materialize(model.metric(xi)));
    };

    Objective obj;
    obj.dim = model.dim;
    obj.value = [&model, logdet_at](const Vec& xi) {
        return model.hamiltonian(xi) + 0.5 * logdet_at(xi);
    };
    obj.gradient = [&model, logdet_at](const Vec& xi) {
        Vec g = model.grad_hamiltonian(xi);
        Vec xp = xi, xm = xi;
        for (std::size_t c = 0; c < xi.size(); ++c) {
            const double h = 1e-5 * (1.0 + std::fabs(xi[c]));
            xp[c] = xi[c] + h;
            xm[c] = xi[c] - h;
            g[c] += 0.5 * (logdet_at(xp) - logdet_at(xm)) / (2.0 * h);
            xp[c] = xi[c];
            xm[c] = xi[c];
        }
        return g;
    };
    obj.curvature = [&model](const Vec& xi) { return model.metric(xi); };

    const Vec start = x0.empty() ? zeros(model.dim) : x0;
    return newton_cg(obj, start, cfg);
}

double metric_logdet(const Model& model, const Vec& xi_bar) {
    const std::size_t n = model.dim;
    const std::size_t k = model.xi_transform.dim_out;
    const std::size_t limit = dense_limit();
    ExpansionPoint at(model, xi_bar);

    if (n <= limit && n <= k) return cholesky_logdet(dense_materialize(at.metric()));
    if (k <= limit) {
        // det(1_n + J^T J) = det(1_k + J J^T): Gram matrix of the rows of J.
        std::vector<Vec> rows(k);
        for (std::size_t i = 0; i < k; ++i) {
            Vec e(k, 0.0);
            e[i] = 1.0;
            rows[i] = at.jac_t(e);
        }
        DenseMatrix w(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = dot(rows[i], rows[j]);
                w(i, j) = v;
                w(j, i) = v;
            }
        for (std::size_t i = 0; i < k; ++i) w(i, i) += 1.0;
        return cholesky_logdet(w);
    }
    if (n <= limit) return cholesky_logdet(dense_materialize(at.metric()));
    throw DimensionTooLarge("metric_logdet: neither latent nor data space fits the dense limit");
}

ElboEstimate elbo(const Model& model, const ApproximationState& state) {
    if (state.residuals.empty()) throw DimensionMismatch("elbo: state has no samples");
    ElboEstimate out;
    out.logdet_metric = metric_logdet(model, state.xi_bar);

    const std::vector<std::size_t> order = canonical_order(state.residuals);
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i : order) {
        Vec xi = state.xi_bar;
        axpy(1.0, state.residuals[i], xi);
        try {
            const double h = model.full_hamiltonian(xi);
            sum += h;
            sumsq += h * h;
            ++out.n;
        } catch (const DomainError&) {
            ++out.dropped;
        }
    }
    if (out.n == 0) throw DomainError("elbo: every sample left the model domain");
    const double nd = static_cast<double>(out.n);
    const double mean = sum / nd;
    out.value = 0.5 * static_cast<double>(model.dim) - 0.5 * out.logdet_metric - mean;
    if (out.n > 1) {
        const double var = std::max(0.0, (sumsq - nd * mean * mean) / (nd - 1.0));
        out.std_error = std::sqrt(var / nd);
    }
    return out;
}

}  // namespace geovi
