#include "geovi/hmc.hpp"

#include <cmath>
#include <limits>

#include "geovi/errors.hpp"

namespace geovi {

namespace {

double probe_h(const Model& model, const Vec& xi) {
    try {
        const double v = model.hamiltonian(xi);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

HmcResult hmc_reference(const Model& model, const Vec& xi0, const HmcConfig& cfg, Rng& rng) {
    require_dim(xi0, model.dim, "hmc_reference start");
    if (!(cfg.step_size > 0.0) || cfg.leapfrog_steps == 0 || cfg.thin == 0)
        throw ConfigError("hmc_reference: step size, leapfrog steps and thin must be positive");

    HmcResult res;
    Vec xi = xi0;
    double h_cur = probe_h(model, xi);
    if (!std::isfinite(h_cur)) throw DomainError("hmc_reference: start outside the domain");

    double eps = cfg.step_size;
    const std::size_t total = cfg.burn_in + cfg.n_samples * cfg.thin;
    std::size_t accepted = 0, measured = 0;
    double abs_dh_sum = 0.0;

    for (std::size_t it = 0; it < total; ++it) {
        const Vec p0 = rng.normal_vec(model.dim);
        Vec q = xi;
        Vec p = p0;

        // Leapfrog; a domain violation anywhere voids the trajectory.
        bool valid = true;
        try {
            Vec g = model.grad_hamiltonian(q);
            axpy(-0.5 * eps, g, p);
            for (std::size_t s = 0; s < cfg.leapfrog_steps; ++s) {
                axpy(eps, p, q);
                g = model.grad_hamiltonian(q);
                axpy(s + 1 == cfg.leapfrog_steps ? -0.5 * eps : -eps, g, p);
            }
        } catch (const DomainError&) {
            valid = false;
        } catch (const NonFiniteValue&) {
            valid = false;
        }

        double accept_prob = 0.0;
        if (valid) {
            const double h_prop = probe_h(model, q);
            const double dh =
                h_prop + 0.5 * dot(p, p) - (h_cur + 0.5 * dot(p0, p0));
            if (std::isfinite(dh)) {
                accept_prob = std::min(1.0, std::exp(-dh));
                if (it >= cfg.burn_in) {
                    abs_dh_sum += std::fabs(dh);
                    ++measured;
                }
                if (rng.uniform() < accept_prob) {
                    xi = q;
                    h_cur = h_prop;
                    if (it >= cfg.burn_in) ++accepted;
                }
            } else if (it >= cfg.burn_in) {
                ++measured;
                abs_dh_sum += 1e3;  // divergent trajectory counted as a large error
            }
        } else if (it >= cfg.burn_in) {
            ++measured;
            abs_dh_sum += 1e3;
        }

        // Multiplicative step adaptation, burn-in only, so the kept chain is
        // generated by a fixed kernel.
        if (cfg.adapt && it < cfg.burn_in) {
            // Decaying stochastic approximation toward the target rate; a fixed
            // multiplicative step keeps oscillating across the stability edge.
            const double decay =
                1.0 - static_cast<double>(it) / static_cast<double>(cfg.burn_in);
            eps *= std::exp(0.05 * (accept_prob - cfg.target_accept) * decay);
        }

        if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0)
            res.samples.push_back(xi);
    }

    res.acceptance_rate =
        measured ? static_cast<double>(accepted) / static_cast<double>(measured) : 0.0;
    res.mean_abs_energy_error = measured ? abs_dh_sum / static_cast<double>(measured) : 0.0;
    res.final_step_size = eps;
    res.low_acceptance = res.acceptance_rate < 0.2;
    return res;
}

}  // namespace geovi
