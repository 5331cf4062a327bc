#include "geovi/newton.hpp"

#include <cmath>
#include <limits>

#include "geovi/errors.hpp"

namespace geovi {

namespace {

// Probe an objective value; domain violations count as +inf.
double probe(const Objective& obj, const Vec& x) {
    try {
        const double v = obj.value(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
    } catch (const NonFiniteValue&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

NewtonResult newton_cg(const Objective& obj, Vec x0, const NewtonCgConfig& cfg) {
    require_dim(x0, obj.dim, "newton_cg start");
    NewtonResult res;
    res.x = std::move(x0);
    res.value = probe(obj, res.x);
    if (!std::isfinite(res.value)) throw DomainError("newton_cg: start point outside the domain");
    res.energies.push_back(res.value);

    const double sqrt_dim = std::sqrt(static_cast<double>(obj.dim));

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (res.value <= cfg.stop_below) {
            res.converged = true;
            break;
        }
        const Vec g = obj.gradient(res.x);
        require_finite(g, "newton_cg gradient");
        if (norm2(g) <= cfg.grad_tol * sqrt_dim) {
            res.converged = true;
            break;
        }

        const LinOp curv = obj.curvature(res.x);
        CgResult cg = cg_solve(curv, g, cfg.cg);
        res.cg_iterations += cg.iterations;
        Vec p = std::move(cg.x);
        double gp = dot(g, p);
        if (!(gp > 0.0)) {
            // CG failed to produce a descent direction; fall back to steepest
            // descent for this step.
            p = g;
            gp = dot(g, g);
        }

        double alpha = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        Vec x_new;
        bool accepted = false;
        for (int h = 0; h <= cfg.max_halvings; ++h) {
            x_new = res.x;
            axpy(-alpha, p, x_new);
            f_new = probe(obj, x_new);
            if (f_new <= res.value - cfg.armijo_c * alpha * gp) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            res.line_search_failed = true;
            break;
        }

        const double change = res.value - f_new;
        res.x = std::move(x_new);
        res.value = f_new;
        res.energies.push_back(f_new);
        res.iterations = it + 1;
        if (change <= cfg.energy_tol * std::max(1.0, std::fabs(res.value))) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace geovi
