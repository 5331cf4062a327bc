#include "geovi/sampler.hpp"

#include <cmath>

#include "geovi/errors.hpp"

namespace geovi {

namespace {

// Newton-CG inversion of z = gtilde(xi) from a given start point.
DrawResult invert_gtilde(const ExpansionPoint& at, const Vec& z, const Vec& xi0,
                         const SamplerConfig& cfg) {
    const std::size_t dim = at.model().dim;

    Objective obj;
    obj.dim = dim;
    obj.value = [&at, &z](const Vec& xi) {
        const Vec diff = sub(z, gtilde(at, xi));
        return 0.5 * dot(diff, diff);
    };
    obj.gradient = [&at, &z](const Vec& xi) {
        return gtilde_vjp(at, xi, sub(gtilde(at, xi), z));
    };
    obj.curvature = [&at](const Vec& xi) {
        // Gauss-Newton: (d gtilde)^T (d gtilde), SPD since d gtilde = 1 + ...
        Vec point = xi;
        const ExpansionPoint* atp = &at;
        return LinOp::symmetric_op(point.size(), [atp, point](const Vec& v) {
            return gtilde_vjp(*atp, point, gtilde_jvp(*atp, point, v));
        });
    };

    NewtonCgConfig ncfg = cfg.newton;
    ncfg.stop_below = cfg.misfit_target * static_cast<double>(dim);

    NewtonResult nres = newton_cg(obj, xi0, ncfg);

    DrawResult res;
    res.residual = sub(nres.x, at.xi_bar());
    res.misfit = nres.value;
    res.converged = nres.value <= ncfg.stop_below || nres.converged;
    res.newton_iters = nres.iterations;
    return res;
}

Vec start_point(const ExpansionPoint& at, const Vec& z, const Vec& eta1, SamplerStart mode,
                const SamplerConfig& cfg) {
    if (mode == SamplerStart::eta1) return eta1;
    // Linearized: M_bar (xi - xi_bar) = z.
    CgResult lin = cg_solve(at.metric(), z, cfg.mgvi_cg);
    Vec xi0 = at.xi_bar();
    axpy(1.0, lin.x, xi0);
    return xi0;
}

}  // namespace

DrawResult draw_residual(const ExpansionPoint& at, Rng& rng, const SamplerConfig& cfg) {
    const Vec eta1 = rng.normal_vec(at.model().dim);
    const Vec eta2 = rng.normal_vec(at.model().xi_transform.dim_out);
    Vec z = at.jac_t(eta2);
    axpy(1.0, eta1, z);
    return invert_gtilde(at, z, start_point(at, z, eta1, cfg.start, cfg), cfg);
}

std::pair<DrawResult, DrawResult> draw_residual_pair(const ExpansionPoint& at, Rng& rng,
                                                     const SamplerConfig& cfg) {
    const Vec eta1 = rng.normal_vec(at.model().dim);
    const Vec eta2 = rng.normal_vec(at.model().xi_transform.dim_out);
    Vec z = at.jac_t(eta2);
    axpy(1.0, eta1, z);
    const Vec z_neg = scaled(z, -1.0);
    const Vec eta1_neg = scaled(eta1, -1.0);

    DrawResult plus = invert_gtilde(at, z, start_point(at, z, eta1, cfg.start, cfg), cfg);
    DrawResult minus =
        invert_gtilde(at, z_neg, start_point(at, z_neg, eta1_neg, cfg.start, cfg), cfg);
    return {plus, minus};
}

DrawResult draw_mgvi_residual(const ExpansionPoint& at, Rng& rng, const SamplerConfig& cfg) {
    const Vec eta1 = rng.normal_vec(at.model().dim);
    const Vec eta2 = rng.normal_vec(at.model().xi_transform.dim_out);
    Vec z = at.jac_t(eta2);
    axpy(1.0, eta1, z);

    CgResult cg = cg_solve(at.metric(), z, cfg.mgvi_cg);
    DrawResult res;
    res.residual = std::move(cg.x);
    res.misfit = cg.relative_residual;
    res.converged = cg.converged;
    res.newton_iters = cg.iterations;
    return res;
}

std::pair<DrawResult, DrawResult> draw_mgvi_residual_pair(const ExpansionPoint& at, Rng& rng,
                                                          const SamplerConfig& cfg) {
    DrawResult plus = draw_mgvi_residual(at, rng, cfg);
    DrawResult minus = plus;
    minus.residual = scaled(plus.residual, -1.0);
    return {plus, minus};
}

}  // namespace geovi
