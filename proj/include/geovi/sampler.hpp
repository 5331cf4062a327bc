#pragma once

#include "geovi/model.hpp"
#include "geovi/newton.hpp"
#include "geovi/rng.hpp"

namespace geovi {

// How the non-linear inversion is initialized: from the prior realization
// eta_1 entering z, or from the solution of the linearized problem
// M_bar (xi - xi_bar) = z.
enum class SamplerStart { eta1, linearized };

struct SamplerConfig {
    SamplerStart start = SamplerStart::eta1;
    NewtonCgConfig newton{.max_iter = 25,
                          .grad_tol = 1e-7,
                          .energy_tol = 1e-11,
                          .stop_below = 0.0,  // adjusted per-draw to misfit_target * dim
                          .cg = {1e-4, 100},
                          .armijo_c = 1e-4,
                          .max_halvings = 20};
    double misfit_target = 1e-10;  // stop when 0.5||z - gtilde||^2 <= target * dim
    CgSettings mgvi_cg{1e-6, 0};   // linear solve for first-order residuals
};

struct DrawResult {
    Vec residual;  // xi* - xi_bar
    double misfit = 0.0;
    bool converged = false;
    int newton_iters = 0;
};

// One geometric residual: draw z ~ N(0, M_bar) as eta_1 + J_bar^T eta_2 and
// invert gtilde by Newton-CG on 0.5 ||z - gtilde(xi)||^2 with Gauss-Newton
// curvature.  Returns r* = xi* - xi_bar.
DrawResult draw_residual(const ExpansionPoint& at, Rng& rng, const SamplerConfig& cfg = {});

// Antithetic pair: the same (eta_1, eta_2) with z and -z, solved separately
// (the inversion is non-linear, so the pair is only approximately mirrored).
std::pair<DrawResult, DrawResult> draw_residual_pair(const ExpansionPoint& at, Rng& rng,
                                                     const SamplerConfig& cfg = {});

// First-order (MGVI) residual: solve M_bar r = z by CG, r ~ N(0, M_bar^-1).
DrawResult draw_mgvi_residual(const ExpansionPoint& at, Rng& rng, const SamplerConfig& cfg = {});

// MGVI antithetic pair is exact by linearity: (r, -r).
std::pair<DrawResult, DrawResult> draw_mgvi_residual_pair(const ExpansionPoint& at, Rng& rng,
                                                          const SamplerConfig& cfg = {});

}  // namespace geovi
