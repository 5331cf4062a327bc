#pragma once

#include <cstddef>
#include <vector>

#include "geovi/kl.hpp"
#include "geovi/model.hpp"
#include "geovi/newton.hpp"
#include "geovi/rng.hpp"
#include "geovi/sampler.hpp"

namespace geovi {

// Alternating scheme: freeze the expansion point at the current shift, draw
// residual samples there, minimize the sampled KL over the shift, repeat.
// The first-order variant swaps the geometric draws for linearized ones and
// is otherwise identical.

struct GeoViConfig {
    int outer_max = 15;
    std::size_t pairs = 4;           // residual pairs per optimization iteration
    std::size_t final_samples = 100;  // residuals drawn at the final expansion point
    bool antithetic = true;           // pair each draw with its mirrored partner
    double kl_rel_tol = 1e-3;         // relative KL change declaring convergence
    double shift_tol = 1e-2;          // shift-update norm tolerance, scaled by sqrt(dim)
    NewtonCgConfig kl_newton{};       // Newton-CG over the shift
    SamplerConfig sampler{};
    int threads = 1;
};

struct ApproximationState {
    Vec xi_bar;                     // final shift; expansion point of the final samples
    std::vector<Vec> residuals;     // final residual set r_i
    std::vector<double> kl_trace;   // sampled KL after each outer iteration
    std::vector<double> final_misfits;  // inversion misfits (or CG residuals) of final draws
    long kl_cg_iterations = 0;
    long draw_newton_iterations = 0;
    int outer_iterations = 0;
    bool converged = false;
    std::size_t kl_dropped = 0;   // samples dropped from KL estimates (domain violations)
    std::size_t draw_retries = 0;  // residual draws restarted on a fresh stream

    // Posterior samples xi_i = xi_bar + r_i.
    std::vector<Vec> samples() const;
};

ApproximationState run_geovi(const Model& model, const GeoViConfig& cfg, const Rng& rng);
ApproximationState run_mgvi(const Model& model, const GeoViConfig& cfg, const Rng& rng);

// Residual set drawn at a fixed expansion point (no shift optimization):
// the approximation anchored at xi_bar, e.g. for the direct method or for
// studying specific expansion points.
ApproximationState sample_at(const Model& model, const Vec& xi_bar, const GeoViConfig& cfg,
                             const Rng& rng, bool mgvi = false);

// Direct low-dimensional method: minimize H(xi, d) + 0.5 log det M(xi) with
// a dense Cholesky log-determinant and a central finite-difference gradient
// for the log-det term.  Dimension capped (the log-det gradient costs
// O(dim^2) metric materializations).
inline constexpr std::size_t kDirectDimLimit = 64;
NewtonResult run_direct_lowdim(const Model& model, const NewtonCgConfig& cfg = {},
                               const Vec& x0 = {});

// Evidence lower bound from a residual set:
//   ELBO = dim/2 - 0.5 log|M_bar| - (1/N) sum_i H_full(xi_bar + r_i)
// with H_full including the likelihood's normalization constants.
struct ElboEstimate {
    double value = 0.0;
    double std_error = 0.0;  // Monte-Carlo error of the Hamiltonian average
    double logdet_metric = 0.0;
    std::size_t n = 0;        // samples used
    std::size_t dropped = 0;  // samples outside the model domain
};
ElboEstimate elbo(const Model& model, const ApproximationState& state);

// log det M_bar, dense in latent space when it fits, otherwise through the
// determinant lemma in data space: det(1 + J^T J) = det(1 + J J^T).
double metric_logdet(const Model& model, const Vec& xi_bar);

}  // namespace geovi
