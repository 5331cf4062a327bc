#pragma once

#include <cstddef>
#include <vector>

#include "geovi/model.hpp"
#include "geovi/rng.hpp"

namespace geovi {

// Plain Hamiltonian Monte Carlo on H(xi, d) with a unit mass matrix:
// leapfrog trajectories plus a Metropolis accept.  Reference sampler for
// validating the variational approximations; no position-dependent mass.

struct HmcConfig {
    std::size_t n_samples = 1000;  // kept samples (post burn-in, post thinning)
    std::size_t burn_in = 500;     // discarded initial proposals
    std::size_t thin = 1;          // keep every thin-th post-burn-in state
    double step_size = 0.1;
    std::size_t leapfrog_steps = 20;
    bool adapt = true;             // step-size adaptation during burn-in only
    double target_accept = 0.7;
};

struct HmcResult {
    std::vector<Vec> samples;
    double acceptance_rate = 0.0;       // post burn-in
    double final_step_size = 0.0;
    double mean_abs_energy_error = 0.0;  // |Delta H| per post-burn-in trajectory
    bool low_acceptance = false;         // acceptance below 0.2
};

HmcResult hmc_reference(const Model& model, const Vec& xi0, const HmcConfig& cfg, Rng& rng);

}  // namespace geovi
