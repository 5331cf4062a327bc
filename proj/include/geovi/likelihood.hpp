#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geovi/diffmap.hpp"
#include "geovi/vec.hpp"

namespace geovi {

// Negative log-likelihood over model outputs s', together with the
// coordinate transform x(s') whose Jacobian reproduces the likelihood's
// Fisher metric: M(s') = (dx/ds')^T (dx/ds').  `energy` drops s'-independent
// terms; `energy_constant` carries them so absolute quantities (evidence
// bounds) can be reconstructed as energy + energy_constant.
struct Likelihood {
    std::string family;
    Vec data;
    std::size_t dim_s = 0;
    DiffMap transform;  // s' -> x
    std::function<double(const Vec&)> energy_fn;
    std::function<Vec(const Vec&)> grad_fn;
    double energy_constant = 0.0;

    double energy(const Vec& s) const;
    double full_energy(const Vec& s) const { return energy(s) + energy_constant; }
    Vec grad(const Vec& s) const;
};

// Gaussian with fixed diagonal noise covariance (variance per data point).
Likelihood normal_likelihood(const Vec& data, const Vec& variance);
Likelihood normal_likelihood(const Vec& data, double sigma);

// Poisson counts with rate s'.  Rates below 1e-12 are floored inside the
// log only (guard against underflow of analytically positive rates); the
// flooring events are counted, see poisson_floor_count().
Likelihood poisson_likelihood(const Vec& counts);
long poisson_floor_count();
void reset_poisson_floor_count();

// Inverse-gamma with shape alpha and scale q, n independent points.
Likelihood inverse_gamma_likelihood(std::size_t n, double alpha, double q);

// Student-t with theta degrees of freedom, n independent points.
Likelihood student_t_likelihood(std::size_t n, double theta);

// Bernoulli with success rate s' in (0,1); data entries in {0,1}.
Likelihood bernoulli_likelihood(const Vec& data);

// Normal with unknown mean and variance per data point:
// s' = (m_1..m_n, v_1..v_n), transform pair ((d-m)/sqrt(v), log(v)/2).
// The transform's squared Jacobian matches the Fisher metric only in
// expectation over the data.
Likelihood variable_noise_normal(const Vec& data);

// Independent likelihoods observing the same s' vector: energies add,
// transforms concatenate.  `selectors` maps the combined s' to each
// component's input (identity when empty, in which case all components
// must have dim_s == combined dim).
Likelihood stack_likelihoods(const std::vector<Likelihood>& parts,
                             const std::vector<DiffMap>& selectors = {});

}  // namespace geovi
