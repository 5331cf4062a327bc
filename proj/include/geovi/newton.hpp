#pragma once

#include <functional>
#include <vector>

#include "geovi/linop.hpp"
#include "geovi/vec.hpp"

namespace geovi {

// Smooth objective with an SPD curvature proxy (Gauss-Newton or metric).
struct Objective {
    std::size_t dim = 0;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<LinOp(const Vec&)> curvature;
};

struct NewtonCgConfig {
    int max_iter = 25;
    double grad_tol = 1e-6;    // on ||grad|| / sqrt(dim)
    double energy_tol = 1e-9;  // relative accepted-energy change
    double stop_below = -1e300;  // absolute early-out on the value
    CgSettings cg{1e-4, 100};
    double armijo_c = 1e-4;
    int max_halvings = 20;
};

struct NewtonResult {
    Vec x;
    double value = 0.0;
    std::vector<double> energies;  // accepted energies, monotone non-increasing
    bool converged = false;
    bool line_search_failed = false;
    int iterations = 0;
    long cg_iterations = 0;
};

// Newton-CG with backtracking Armijo line search.  The curvature solve uses
// plain CG; a step that fails to satisfy the Armijo condition after
// max_halvings halvings sets line_search_failed and returns the best point.
// Value probes that throw DomainError or NonFiniteValue are treated as
// +infinity (step rejected), so the iterate never leaves the domain.
NewtonResult newton_cg(const Objective& obj, Vec x0, const NewtonCgConfig& cfg);

}  // namespace geovi
