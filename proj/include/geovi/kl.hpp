#pragma once

#include <cstddef>
#include <vector>

#include "geovi/model.hpp"

namespace geovi {

// Sampled KL objective over the shift m: the expectation of the Hamiltonian
// under the approximation, estimated as (1/N) sum_i H(m + r_i, d) with the
// residual set held fixed.  The entropy term does not depend on m and is
// dropped here.

struct KlEval {
    double value = 0.0;
    Vec gradient;
    std::size_t used = 0;     // samples entering the estimate
    std::size_t dropped = 0;  // samples rejected by DomainError at m + r
};

// Value and gradient of the sampled KL.  Samples whose shifted point lies
// outside the model domain are dropped (caller decides when too many drops
// invalidate the run); if every sample drops, DomainError propagates.
// The reduction order is fixed by sorting the residuals lexicographically,
// so the result is bit-identical under permutation of `residuals` and under
// any thread count.
KlEval kl_value_grad(const Model& model, const Vec& m, const std::vector<Vec>& residuals,
                     int threads = 1);

// Sample-averaged metric (1/N) sum_i M(m + r_i) as an implicit SPD operator;
// the curvature proxy for Newton steps on the sampled KL.  Applies the same
// drop rule and canonical ordering as kl_value_grad.
LinOp averaged_metric(const Model& model, const Vec& m, const std::vector<Vec>& residuals,
                      int threads = 1);

// Canonical evaluation order: indices of `residuals` sorted lexicographically.
std::vector<std::size_t> canonical_order(const std::vector<Vec>& residuals);

}  // namespace geovi
