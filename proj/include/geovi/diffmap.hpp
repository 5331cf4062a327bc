#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geovi/dense.hpp"
#include "geovi/linop.hpp"
#include "geovi/rng.hpp"
#include "geovi/vec.hpp"

namespace geovi {

// Differentiable map between real coordinate spaces, carried as a triple of
// closures: forward value, tangent action J(x) v and cotangent action
// J(x)^T u.  There is no taping autodiff here; every primitive supplies its
// own hand-written derivative actions, and composition chains them.  Domain
// violations (log of a non-positive number, ...) throw DomainError rather
// than clamping.
struct DiffMap {
    std::size_t dim_in = 0;
    std::size_t dim_out = 0;
    std::string name;
    std::function<Vec(const Vec&)> forward_fn;
    std::function<Vec(const Vec&, const Vec&)> tangent_fn;
    std::function<Vec(const Vec&, const Vec&)> cotangent_fn;

    bool valid() const { return static_cast<bool>(forward_fn); }

    // Checked entry points: dimension and finiteness guards at the boundary.
    Vec forward(const Vec& x) const;
    Vec jvp(const Vec& x, const Vec& v) const;
    Vec vjp(const Vec& x, const Vec& u) const;
};

// ---- composition and structure ----

// compose(outer, inner): x -> outer(inner(x)).
DiffMap compose(const DiffMap& outer, const DiffMap& inner);

// Independent input blocks, concatenated outputs (block-diagonal Jacobian).
DiffMap stack_blocks(const std::vector<DiffMap>& maps);

// Shared input, concatenated outputs (stacked Jacobian; cotangents add).
DiffMap fanout_shared(const std::vector<DiffMap>& maps);

// ---- primitives ----

DiffMap identity_map(std::size_t n);

// Elementwise a * x + b with scalar coefficients.
DiffMap affine_map(std::size_t n, double a, double b);

// Dense linear map x -> A x.
DiffMap linear_map(const DenseMatrix& a);

// x-independent linear map from an implicit operator (DFT synthesis,
// convolutions, masks): tangent is the operator itself, cotangent its
// transpose.
DiffMap linear_op_map(const LinOp& op, const std::string& name);

// Elementwise map with scalar value/derivative functions.  `f` may throw
// DomainError.
DiffMap pointwise_map(std::size_t n, const std::string& name,
                      std::function<double(double)> f, std::function<double(double)> df);

DiffMap exp_map(std::size_t n);
DiffMap log_map(std::size_t n);           // domain x > 0
DiffMap sigmoid_map(std::size_t n);
DiffMap pow_map(std::size_t n, double p); // domain x > 0 unless p is a non-negative integer

// Sum of all entries -> single output.
DiffMap sum_map(std::size_t n);

// Pointwise product of two stacked blocks: (u, v) in R^{2n} -> u .* v.
DiffMap product_map(std::size_t n);

// Pointwise sum of two stacked blocks: (u, v) in R^{2n} -> u + v.
DiffMap add_map(std::size_t n);

// Gather: out[i] = x[indices[i]].  Repeated indices broadcast (the
// cotangent scatter-adds).
DiffMap select_map(std::size_t dim_in, const std::vector<std::size_t>& indices);

// Scalar -> n copies.
DiffMap broadcast_map(std::size_t n);

// Pointwise standard normal CDF.
DiffMap normal_cdf_map(std::size_t n);

// ---- finite-difference verification ----

struct FdSettings {
    double step = 1e-5;          // relative to ||x|| + 1
    double tol_tangent = 1e-6;
    double tol_adjoint = 1e-10;
    int directions = 3;
};

struct FdReport {
    bool pass = false;
    double max_tangent_err = 0.0;  // relative, with a 1e-4 absolute floor
    double max_adjoint_err = 0.0;
    std::string map_name;
};

// Compares jvp against central differences along random directions, and
// checks the adjoint identity <u, J v> == <J^T u, v>.  Directional
// derivatives smaller than the 1e-4 floor are compared absolutely against
// tol * floor.
FdReport fd_check(const DiffMap& map, const Vec& x, Rng& rng, const FdSettings& s = {});

}  // namespace geovi
