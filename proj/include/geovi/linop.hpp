#pragma once

#include <cstddef>
#include <functional>

#include "geovi/dense.hpp"
#include "geovi/vec.hpp"

namespace geovi {

// Matrix-free linear operator.  Large operators (metrics, curvatures) are
// only ever touched through apply/apply_t; dense forms exist solely for
// low-dimensional diagnostics.
struct LinOp {
    std::size_t dim_out = 0;
    std::size_t dim_in = 0;
    std::function<Vec(const Vec&)> apply;
    std::function<Vec(const Vec&)> apply_t;  // transpose action; empty if symmetric

    bool symmetric() const { return !apply_t; }

    Vec operator()(const Vec& v) const;
    Vec transpose_apply(const Vec& v) const;

    static LinOp identity(std::size_t n);
    static LinOp from_dense(const DenseMatrix& a);
    // Symmetric operator from just the apply closure.
    static LinOp symmetric_op(std::size_t n, std::function<Vec(const Vec&)> apply);
};

struct CgSettings {
    double rel_tol = 1e-6;
    int max_iter = 0;  // 0: min(10 * dim, 2000)
};

struct CgResult {
    Vec x;
    bool converged = false;
    int iterations = 0;
    double relative_residual = 0.0;
};

// Plain conjugate gradients on an SPD operator.  Non-convergence within the
// iteration cap is reported through the flag, not an exception; non-finite
// iterates throw NonFiniteValue.
CgResult cg_solve(const LinOp& op, const Vec& b, const CgSettings& settings = {});

// Column-by-column materialization (op applied to basis vectors).  Refuses
// dimensions above the dense limit: 3000, overridable through the
// GEOVI_DENSE_LIMIT environment variable.
DenseMatrix dense_materialize(const LinOp& op);

std::size_t dense_limit();

}  // namespace geovi
