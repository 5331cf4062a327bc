#include "geovi/linop.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "geovi/errors.hpp"

namespace geovi {

Vec LinOp::operator()(const Vec& v) const {
    require_dim(v, dim_in, "LinOp::apply");
    Vec out = apply(v);
    require_dim(out, dim_out, "LinOp::apply result");
    return out;
}

Vec LinOp::transpose_apply(const Vec& v) const {
    require_dim(v, dim_out, "LinOp::transpose_apply");
    if (symmetric()) {
        if (dim_in != dim_out) throw DimensionMismatch("LinOp: symmetric op must be square");
        return apply(v);
    }
    Vec out = apply_t(v);
    require_dim(out, dim_in, "LinOp::transpose_apply result");
    return out;
}

LinOp LinOp::identity(std::size_t n) {
    return symmetric_op(n, [](const Vec& v) { return v; });
}

LinOp LinOp::from_dense(const DenseMatrix& a) {
    LinOp op;
    op.dim_out = a.rows();
    op.dim_in = a.cols();
    op.apply = [a](const Vec& v) { return a.matvec(v); };
    op.apply_t = [a](const Vec& v) { return a.matvec_t(v); };
    return op;
}

LinOp LinOp::symmetric_op(std::size_t n, std::function<Vec(const Vec&)> apply) {
    LinOp op;
    op.dim_in = op.dim_out = n;
    op.apply = std::move(apply);
    return op;
}

CgResult cg_solve(const LinOp& op, const Vec& b, const CgSettings& settings) {
    if (op.dim_in != op.dim_out) throw DimensionMismatch("cg_solve: operator not square");
    const std::size_t n = op.dim_in;
    require_dim(b, n, "cg_solve rhs");
    require_finite(b, "cg_solve rhs");

    const int max_iter = settings.max_iter > 0
                             ? settings.max_iter
                             : static_cast<int>(std::min<std::size_t>(10 * n, 2000));

    CgResult res;
    res.x = zeros(n);
    Vec r = b;  // residual for x = 0
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    Vec p = r;
    double rr = dot(r, r);

    for (int it = 0; it < max_iter; ++it) {
        Vec ap = op(p);
        const double pap = dot(p, ap);
        if (!std::isfinite(pap)) throw NonFiniteValue("cg_solve: operator produced non-finite values");
        if (pap <= 0.0) {
            // Not SPD along this direction (or exact zero); stop with what we have.
            res.iterations = it;
            res.relative_residual = std::sqrt(rr) / bnorm;
            return res;
        }
        const double alpha = rr / pap;
        axpy(alpha, p, res.x);
        axpy(-alpha, ap, r);
        const double rr_new = dot(r, r);
        if (!std::isfinite(rr_new)) throw NonFiniteValue("cg_solve: non-finite residual");
        res.iterations = it + 1;
        if (std::sqrt(rr_new) <= settings.rel_tol * bnorm) {
            rr = rr_new;
            res.converged = true;
            break;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    res.relative_residual = std::sqrt(rr) / bnorm;
    return res;
}

std::size_t dense_limit() {
    if (const char* env = std::getenv("GEOVI_DENSE_LIMIT")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 3000;
}

DenseMatrix dense_materialize(const LinOp& op) {
    const std::size_t limit = dense_limit();
    if (op.dim_in > limit || op.dim_out > limit)
        throw DimensionTooLarge("dense_materialize: " + std::to_string(op.dim_out) + "x" +
                                std::to_string(op.dim_in) + " exceeds dense limit " +
                                std::to_string(limit));
    DenseMatrix a(op.dim_out, op.dim_in);
    Vec e(op.dim_in, 0.0);
    for (std::size_t j = 0; j < op.dim_in; ++j) {
        e[j] = 1.0;
        Vec col = op(e);
        for (std::size_t i = 0; i < op.dim_out; ++i) a(i, j) = col[i];
        e[j] = 0.0;
    }
    return a;
}

}  // namespace geovi
