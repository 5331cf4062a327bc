#pragma once

#include <memory>

#include "geovi/diffmap.hpp"
#include "geovi/likelihood.hpp"
#include "geovi/linop.hpp"
#include "geovi/vec.hpp"

namespace geovi {

// Generative model in standardized coordinates: xi ~ N(0, 1) a priori,
// s' = forward(xi) feeds the likelihood.  The composed coordinate transform
// x(xi) = transform(forward(xi)) carries the likelihood's Fisher metric:
//   M(xi) = J(xi)^T J(xi) + 1,   J = dx/dxi,
// which is the posterior metric (likelihood pullback plus prior identity).
struct Model {
    std::size_t dim = 0;  // latent dimension
    DiffMap forward;      // xi -> s'
    Likelihood likelihood;
    DiffMap xi_transform;  // xi -> x

    static Model make(const DiffMap& forward, const Likelihood& likelihood);

    // H(xi, d) = likelihood energy at forward(xi) + xi^T xi / 2.
    double hamiltonian(const Vec& xi) const;
    // Including the likelihood's normalization constants (evidence work).
    double full_hamiltonian(const Vec& xi) const;
    Vec grad_hamiltonian(const Vec& xi) const;

    // Posterior metric at xi as an implicit SPD operator.
    LinOp metric(const Vec& xi) const;
};

// Frozen expansion point: caches x(xi_bar) and exposes the Jacobian actions
// of the transform at xi_bar.
class ExpansionPoint {
  public:
    ExpansionPoint(const Model& model, Vec xi_bar);

    const Model& model() const { return *model_; }
    const Vec& xi_bar() const { return xi_bar_; }
    const Vec& x_bar() const { return x_bar_; }

    Vec jac(const Vec& v) const;    // (dx/dxi)|_bar v
    Vec jac_t(const Vec& u) const;  // (dx/dxi)|_bar^T u

    // M_bar = 1 + J_bar^T J_bar.
    LinOp metric() const;

    // Dense inverse square root of M_bar (symmetric eigendecomposition).
    // Computed on first use; dense-limit rules apply.
    const DenseMatrix& inv_sqrt_metric_dense() const;

  private:
    std::shared_ptr<const Model> model_;
    Vec xi_bar_;
    Vec x_bar_;
    mutable std::shared_ptr<const DenseMatrix> inv_sqrt_;
};

// gtilde(xi; xi_bar) = xi - xi_bar + J_bar^T (x(xi) - x_bar).
Vec gtilde(const ExpansionPoint& at, const Vec& xi);

// Jacobian action of gtilde at xi: v + J_bar^T J(xi) v.
Vec gtilde_jvp(const ExpansionPoint& at, const Vec& xi, const Vec& v);
Vec gtilde_vjp(const ExpansionPoint& at, const Vec& xi, const Vec& u);

// Full transform g = sqrt(M_bar)^-1 gtilde.  Dense diagnostic path.
Vec g_full_dense(const ExpansionPoint& at, const Vec& xi);

}  // namespace geovi
