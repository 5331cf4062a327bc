#include "geovi/model.hpp"

#include "geovi/errors.hpp"

namespace geovi {

Model Model::make(const DiffMap& forward, const Likelihood& likelihood) {
    if (forward.dim_out != likelihood.dim_s)
        throw DimensionMismatch("Model::make: forward yields " + std::to_string(forward.dim_out) +
                                ", likelihood expects " + std::to_string(likelihood.dim_s));
    Model m;
    m.dim = forward.dim_in;
    m.forward = forward;
    m.likelihood = likelihood;
    m.xi_transform = compose(likelihood.transform, forward);
    m.xi_transform.name = "xi_transform";
    return m;
}

double Model::hamiltonian(const Vec& xi) const {
    require_dim(xi, dim, "Model::hamiltonian");
    return likelihood.energy(forward.forward(xi)) + 0.5 * dot(xi, xi);
}

double Model::full_hamiltonian(const Vec& xi) const {
    return hamiltonian(xi) + likelihood.energy_constant;
}

Vec Model::grad_hamiltonian(const Vec& xi) const {
    require_dim(xi, dim, "Model::grad_hamiltonian");
    const Vec s = forward.forward(xi);
    Vec g = forward.vjp(xi, likelihood.grad(s));
    axpy(1.0, xi, g);
    return g;
}

LinOp Model::metric(const Vec& xi) const {
    require_dim(xi, dim, "Model::metric");
    const DiffMap& t = xi_transform;
    Vec point = xi;
    return LinOp::symmetric_op(dim, [t, point](const Vec& v) {
        Vec out = t.vjp(point, t.jvp(point, v));
        axpy(1.0, v, out);
        return out;
    });
}

ExpansionPoint::ExpansionPoint(const Model& model, Vec xi_bar)
    : model_(std::make_shared<Model>(model)), xi_bar_(std::move(xi_bar)) {
    require_dim(xi_bar_, model.dim, "ExpansionPoint");
    require_finite(xi_bar_, "ExpansionPoint");
    x_bar_ = model_->xi_transform.forward(xi_bar_);
}

Vec ExpansionPoint::jac(const Vec& v) const { return model_->xi_transform.jvp(xi_bar_, v); }

Vec ExpansionPoint::jac_t(const Vec& u) const { return model_->xi_transform.vjp(xi_bar_, u); }

LinOp ExpansionPoint::metric() const {
    // Capture a shared handle so the operator stays valid on its own.
    auto model = model_;
    Vec point = xi_bar_;
    return LinOp::symmetric_op(model->dim, [model, point](const Vec& v) {
        Vec out = model->xi_transform.vjp(point, model->xi_transform.jvp(point, v));
        axpy(1.0, v, out);
        return out;
    });
}

const DenseMatrix& ExpansionPoint::inv_sqrt_metric_dense() const {
    if (!inv_sqrt_) {
        DenseMatrix m = dense_materialize(metric());
        inv_sqrt_ = std::make_shared<const DenseMatrix>(sym_inv_sqrt(m));
    }
    return *inv_sqrt_;
}

Vec gtilde(const ExpansionPoint& at, const Vec& xi) {
    const Vec x = at.model().xi_transform.forward(xi);
    Vec g = sub(xi, at.xi_bar());
    axpy(1.0, at.jac_t(sub(x, at.x_bar())), g);
    return g;
}

Vec gtilde_jvp(const ExpansionPoint& at, const Vec& xi, const Vec& v) {
    Vec out = at.jac_t(at.model().xi_transform.jvp(xi, v));
    axpy(1.0, v, out);
    return out;
}

Vec gtilde_vjp(const ExpansionPoint& at, const Vec& xi, const Vec& u) {
    Vec out = at.model().xi_transform.vjp(xi, at.jac(u));
    axpy(1.0, u, out);
    return out;
}

Vec g_full_dense(const ExpansionPoint& at, const Vec& xi) {
    return at.inv_sqrt_metric_dense().matvec(gtilde(at, xi));
}

}  // namespace geovi
