#include "geovi/kl.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

#include "geovi/errors.hpp"
#include "geovi/parallel.hpp"

namespace geovi {

std::vector<std::size_t> canonical_order(const std::vector<Vec>& residuals) {
    std::vector<std::size_t> order(residuals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&residuals](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(residuals[a].begin(), residuals[a].end(),
                                            residuals[b].begin(), residuals[b].end());
    });
    return order;
}

KlEval kl_value_grad(const Model& model, const Vec& m, const std::vector<Vec>& residuals,
                     int threads) {
    if (residuals.empty()) throw DimensionMismatch("kl_value_grad: no samples");
    require_dim(m, model.dim, "kl_value_grad shift");
    const std::vector<std::size_t> order = canonical_order(residuals);
    const std::size_t n = residuals.size();

    struct Term {
        double h = 0.0;
        Vec grad;
        bool ok = false;
    };
    std::vector<Term> terms(n);
    parallel_for(n, threads, [&](std::size_t slot) {
        const std::size_t i = order[slot];
        Vec xi = m;
        axpy(1.0, residuals[i], xi);
        try {
            terms[slot].h = model.hamiltonian(xi);
            terms[slot].grad = model.grad_hamiltonian(xi);
            terms[slot].ok = true;
        } catch (const DomainError&) {
            terms[slot].ok = false;
        }
    });

    KlEval out;
    out.gradient = zeros(model.dim);
    for (const Term& t : terms) {
        if (!t.ok) {
            ++out.dropped;
            continue;
        }
        out.value += t.h;
        axpy(1.0, t.grad, out.gradient);
        ++out.used;
    }
    if (out.used == 0) throw DomainError("kl_value_grad: every sample left the model domain");
    const double inv = 1.0 / static_cast<double>(out.used);
    out.value *= inv;
    for (double& g : out.gradient) g *= inv;
    return out;
}

LinOp averaged_metric(const Model& model, const Vec& m, const std::vector<Vec>& residuals,
                      int threads) {
    if (residuals.empty()) throw DimensionMismatch("averaged_metric: no samples");
    require_dim(m, model.dim, "averaged_metric shift");
    const std::vector<std::size_t> order = canonical_order(residuals);

    // Shifted evaluation points in canonical order.
    auto points = std::make_shared<std::vector<Vec>>();
    points->reserve(residuals.size());
    for (std::size_t i : order) {
        Vec xi = m;
        axpy(1.0, residuals[i], xi);
        points->push_back(std::move(xi));
    }
    auto model_sp = std::make_shared<Model>(model);

    return LinOp::symmetric_op(model.dim, [model_sp, points, threads](const Vec& v) {
        const std::size_t n = points->size();
        std::vector<Vec> slots(n);
        std::vector<char> ok(n, 0);
        parallel_for(n, threads, [&](std::size_t slot) {
            const DiffMap& t = model_sp->xi_transform;
            const Vec& xi = (*points)[slot];
            try {
                slots[slot] = t.vjp(xi, t.jvp(xi, v));
                ok[slot] = 1;
            } catch (const DomainError&) {
                ok[slot] = 0;
            }
        });
        Vec acc = zeros(v.size());
        std::size_t used = 0;
        for (std::size_t slot = 0; slot < n; ++slot) {
            if (!ok[slot]) continue;
            axpy(1.0, slots[slot], acc);
            ++used;
        }
        if (used == 0) throw DomainError("averaged_metric: every sample left the model domain");
        const double inv = 1.0 / static_cast<double>(used);
        // (1/N) sum_i J_i^T J_i v + v: the prior identity is sample-independent.
        Vec out = v;
        axpy(inv, acc, out);
        return out;
    });
}

}  // namespace geovi
