#include "geovi/griddens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geovi/errors.hpp"
#include "geovi/parallel.hpp"

namespace geovi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const Vec& logs) {
    double mx = kNegInf;
    for (double l : logs) mx = std::max(mx, l);
    if (!std::isfinite(mx)) return kNegInf;
    double s = 0.0;
    for (double l : logs) s += std::exp(l - mx);
    return mx + std::log(s);
}

GridDensity normalized_copy(const GridDensity& g) {
    GridDensity out = g;
    if (!out.normalized) normalize_density(out);
    return out;
}

}  // namespace

std::size_t GridDensity::size() const {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return n;
}

double GridDensity::cell_volume() const {
    double v = 1.0;
    for (std::size_t a = 0; a < shape.size(); ++a)
        v *= (hi[a] - lo[a]) / static_cast<double>(shape[a]);
    return v;
}

Vec GridDensity::coord(std::size_t flat) const {
    Vec c(shape.size());
    if (shape.size() == 1) {
        const double d = (hi[0] - lo[0]) / static_cast<double>(shape[0]);
        c[0] = lo[0] + (static_cast<double>(flat) + 0.5) * d;
    } else {
        const std::size_t j = flat % shape[1], i = flat / shape[1];
        const double d0 = (hi[0] - lo[0]) / static_cast<double>(shape[0]);
        const double d1 = (hi[1] - lo[1]) / static_cast<double>(shape[1]);
        c[0] = lo[0] + (static_cast<double>(i) + 0.5) * d0;
        c[1] = lo[1] + (static_cast<double>(j) + 0.5) * d1;
    }
    return c;
}

bool GridDensity::same_grid(const GridDensity& other) const {
    return lo == other.lo && hi == other.hi && shape == other.shape;
}

GridDensity make_grid_1d(double lo, double hi, std::size_t n) {
    if (!(hi > lo) || n < 2) throw BadShape("make_grid_1d: need hi > lo and n >= 2");
    GridDensity g;
    g.lo = {lo};
    g.hi = {hi};
    g.shape = {n};
    g.log_density.assign(n, kNegInf);
    return g;
}

GridDensity make_grid_2d(double lo, double hi, std::size_t n) {
    if (!(hi > lo) || n < 2) throw BadShape("make_grid_2d: need hi > lo and n >= 2");
    GridDensity g;
    g.lo = {lo, lo};
    g.hi = {hi, hi};
    g.shape = {n, n};
    g.log_density.assign(n * n, kNegInf);
    return g;
}

void normalize_density(GridDensity& g) {
    if (g.shape.empty() || g.shape.size() > 2)
        throw BadShape("normalize_density: only 1D/2D grids");
    const double lse = log_sum_exp(g.log_density);
    if (!std::isfinite(lse))
        throw NonNormalizable("normalize_density: no finite mass on the grid");
    const double log_z = lse + std::log(g.cell_volume());
    for (double& l : g.log_density) l -= log_z;
    g.log_norm = log_z;
    g.normalized = true;
}

double grid_log_evidence(const GridDensity& g) {
    if (g.normalized) return g.log_norm;
    const double lse = log_sum_exp(g.log_density);
    if (!std::isfinite(lse))
        throw NonNormalizable("grid_log_evidence: no finite mass on the grid");
    return lse + std::log(g.cell_volume());
}

void fill_posterior_density(const Model& model, GridDensity& g, int threads) {
    if (g.ndim() != model.dim)
        throw GridMismatch("fill_posterior_density: grid/model dimension mismatch");
    const std::size_t n = g.size();
    // full_hamiltonian omits the prior's Gaussian normalization; restore it so
    // integrating exp(log_density) yields the true evidence.
    const double prior_norm =
        0.5 * static_cast<double>(model.dim) * std::log(2.0 * M_PI);
    parallel_for(n, threads, [&](std::size_t i) {
        try {
            g.log_density[i] = -model.full_hamiltonian(g.coord(i)) - prior_norm;
        } catch (const DomainError&) {
            g.log_density[i] = kNegInf;
        } catch (const NonFiniteValue&) {
            g.log_density[i] = kNegInf;
        }
    });
    g.normalized = false;
}

void fill_transformed_density(const Model& model, const Vec& xi_bar, const Vec& m,
                              GridDensity& g, int threads) {
    if (g.ndim() != model.dim)
        throw GridMismatch("fill_transformed_density: grid/model dimension mismatch");
    require_dim(xi_bar, model.dim, "fill_transformed_density xi_bar");
    require_dim(m, model.dim, "fill_transformed_density shift");
    const std::size_t dim = model.dim;
    ExpansionPoint at(model, xi_bar);
    at.inv_sqrt_metric_dense();  // materialize before the parallel region

    const double log_norm_const = -0.5 * static_cast<double>(dim) * std::log(2.0 * M_PI);
    const std::size_t n = g.size();
    parallel_for(n, threads, [&](std::size_t cell) {
        Vec xi = g.coord(cell);
        // Undo the shift: the sample is xi = m + r, the transform acts on
        // xi_bar + r.
        for (std::size_t a = 0; a < dim; ++a) xi[a] += xi_bar[a] - m[a];
        try {
            const Vec y = g_full_dense(at, xi);
            DenseMatrix jac(dim, dim);
            Vec xp = xi, xm = xi;
            for (std::size_t c = 0; c < dim; ++c) {
                const double h = 1e-6 * (1.0 + std::fabs(xi[c]));
                xp[c] = xi[c] + h;
                xm[c] = xi[c] - h;
                const Vec fp = g_full_dense(at, xp);
                const Vec fm = g_full_dense(at, xm);
                for (std::size_t r = 0; r < dim; ++r)
                    jac(r, c) = (fp[r] - fm[r]) / (2.0 * h);
                xp[c] = xi[c];
                xm[c] = xi[c];
            }
            const LogDet det = gauss_logdet(jac);
            if (det.sign == 0) {
                g.log_density[cell] = kNegInf;
                return;
            }
            g.log_density[cell] = -0.5 * dot(y, y) + log_norm_const + det.log_abs;
        } catch (const DomainError&) {
            g.log_density[cell] = kNegInf;
        } catch (const NonFiniteValue&) {
            g.log_density[cell] = kNegInf;
        }
    });
    g.normalized = false;
}

void fill_gaussian_density(const Vec& mean, const DenseMatrix& cov, GridDensity& g) {
    if (g.ndim() != mean.size() || cov.rows() != mean.size() || cov.cols() != mean.size())
        throw GridMismatch("fill_gaussian_density: dimension mismatch");
    const DenseMatrix l = cholesky(cov);
    double logdet = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
    const double c0 =
        -0.5 * (static_cast<double>(mean.size()) * std::log(2.0 * M_PI) + logdet);
    for (std::size_t cell = 0; cell < g.size(); ++cell) {
        const Vec d = sub(g.coord(cell), mean);
        const Vec w = cholesky_solve(l, d);
        g.log_density[cell] = c0 - 0.5 * dot(d, w);
    }
    g.normalized = false;
}

GridMoments grid_moments(const GridDensity& g_in) {
    const GridDensity g = normalized_copy(g_in);
    const std::size_t dim = g.ndim();
    const double vol = g.cell_volume();

    GridMoments mom;
    mom.mean = zeros(dim);
    for (std::size_t cell = 0; cell < g.size(); ++cell) {
        const double w = std::exp(g.log_density[cell]) * vol;
        if (w == 0.0) continue;
        axpy(w, g.coord(cell), mom.mean);
    }
    mom.cov = DenseMatrix(dim, dim);
    for (std::size_t cell = 0; cell < g.size(); ++cell) {
        const double w = std::exp(g.log_density[cell]) * vol;
        if (w == 0.0) continue;
        const Vec d = sub(g.coord(cell), mom.mean);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) mom.cov(a, b) += w * d[a] * d[b];
    }
    return mom;
}

KlPair grid_kl(const GridDensity& p_in, const GridDensity& q_in) {
    if (!p_in.same_grid(q_in)) throw GridMismatch("grid_kl: grids differ");
    const GridDensity p = normalized_copy(p_in);
    const GridDensity q = normalized_copy(q_in);
    const double vol = p.cell_volume();

    auto one_sided = [vol](const GridDensity& a, const GridDensity& b) {
        double kl = 0.0;
        for (std::size_t cell = 0; cell < a.size(); ++cell) {
            const double mass = std::exp(a.log_density[cell]) * vol;
            if (mass == 0.0) continue;  // underflowed reference cell: mass-free
            const double lb = b.log_density[cell];
            if (!std::isfinite(lb)) return std::numeric_limits<double>::infinity();
            kl += mass * (a.log_density[cell] - lb);
        }
        return std::max(kl, 0.0);  // clip quadrature noise around zero
    };
    return {one_sided(p, q), one_sided(q, p)};
}

GridDensity grid_marginal(const GridDensity& g_in, std::size_t axis) {
    if (g_in.ndim() != 2 || axis > 1) throw BadShape("grid_marginal: need a 2D grid, axis 0/1");
    const GridDensity g = normalized_copy(g_in);
    GridDensity out = make_grid_1d(g.lo[axis], g.hi[axis], g.shape[axis]);
    const std::size_t n0 = g.shape[0], n1 = g.shape[1];
    const double other_delta = (axis == 0) ? (g.hi[1] - g.lo[1]) / static_cast<double>(n1)
                                           : (g.hi[0] - g.lo[0]) / static_cast<double>(n0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        Vec logs;
        logs.reserve(axis == 0 ? n1 : n0);
        if (axis == 0) {
            for (std::size_t j = 0; j < n1; ++j) logs.push_back(g.log_density[k * n1 + j]);
        } else {
            for (std::size_t i = 0; i < n0; ++i) logs.push_back(g.log_density[i * n1 + k]);
        }
        const double lse = log_sum_exp(logs);
        out.log_density[k] = std::isfinite(lse) ? lse + std::log(other_delta) : kNegInf;
    }
    out.normalized = true;  // marginal of a normalized density is normalized
    out.log_norm = 0.0;
    return out;
}

Vec histogram_masses(const GridDensity& proto_1d, const std::vector<double>& values) {
    if (proto_1d.ndim() != 1) throw BadShape("histogram_masses: need a 1D grid");
    if (values.empty()) throw DimensionMismatch("histogram_masses: no values");
    const std::size_t n = proto_1d.shape[0];
    const double lo = proto_1d.lo[0], hi = proto_1d.hi[0];
    const double delta = (hi - lo) / static_cast<double>(n);
    Vec w(n, 0.0);
    for (double v : values) {
        const double t = (v - lo) / delta;
        std::size_t bin;
        if (t <= 0.0)
            bin = 0;
        else if (t >= static_cast<double>(n))
            bin = n - 1;
        else
            bin = static_cast<std::size_t>(t);
        w[bin] += 1.0;
    }
    for (double& x : w) x /= static_cast<double>(values.size());
    return w;
}

double total_variation(const Vec& w1, const Vec& w2) {
    require_dim(w2, w1.size(), "total_variation");
    double tv = 0.0;
    for (std::size_t i = 0; i < w1.size(); ++i) tv += std::fabs(w1[i] - w2[i]);
    return 0.5 * tv;
}

}  // namespace geovi
