#include "geovi/likelihood.hpp"

#include <atomic>
#include <cmath>
#include <memory>

#include "geovi/errors.hpp"

namespace geovi {

namespace {

std::atomic<long> g_poisson_floor_count{0};
constexpr double kRateFloor = 1e-12;

}  // namespace

long poisson_floor_count() { return g_poisson_floor_count.load(); }
void reset_poisson_floor_count() { g_poisson_floor_count.store(0); }

double Likelihood::energy(const Vec& s) const {
    require_dim(s, dim_s, (family + " energy").c_str());
    require_finite(s, (family + " energy input").c_str());
    const double e = energy_fn(s);
    if (!std::isfinite(e)) throw NonFiniteValue(family + " energy: non-finite value");
    return e;
}

Vec Likelihood::grad(const Vec& s) const {
    require_dim(s, dim_s, (family + " grad").c_str());
    Vec g = grad_fn(s);
    require_finite(g, (family + " grad output").c_str());
    return g;
}

Likelihood normal_likelihood(const Vec& data, const Vec& variance) {
    require_dim(variance, data.size(), "normal_likelihood variance");
    for (double v : variance)
        if (!(v > 0.0)) throw DomainError("normal_likelihood: variance must be positive");
    const std::size_t n = data.size();

    Likelihood lh;
    lh.family = "normal";
    lh.data = data;
    lh.dim_s = n;
    lh.energy_fn = [data, variance](const Vec& s) {
        double e = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double r = data[i] - s[i];
            e += 0.5 * r * r / variance[i];
        }
        return e;
    };
    lh.grad_fn = [data, variance](const Vec& s) {
        Vec g(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) g[i] = (s[i] - data[i]) / variance[i];
        return g;
    };
    // x = sqrt(N^-1) s'
    DenseMatrix scale(n, n);
    for (std::size_t i = 0; i < n; ++i) scale(i, i) = 1.0 / std::sqrt(variance[i]);
    lh.transform = linear_map(scale);
    lh.transform.name = "normal_trafo";
    double c = 0.0;
    for (double v : variance) c += 0.5 * std::log(2.0 * M_PI * v);
    lh.energy_constant = c;
    return lh;
}

Likelihood normal_likelihood(const Vec& data, double sigma) {
    return normal_likelihood(data, Vec(data.size(), sigma * sigma));
}

Likelihood poisson_likelihood(const Vec& counts) {
    for (double d : counts)
        if (!(d >= 0.0) || d != std::floor(d))
            throw DomainError("poisson_likelihood: counts must be non-negative integers");
    const std::size_t n = counts.size();

    auto safe_log = [](double lam) {
        if (lam < kRateFloor) {
            ++g_poisson_floor_count;
            lam = kRateFloor;
        }
        return std::log(lam);
    };

    Likelihood lh;
    lh.family = "poisson";
    lh.data = counts;
    lh.dim_s = n;
    lh.energy_fn = [counts, safe_log](const Vec& s) {
        double e = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0)) throw DomainError("poisson energy: rate must be positive");
            e += s[i] - counts[i] * safe_log(s[i]);
        }
        return e;
    };
    lh.grad_fn = [counts](const Vec& s) {
        Vec g(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0)) throw DomainError("poisson grad: rate must be positive");
            g[i] = 1.0 - counts[i] / std::max(s[i], kRateFloor);
        }
        return g;
    };
    // x = 2 sqrt(s'), so (dx/ds')^2 = 1/s' matches the Fisher metric.
    lh.transform = pointwise_map(
        n, "poisson_trafo",
        [](double t) {
            if (!(t > 0.0)) throw DomainError("poisson transform: rate must be positive");
            return 2.0 * std::sqrt(t);
        },
        [](double t) {
            if (!(t > 0.0)) throw DomainError("poisson transform: rate must be positive");
            return 1.0 / std::sqrt(t);
        });
    double c = 0.0;
    for (double d : counts) c += std::lgamma(d + 1.0);
    lh.energy_constant = c;
    return lh;
}

Likelihood inverse_gamma_likelihood(std::size_t n, double alpha, double q) {
    if (!(alpha > 0.0) || !(q > 0.0))
        throw DomainError("inverse_gamma_likelihood: alpha and q must be positive");

    Likelihood lh;
    lh.family = "inverse_gamma";
    lh.dim_s = n;
    lh.energy_fn = [alpha, q](const Vec& s) {
        double e = 0.0;
        for (double t : s) {
            if (!(t > 0.0)) throw DomainError("inverse_gamma energy: argument must be positive");
            e += (alpha + 1.0) * std::log(t) + q / t;
        }
        return e;
    };
    lh.grad_fn = [alpha, q](const Vec& s) {
        Vec g(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0)) throw DomainError("inverse_gamma grad: argument must be positive");
            g[i] = (alpha + 1.0) / s[i] - q / (s[i] * s[i]);
        }
        return g;
    };
    // x = sqrt(alpha+1) log(s')
    const double root = std::sqrt(alpha + 1.0);
    lh.transform = pointwise_map(
        n, "inverse_gamma_trafo",
        [root](double t) {
            if (!(t > 0.0)) throw DomainError("inverse_gamma transform: argument must be positive");
            return root * std::log(t);
        },
        [root](double t) {
            if (!(t > 0.0)) throw DomainError("inverse_gamma transform: argument must be positive");
            return root / t;
        });
    lh.energy_constant = static_cast<double>(n) * (-alpha * std::log(q) + std::lgamma(alpha));
    return lh;
}

Likelihood student_t_likelihood(std::size_t n, double theta) {
    if (!(theta > 0.0)) throw DomainError("student_t_likelihood: theta must be positive");

    Likelihood lh;
    lh.family = "student_t";
    lh.dim_s = n;
    lh.energy_fn = [theta](const Vec& s) {
        double e = 0.0;
        for (double t : s) e += 0.5 * (theta + 1.0) * std::log1p(t * t / theta);
        return e;
    };
    lh.grad_fn = [theta](const Vec& s) {
        Vec g(s.size());
        for (std::size_t i = 0; i < s.size(); ++i)
            g[i] = (theta + 1.0) * s[i] / (theta + s[i] * s[i]);
        return g;
    };
    const double root = std::sqrt((theta + 1.0) / (theta + 3.0));
    lh.transform = affine_map(n, root, 0.0);
    lh.transform.name = "student_t_trafo";
    lh.energy_constant = static_cast<double>(n) *
                         (std::lgamma(0.5 * theta) + 0.5 * std::log(M_PI * theta) -
                          std::lgamma(0.5 * (theta + 1.0)));
    return lh;
}

Likelihood bernoulli_likelihood(const Vec& data) {
    for (double d : data)
        if (d != 0.0 && d != 1.0) throw DomainError("bernoulli_likelihood: data must be 0 or 1");
    const std::size_t n = data.size();

    Likelihood lh;
    lh.family = "bernoulli";
    lh.data = data;
    lh.dim_s = n;
    lh.energy_fn = [data](const Vec& s) {
        double e = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0 && s[i] < 1.0))
                throw DomainError("bernoulli energy: rate must lie in (0, 1)");
            e -= data[i] * std::log(s[i]) + (1.0 - data[i]) * std::log(1.0 - s[i]);
        }
        return e;
    };
    lh.grad_fn = [data](const Vec& s) {
        Vec g(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > 0.0 && s[i] < 1.0))
                throw DomainError("bernoulli grad: rate must lie in (0, 1)");
            g[i] = -data[i] / s[i] + (1.0 - data[i]) / (1.0 - s[i]);
        }
        return g;
    };
    // x = 2 asin(sqrt(s')): (dx/ds')^2 = 1/(s'(1-s')) matches the metric.
    lh.transform = pointwise_map(
        n, "bernoulli_trafo",
        [](double t) {
            if (!(t > 0.0 && t < 1.0))
                throw DomainError("bernoulli transform: rate must lie in (0, 1)");
            return 2.0 * std::asin(std::sqrt(t));
        },
        [](double t) {
            if (!(t > 0.0 && t < 1.0))
                throw DomainError("bernoulli transform: rate must lie in (0, 1)");
            return 1.0 / std::sqrt(t * (1.0 - t));
        });
    lh.energy_constant = 0.0;
    return lh;
}

Likelihood variable_noise_normal(const Vec& data) {
    const std::size_t n = data.size();

    Likelihood lh;
    lh.family = "variable_noise_normal";
    lh.data = data;
    lh.dim_s = 2 * n;
    lh.energy_fn = [data, n](const Vec& s) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = s[i], v = s[n + i];
            if (!(v > 0.0)) throw DomainError("variable_noise_normal energy: variance not positive");
            const double r = data[i] - m;
            e += 0.5 * (r * r / v + std::log(v));
        }
        return e;
    };
    lh.grad_fn = [data, n](const Vec& s) {
        Vec g(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const double m = s[i], v = s[n + i];
            if (!(v > 0.0)) throw DomainError("variable_noise_normal grad: variance not positive");
            const double r = data[i] - m;
            g[i] = -r / v;
            g[n + i] = -0.5 * r * r / (v * v) + 0.5 / v;
        }
        return g;
    };

    // Per-point pair transform ((d-m)/sqrt(v), log(v)/2), stacked as
    // blocks (all means, then all half-log variances).
    DiffMap t;
    t.dim_in = 2 * n;
    t.dim_out = 2 * n;
    t.name = "variable_noise_trafo";
    t.forward_fn = [data, n](const Vec& s) {
        Vec x(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const double m = s[i], v = s[n + i];
            if (!(v > 0.0))
                throw DomainError("variable_noise_normal transform: variance not positive");
            x[i] = (data[i] - m) / std::sqrt(v);
            x[n + i] = 0.5 * std::log(v);
        }
        return x;
    };
    t.tangent_fn = [data, n](const Vec& s, const Vec& dv) {
        Vec out(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const double m = s[i], v = s[n + i];
            if (!(v > 0.0))
                throw DomainError("variable_noise_normal transform: variance not positive");
            const double dm = dv[i], dvv = dv[n + i];
            out[i] = -dm / std::sqrt(v) - 0.5 * (data[i] - m) * std::pow(v, -1.5) * dvv;
            out[n + i] = 0.5 * dvv / v;
        }
        return out;
    };
    t.cotangent_fn = [data, n](const Vec& s, const Vec& u) {
        Vec out(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const double m = s[i], v = s[n + i];
            if (!(v > 0.0))
                throw DomainError("variable_noise_normal transform: variance not positive");
            out[i] = -u[i] / std::sqrt(v);
            out[n + i] = -0.5 * (data[i] - m) * std::pow(v, -1.5) * u[i] + 0.5 * u[n + i] / v;
        }
        return out;
    };
    lh.transform = t;
    lh.energy_constant = 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
    return lh;
}

Likelihood stack_likelihoods(const std::vector<Likelihood>& parts,
                             const std::vector<DiffMap>& selectors) {
    if (parts.empty()) throw DimensionMismatch("stack_likelihoods: no parts");
    std::vector<DiffMap> sel = selectors;
    std::size_t dim_s;
    if (sel.empty()) {
        dim_s = parts.front().dim_s;
        for (const auto& p : parts)
            if (p.dim_s != dim_s)
                throw DimensionMismatch("stack_likelihoods: shared s' requires equal dims");
        for (std::size_t i = 0; i < parts.size(); ++i) sel.push_back(identity_map(dim_s));
    } else {
        if (sel.size() != parts.size())
            throw DimensionMismatch("stack_likelihoods: one selector per part required");
        dim_s = sel.front().dim_in;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (sel[i].dim_in != dim_s)
                throw DimensionMismatch("stack_likelihoods: selector input dims differ");
            if (sel[i].dim_out != parts[i].dim_s)
                throw DimensionMismatch("stack_likelihoods: selector/part dim mismatch");
        }
    }

    Likelihood lh;
    lh.family = "stack";
    lh.dim_s = dim_s;
    double c = 0.0;
    for (const auto& p : parts) {
        lh.data.insert(lh.data.end(), p.data.begin(), p.data.end());
        c += p.energy_constant;
    }
    lh.energy_constant = c;

    auto parts_sp = std::make_shared<std::vector<Likelihood>>(parts);
    auto sel_sp = std::make_shared<std::vector<DiffMap>>(sel);
    lh.energy_fn = [parts_sp, sel_sp](const Vec& s) {
        double e = 0.0;
        for (std::size_t i = 0; i < parts_sp->size(); ++i)
            e += (*parts_sp)[i].energy_fn((*sel_sp)[i].forward_fn(s));
        return e;
    };
    lh.grad_fn = [parts_sp, sel_sp, dim_s](const Vec& s) {
        Vec g(dim_s, 0.0);
        for (std::size_t i = 0; i < parts_sp->size(); ++i) {
            const Vec si = (*sel_sp)[i].forward_fn(s);
            const Vec gi = (*parts_sp)[i].grad_fn(si);
            const Vec back = (*sel_sp)[i].cotangent_fn(s, gi);
            for (std::size_t k = 0; k < g.size(); ++k) g[k] += back[k];
        }
        return g;
    };

    std::vector<DiffMap> trafos;
    trafos.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        trafos.push_back(compose(parts[i].transform, sel[i]));
    lh.transform = fanout_shared(trafos);
    lh.transform.name = "stack_trafo";
    return lh;
}

}  // namespace geovi
