#include "geovi/diffmap.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "geovi/errors.hpp"
#include "geovi/special.hpp"

namespace geovi {

Vec DiffMap::forward(const Vec& x) const {
    require_dim(x, dim_in, (name + " forward").c_str());
    require_finite(x, (name + " forward input").c_str());
    Vec y = forward_fn(x);
    require_dim(y, dim_out, (name + " forward output").c_str());
    require_finite(y, (name + " forward output").c_str());
    return y;
}

Vec DiffMap::jvp(const Vec& x, const Vec& v) const {
    require_dim(x, dim_in, (name + " jvp point").c_str());
    require_dim(v, dim_in, (name + " jvp tangent").c_str());
    Vec y = tangent_fn(x, v);
    require_dim(y, dim_out, (name + " jvp output").c_str());
    require_finite(y, (name + " jvp output").c_str());
    return y;
}

Vec DiffMap::vjp(const Vec& x, const Vec& u) const {
    require_dim(x, dim_in, (name + " vjp point").c_str());
    require_dim(u, dim_out, (name + " vjp cotangent").c_str());
    Vec y = cotangent_fn(x, u);
    require_dim(y, dim_in, (name + " vjp output").c_str());
    require_finite(y, (name + " vjp output").c_str());
    return y;
}

DiffMap compose(const DiffMap& outer, const DiffMap& inner) {
    if (outer.dim_in != inner.dim_out)
        throw DimensionMismatch("compose: " + outer.name + " expects " +
                                std::to_string(outer.dim_in) + ", " + inner.name + " yields " +
                                std::to_string(inner.dim_out));
    DiffMap m;
    m.dim_in = inner.dim_in;
    m.dim_out = outer.dim_out;
    m.name = outer.name + "∘" + inner.name;
    m.forward_fn = [outer, inner](const Vec& x) { return outer.forward_fn(inner.forward_fn(x)); };
    m.tangent_fn = [outer, inner](const Vec& x, const Vec& v) {
        const Vec mid = inner.forward_fn(x);
        return outer.tangent_fn(mid, inner.tangent_fn(x, v));
    };
    m.cotangent_fn = [outer, inner](const Vec& x, const Vec& u) {
        const Vec mid = inner.forward_fn(x);
        return inner.cotangent_fn(x, outer.cotangent_fn(mid, u));
    };
    return m;
}

DiffMap stack_blocks(const std::vector<DiffMap>& maps) {
    DiffMap m;
    m.name = "stack";
    for (const auto& part : maps) {
        m.dim_in += part.dim_in;
        m.dim_out += part.dim_out;
    }
    auto parts = std::make_shared<std::vector<DiffMap>>(maps);
    m.forward_fn = [parts](const Vec& x) {
        Vec out;
        std::size_t off = 0;
        for (const auto& p : *parts) {
            const Vec xin(x.begin() + off, x.begin() + off + p.dim_in);
            Vec yout = p.forward_fn(xin);
            out.insert(out.end(), yout.begin(), yout.end());
            off += p.dim_in;
        }
        return out;
    };
    m.tangent_fn = [parts](const Vec& x, const Vec& v) {
        Vec out;
        std::size_t off = 0;
        for (const auto& p : *parts) {
            const Vec xin(x.begin() + off, x.begin() + off + p.dim_in);
            const Vec vin(v.begin() + off, v.begin() + off + p.dim_in);
            Vec yout = p.tangent_fn(xin, vin);
            out.insert(out.end(), yout.begin(), yout.end());
            off += p.dim_in;
        }
        return out;
    };
    m.cotangent_fn = [parts](const Vec& x, const Vec& u) {
        Vec out;
        std::size_t off_in = 0, off_out = 0;
        for (const auto& p : *parts) {
            const Vec xin(x.begin() + off_in, x.begin() + off_in + p.dim_in);
            const Vec uin(u.begin() + off_out, u.begin() + off_out + p.dim_out);
            Vec yout = p.cotangent_fn(xin, uin);
            out.insert(out.end(), yout.begin(), yout.end());
            off_in += p.dim_in;
            off_out += p.dim_out;
        }
        return out;
    };
    return m;
}

DiffMap fanout_shared(const std::vector<DiffMap>& maps) {
    if (maps.empty()) throw DimensionMismatch("fanout_shared: no maps");
    DiffMap m;
    m.name = "fanout";
    m.dim_in = maps.front().dim_in;
    for (const auto& part : maps) {
        if (part.dim_in != m.dim_in)
            throw DimensionMismatch("fanout_shared: input dims differ (" + part.name + ")");
        m.dim_out += part.dim_out;
    }
    auto parts = std::make_shared<std::vector<DiffMap>>(maps);
    m.forward_fn = [parts](const Vec& x) {
        Vec out;
        for (const auto& p : *parts) {
            Vec yout = p.forward_fn(x);
            out.insert(out.end(), yout.begin(), yout.end());
        }
        return out;
    };
    m.tangent_fn = [parts](const Vec& x, const Vec& v) {
        Vec out;
        for (const auto& p : *parts) {
            Vec yout = p.tangent_fn(x, v);
            out.insert(out.end(), yout.begin(), yout.end());
        }
        return out;
    };
    m.cotangent_fn = [parts](const Vec& x, const Vec& u) {
        Vec out(x.size(), 0.0);
        std::size_t off = 0;
        for (const auto& p : *parts) {
            const Vec uin(u.begin() + off, u.begin() + off + p.dim_out);
            Vec contrib = p.cotangent_fn(x, uin);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += contrib[i];
            off += p.dim_out;
        }
        return out;
    };
    return m;
}

DiffMap identity_map(std::size_t n) {
    DiffMap m;
    m.dim_in = m.dim_out = n;
    m.name = "identity";
    m.forward_fn = [](const Vec& x) { return x; };
    m.tangent_fn = [](const Vec&, const Vec& v) { return v; };
    m.cotangent_fn = [](const Vec&, const Vec& u) { return u; };
    return m;
}

DiffMap affine_map(std::size_t n, double a, double b) {
    DiffMap m;
    m.dim_in = m.dim_out = n;
    m.name = "affine";
    m.forward_fn = [a, b](const Vec& x) {
        Vec y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
        return y;
    };
    m.tangent_fn = [a](const Vec&, const Vec& v) { return scaled(v, a); };
    m.cotangent_fn = [a](const Vec&, const Vec& u) { return scaled(u, a); };
    return m;
}

DiffMap linear_map(const DenseMatrix& a) {
    DiffMap m;
    m.dim_in = a.cols();
    m.dim_out = a.rows();
    m.name = "linear";
    m.forward_fn = [a](const Vec& x) { return a.matvec(x); };
    m.tangent_fn = [a](const Vec&, const Vec& v) { return a.matvec(v); };
    m.cotangent_fn = [a](const Vec&, const Vec& u) { return a.matvec_t(u); };
    return m;
}

DiffMap linear_op_map(const LinOp& op, const std::string& name) {
    if (!op.apply_t) throw Error("linear_op_map: operator must provide a transpose action");
    DiffMap m;
    m.dim_in = op.dim_in;
    m.dim_out = op.dim_out;
    m.name = name;
    m.forward_fn = [op](const Vec& x) { return op.apply(x); };
    m.tangent_fn = [op](const Vec&, const Vec& v) { return op.apply(v); };
    m.cotangent_fn = [op](const Vec&, const Vec& u) { return op.apply_t(u); };
    return m;
}

DiffMap pointwise_map(std::size_t n, const std::string& name, std::function<double(double)> f,
                      std::function<double(double)> df) {
    DiffMap m;
    m.dim_in = m.dim_out = n;
    m.name = name;
    m.forward_fn = [f](const Vec& x) {
        Vec y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
        return y;
    };
    m.tangent_fn = [df](const Vec& x, const Vec& v) {
        Vec y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = df(x[i]) * v[i];
        return y;
    };
    m.cotangent_fn = [df](const Vec& x, const Vec& u) {
        Vec y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = df(x[i]) * u[i];
        return y;
    };
    return m;
}

DiffMap exp_map(std::size_t n) {
    return pointwise_map(n, "exp", [](double t) { return std::exp(t); },
                         [](double t) { return std::exp(t); });
}

DiffMap log_map(std::size_t n) {
    auto guard = [](double t) {
        if (!(t > 0.0)) throw DomainError("log: argument not positive");
        return std::log(t);
    };
    return pointwise_map(n, "log", guard, [](double t) {
        if (!(t > 0.0)) throw DomainError("log: argument not positive");
        return 1.0 / t;
    });
}

DiffMap sigmoid_map(std::size_t n) {
    auto sig = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
    return pointwise_map(n, "sigmoid", sig, [sig](double t) {
        const double s = sig(t);
        return s * (1.0 - s);
    });
}

DiffMap pow_map(std::size_t n, double p) {
    const bool integer_exponent = (p == std::floor(p)) && p >= 0.0;
    auto f = [p, integer_exponent](double t) {
        if (!integer_exponent && !(t > 0.0))
            throw DomainError("pow: non-integer exponent needs a positive base");
        return std::pow(t, p);
    };
    auto df = [p, integer_exponent](double t) {
        if (!integer_exponent && !(t > 0.0))
            throw DomainError("pow: non-integer exponent needs a positive base");
        return p * std::pow(t, p - 1.0);
    };
    return pointwise_map(n, "pow", f, df);
}

DiffMap sum_map(std::size_t n) {
    DiffMap m;
    m.dim_in = n;
    m.dim_out = 1;
    m.name = "sum";
    m.forward_fn = [](const Vec& x) {
        double s = 0.0;
        for (double v : x) s += v;
        return Vec{s};
    };
    m.tangent_fn = [](const Vec&, const Vec& v) {
        double s = 0.0;
        for (double t : v) s += t;
        return Vec{s};
    };
    m.cotangent_fn = [n](const Vec&, const Vec& u) { return Vec(n, u[0]); };
    return m;
}

DiffMap product_map(std::size_t n) {
    DiffMap m;
    m.dim_in = 2 * n;
    m.dim_out = n;
    m.name = "product";
    m.forward_fn = [n](const Vec& x) {
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * x[n + i];
        return y;
    };
    m.tangent_fn = [n](const Vec& x, const Vec& v) {
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = v[i] * x[n + i] + x[i] * v[n + i];
        return y;
    };
    m.cotangent_fn = [n](const Vec& x, const Vec& u) {
        Vec y(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = u[i] * x[n + i];
            y[n + i] = u[i] * x[i];
        }
        return y;
    };
    return m;
}

DiffMap add_map(std::size_t n) {
    DiffMap m;
    m.dim_in = 2 * n;
    m.dim_out = n;
    m.name = "add";
    m.forward_fn = [n](const Vec& x) {
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + x[n + i];
        return y;
    };
    m.tangent_fn = [n](const Vec&, const Vec& v) {
        Vec y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = v[i] + v[n + i];
        return y;
    };
    m.cotangent_fn = [n](const Vec&, const Vec& u) {
        Vec y(2 * n);
        for (std::size_t i = 0; i < n; ++i) y[i] = y[n + i] = u[i];
        return y;
    };
    return m;
}

DiffMap select_map(std::size_t dim_in, const std::vector<std::size_t>& indices) {
    for (std::size_t idx : indices)
        if (idx >= dim_in) throw DimensionMismatch("select_map: index out of range");
    DiffMap m;
    m.dim_in = dim_in;
    m.dim_out = indices.size();
    m.name = "select";
    auto idx = std::make_shared<std::vector<std::size_t>>(indices);
    m.forward_fn = [idx](const Vec& x) {
        Vec y(idx->size());
        for (std::size_t i = 0; i < idx->size(); ++i) y[i] = x[(*idx)[i]];
        return y;
    };
    m.tangent_fn = [idx](const Vec&, const Vec& v) {
        Vec y(idx->size());
        for (std::size_t i = 0; i < idx->size(); ++i) y[i] = v[(*idx)[i]];
        return y;
    };
    m.cotangent_fn = [idx, dim_in](const Vec&, const Vec& u) {
        Vec y(dim_in, 0.0);
        for (std::size_t i = 0; i < idx->size(); ++i) y[(*idx)[i]] += u[i];
        return y;
    };
    return m;
}

DiffMap broadcast_map(std::size_t n) {
    DiffMap m = select_map(1, std::vector<std::size_t>(n, 0));
    m.name = "broadcast";
    return m;
}

DiffMap normal_cdf_map(std::size_t n) {
    return pointwise_map(n, "normal_cdf", [](double t) { return normal_cdf(t); },
                         [](double t) { return normal_pdf(t); });
}

FdReport fd_check(const DiffMap& map, const Vec& x, Rng& rng, const FdSettings& s) {
    FdReport rep;
    rep.map_name = map.name;
    const double h = s.step * (norm2(x) + 1.0);
    const double floor = 1e-4;

    const Vec fx = map.forward(x);
    for (int k = 0; k < s.directions; ++k) {
        Vec v = rng.normal_vec(map.dim_in);
        const double vn = norm2(v);
        if (vn == 0.0) continue;
        for (auto& t : v) t /= vn;

        Vec xp = x, xm = x;
        axpy(h, v, xp);
        axpy(-h, v, xm);
        const Vec fp = map.forward(xp), fm = map.forward(xm);
        Vec fd(map.dim_out);
        for (std::size_t i = 0; i < map.dim_out; ++i) fd[i] = (fp[i] - fm[i]) / (2.0 * h);

        const Vec an = map.jvp(x, v);
        const double err = norm2(sub(fd, an)) / (std::max(norm2(an), norm2(fd)) + floor);
        rep.max_tangent_err = std::max(rep.max_tangent_err, err);

        // Adjoint identity with an independent cotangent probe.
        Vec u = rng.normal_vec(map.dim_out);
        const Vec jtu = map.vjp(x, u);
        const double lhs = dot(u, an);
        const double rhs = dot(jtu, v);
        const double denom = std::max({std::fabs(lhs), std::fabs(rhs), norm2(u) * norm2(an), 1e-300});
        const double aerr = std::fabs(lhs - rhs) / denom;
        rep.max_adjoint_err = std::max(rep.max_adjoint_err, aerr);
    }
    rep.pass = rep.max_tangent_err <= s.tol_tangent && rep.max_adjoint_err <= s.tol_adjoint;
    return rep;
}

}  // namespace geovi
