#include "geovi/cfmodel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "geovi/errors.hpp"
#include "geovi/fft.hpp"
#include "geovi/special.hpp"

namespace geovi {

namespace {

// Cholesky factor of the transition covariance over one gap, with the
// partials needed for the spectrum map's derivative sweeps.
struct Step {
    double delta = 0.0;
    double L11 = 0.0, L21 = 0.0, L22 = 0.0;
    double dL11_dsg = 0.0, dL21_dsg = 0.0, dL22_dsg = 0.0;
    double dL11_dep = 0.0, dL21_dep = 0.0, dL22_dep = 0.0;
    double eta = 0.0, xiv = 0.0;  // innovations consumed by this step
};

Step make_step(double delta, double sg, double ep) {
    Step s;
    s.delta = delta;
    const double a = delta * delta * delta / 3.0 + ep * ep * delta;
    const double b = 0.5 * delta * delta;
    const double r = std::sqrt(a);
    const double u2 = delta - b * b / a;  // = delta (delta^3/12 + ep^2 delta) / a > 0
    const double ru = std::sqrt(u2);
    s.L11 = sg * r;
    s.L21 = sg * b / r;
    s.L22 = sg * ru;
    s.dL11_dsg = r;
    s.dL21_dsg = b / r;
    s.dL22_dsg = ru;
    const double epd = ep * delta;
    s.dL11_dep = sg * epd / r;
    s.dL21_dep = -sg * b * epd / (a * r);
    s.dL22_dep = sg * b * b * epd / (a * a * ru);
    return s;
}

// Static chain structure on a grid: log-|k| per nonzero bin and the
// effective multiplicity (sum of c_k^2) entering the normalization.
struct SpecCore {
    Vec l;
    Vec weight;
    std::size_t transitions = 0;
};

SpecCore make_core(const Grid& grid) {
    SpecCore core;
    const auto& kmag = grid.bin_kmag();
    if (kmag.size() < 2) throw BadShape("spectrum: grid has no nonzero modes");
    core.l.reserve(kmag.size() - 1);
    for (std::size_t b = 1; b < kmag.size(); ++b) core.l.push_back(std::log(kmag[b]));
    core.weight.assign(kmag.size() - 1, 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t b = grid.mode_bin()[k];
        if (b == 0) continue;
        core.weight[b - 1] += grid.conjugate_index(k) == k ? 1.0 : 0.5;
    }
    core.transitions = core.l.size() - 1;
    return core;
}

struct SpecEval {
    double a0 = 0.0, fl = 0.0, sg = 0.0, ep = 0.0;
    Vec tau;                  // per nonzero bin, tau[0] = 0
    std::vector<Step> steps;  // one per transition
    Vec expt;                 // exp(tau - max tau); amplitudes are invariant
    double zs = 0.0;          // sqrt(sum weight * expt^2)
    Vec amp;                  // size bins = tau.size() + 1
};

SpecEval eval_spectrum(const SpecCore& core, const SpectrumParams& p, const Vec& x) {
    SpecEval e;
    e.a0 = p.offset_std.value(x[0]);
    e.fl = p.fluctuations.value(x[1]);
    const double slope = p.slope.value(x[2]);
    e.sg = p.flexibility.value(x[3]);
    e.ep = p.asperity.value(x[4]);

    const std::size_t nnz = core.l.size();
    e.tau.assign(nnz, 0.0);
    e.steps.resize(core.transitions);
    double y = slope;
    for (std::size_t t = 0; t < core.transitions; ++t) {
        Step& s = e.steps[t];
        s = make_step(core.l[t + 1] - core.l[t], e.sg, e.ep);
        s.eta = x[5 + 2 * t];
        s.xiv = x[6 + 2 * t];
        e.tau[t + 1] = e.tau[t] + s.delta * y + s.L11 * s.eta;
        y += s.L21 * s.eta + s.L22 * s.xiv;
    }

    const double tmax = *std::max_element(e.tau.begin(), e.tau.end());
    e.expt.resize(nnz);
    double ssum = 0.0;
    for (std::size_t b = 0; b < nnz; ++b) {
        e.expt[b] = std::exp(e.tau[b] - tmax);
        ssum += core.weight[b] * e.expt[b] * e.expt[b];
    }
    e.zs = std::sqrt(ssum);
    e.amp.resize(nnz + 1);
    e.amp[0] = e.a0;
    for (std::size_t b = 0; b < nnz; ++b) e.amp[b + 1] = e.fl * e.expt[b] / e.zs;
    return e;
}

Vec spec_tangent(const SpecCore& core, const SpectrumParams& p, const SpecEval& e, const Vec& v) {
    const std::size_t nnz = core.l.size();
    const double da0 = e.a0 * p.offset_std.log_std * v[0];
    const double dfl = e.fl * p.fluctuations.log_std * v[1];
    const double dsg = e.sg * p.flexibility.log_std * v[3];
    const double dep = e.ep * p.asperity.log_std * v[4];

    Vec dtau(nnz, 0.0);
    double dy = p.slope.std * v[2];
    for (std::size_t t = 0; t < core.transitions; ++t) {
        const Step& s = e.steps[t];
        const double dL11 = s.dL11_dsg * dsg + s.dL11_dep * dep;
        const double dL21 = s.dL21_dsg * dsg + s.dL21_dep * dep;
        const double dL22 = s.dL22_dsg * dsg + s.dL22_dep * dep;
        dtau[t + 1] = dtau[t] + s.delta * dy + dL11 * s.eta + s.L11 * v[5 + 2 * t];
        dy += dL21 * s.eta + s.L21 * v[5 + 2 * t] + dL22 * s.xiv + s.L22 * v[6 + 2 * t];
    }

    double mean_dtau = 0.0;  // sum of P_b dtau_b, P_b = weight expt^2 / zs^2
    for (std::size_t b = 0; b < nnz; ++b)
        mean_dtau += core.weight[b] * e.expt[b] * e.expt[b] * dtau[b];
    mean_dtau /= e.zs * e.zs;

    Vec out(nnz + 1);
    out[0] = da0;
    for (std::size_t b = 0; b < nnz; ++b)
        out[b + 1] = dfl * e.expt[b] / e.zs + e.amp[b + 1] * (dtau[b] - mean_dtau);
    return out;
}

Vec spec_cotangent(const SpecCore& core, const SpectrumParams& p, const SpecEval& e,
                   const Vec& u) {
    const std::size_t nnz = core.l.size();
    Vec out(5 + 2 * core.transitions, 0.0);

    // Normalization block, reversed.
    double ubar_fl = 0.0, uamp_dot = 0.0;
    for (std::size_t b = 0; b < nnz; ++b) {
        ubar_fl += u[b + 1] * e.expt[b] / e.zs;
        uamp_dot += u[b + 1] * e.amp[b + 1];
    }
    Vec utau(nnz);
    for (std::size_t b = 0; b < nnz; ++b) {
        const double pb = core.weight[b] * e.expt[b] * e.expt[b] / (e.zs * e.zs);
        utau[b] = u[b + 1] * e.amp[b + 1] - uamp_dot * pb;
    }

    // Chain, reversed; uy tracks the cotangent of y entering the next step.
    double ubar_sg = 0.0, ubar_ep = 0.0, uy = 0.0;
    for (std::size_t t = core.transitions; t-- > 0;) {
        const Step& s = e.steps[t];
        const double gt = utau[t + 1];
        utau[t] += gt;
        out[5 + 2 * t] = gt * s.L11 + uy * s.L21;
        out[6 + 2 * t] = uy * s.L22;
        ubar_sg += gt * s.eta * s.dL11_dsg + uy * (s.eta * s.dL21_dsg + s.xiv * s.dL22_dsg);
        ubar_ep += gt * s.eta * s.dL11_dep + uy * (s.eta * s.dL21_dep + s.xiv * s.dL22_dep);
        uy += s.delta * gt;
    }

    out[0] = u[0] * e.a0 * p.offset_std.log_std;
    out[1] = ubar_fl * e.fl * p.fluctuations.log_std;
    out[2] = uy * p.slope.std;  // y starts at the slope value
    out[3] = ubar_sg * e.sg * p.flexibility.log_std;
    out[4] = ubar_ep * e.ep * p.asperity.log_std;
    return out;
}

// Per-mode synthesis weights: bin index and c_k.
struct SynthCore {
    std::shared_ptr<const Grid> grid;
    std::vector<std::size_t> bin;
    Vec ck;
};

SynthCore make_synth(const Grid& grid) {
    SynthCore s;
    s.grid = std::make_shared<Grid>(grid);
    s.bin = grid.mode_bin();
    s.ck.resize(grid.size());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 0; k < grid.size(); ++k)
        s.ck[k] = grid.conjugate_index(k) == k ? 1.0 : inv_sqrt2;
    return s;
}

Vec real_part(const CVec& v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

Vec synth_field(const SynthCore& s, const Vec& amp, const CVec& modes) {
    CVec w(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) w[k] = amp[s.bin[k]] * s.ck[k] * modes[k];
    return real_part(dft(*s.grid, w, false));
}

}  // namespace

std::size_t spectrum_latent_dim(const Grid& grid) {
    if (grid.n_bins() < 2) throw BadShape("spectrum: grid has no nonzero modes");
    return 5 + 2 * (grid.n_bins() - 2);
}

DenseMatrix wiener_transition_cov(double delta, double sigma, double eps) {
    if (!(delta > 0.0)) throw DomainError("wiener_transition_cov: gap must be positive");
    DenseMatrix c(2, 2);
    const double s2 = sigma * sigma;
    c(0, 0) = s2 * (delta * delta * delta / 3.0 + eps * eps * delta);
    c(0, 1) = c(1, 0) = s2 * 0.5 * delta * delta;
    c(1, 1) = s2 * delta;
    return c;
}

void realize_tau(const Vec& l, double slope, double sigma, double eps, const Vec& innovations,
                 Vec& tau, Vec& y) {
    if (l.size() < 1) throw BadShape("realize_tau: need at least one location");
    if (innovations.size() != 2 * (l.size() - 1))
        throw DimensionMismatch("realize_tau: need two innovations per transition");
    tau.assign(l.size(), 0.0);
    y.assign(l.size(), slope);
    for (std::size_t t = 0; t + 1 < l.size(); ++t) {
        const double delta = l[t + 1] - l[t];
        if (!(delta > 0.0)) throw DomainError("realize_tau: locations must ascend");
        const Step s = make_step(delta, sigma, eps);
        tau[t + 1] = tau[t] + delta * y[t] + s.L11 * innovations[2 * t];
        y[t + 1] = y[t] + s.L21 * innovations[2 * t] + s.L22 * innovations[2 * t + 1];
    }
}

Vec amplitude_spectrum(const SpectrumParams& params, const SpectrumLatents& latents,
                       const Grid& grid) {
    const SpecCore core = make_core(grid);
    if (latents.scalars.size() != 5)
        throw DimensionMismatch("amplitude_spectrum: need five scalar latents");
    if (latents.tau.size() != 2 * core.transitions)
        throw DimensionMismatch("amplitude_spectrum: innovation block size mismatch");
    Vec x = latents.scalars;
    x.insert(x.end(), latents.tau.begin(), latents.tau.end());
    return eval_spectrum(core, params, x).amp;
}

DiffMap spectrum_map(const SpectrumParams& params, const Grid& grid) {
    auto core = std::make_shared<SpecCore>(make_core(grid));
    DiffMap m;
    m.dim_in = 5 + 2 * core->transitions;
    m.dim_out = core->l.size() + 1;
    m.name = "spectrum";
    m.forward_fn = [core, params](const Vec& x) { return eval_spectrum(*core, params, x).amp; };
    m.tangent_fn = [core, params](const Vec& x, const Vec& v) {
        return spec_tangent(*core, params, eval_spectrum(*core, params, x), v);
    };
    m.cotangent_fn = [core, params](const Vec& x, const Vec& u) {
        return spec_cotangent(*core, params, eval_spectrum(*core, params, x), u);
    };
    return m;
}

Vec correlated_field(const Vec& amplitude, const Vec& xi, const Grid& grid) {
    if (amplitude.size() != grid.n_bins())
        throw DimensionMismatch("correlated_field: one amplitude per distinct |k|");
    require_dim(xi, grid.size(), "correlated_field excitations");
    return synth_field(make_synth(grid), amplitude, hermitian_pack(grid, xi));
}

DiffMap correlated_field_map(const SpectrumParams& params, const Grid& grid) {
    auto core = std::make_shared<SynthCore>(make_synth(grid));
    auto spec = std::make_shared<DiffMap>(spectrum_map(params, grid));
    const std::size_t sdim = spec->dim_in;
    const std::size_t npix = grid.size();

    DiffMap m;
    m.dim_in = sdim + npix;
    m.dim_out = npix;
    m.name = "correlated_field";
    m.forward_fn = [core, spec, sdim](const Vec& x) {
        const Vec zeta(x.begin(), x.begin() + sdim);
        const Vec xi(x.begin() + sdim, x.end());
        return synth_field(*core, spec->forward_fn(zeta), hermitian_pack(*core->grid, xi));
    };
    m.tangent_fn = [core, spec, sdim](const Vec& x, const Vec& v) {
        const Vec zeta(x.begin(), x.begin() + sdim);
        const Vec xi(x.begin() + sdim, x.end());
        const Vec amp = spec->forward_fn(zeta);
        const Vec damp = spec->tangent_fn(zeta, Vec(v.begin(), v.begin() + sdim));
        const CVec modes = hermitian_pack(*core->grid, xi);
        const CVec dmodes = hermitian_pack(*core->grid, Vec(v.begin() + sdim, v.end()));
        CVec w(modes.size());
        for (std::size_t k = 0; k < modes.size(); ++k)
            w[k] = core->ck[k] * (damp[core->bin[k]] * modes[k] + amp[core->bin[k]] * dmodes[k]);
        return real_part(dft(*core->grid, w, false));
    };
    m.cotangent_fn = [core, spec, sdim](const Vec& x, const Vec& u) {
        const Vec zeta(x.begin(), x.begin() + sdim);
        const Vec xi(x.begin() + sdim, x.end());
        const Vec amp = spec->forward_fn(zeta);
        const CVec modes = hermitian_pack(*core->grid, xi);
        CVec uc(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) uc[i] = Cplx(u[i], 0.0);
        const CVec b = dft(*core->grid, uc, false);
        // <u, field> = sum_k A_bin c_k b_k modes_k; split per amplitude bin
        // and per excitation (through the pack adjoint).
        Vec ubar_amp(amp.size(), 0.0);
        CVec w(modes.size());
        for (std::size_t k = 0; k < modes.size(); ++k) {
            ubar_amp[core->bin[k]] += core->ck[k] * (b[k] * modes[k]).real();
            w[k] = std::conj(amp[core->bin[k]] * core->ck[k] * b[k]);
        }
        Vec out = spec->cotangent_fn(zeta, ubar_amp);
        const Vec uxi = hermitian_pack_adjoint(*core->grid, w);
        out.insert(out.end(), uxi.begin(), uxi.end());
        return out;
    };
    return m;
}

DiffMap point_source_map(std::size_t n, double alpha, double q) {
    if (!(alpha > 0.0) || !(q > 0.0))
        throw DomainError("point_source_map: alpha and q must be positive");
    // p = q / t with P(alpha, t) = 1 - Phi(xi); solved through whichever
    // gamma tail keeps precision, so both flanks stay smooth.
    auto tval = [alpha](double xi) {
        const double root_half = 1.0 / std::sqrt(2.0);
        if (xi >= 0.0) {
            const double uc = 0.5 * std::erfc(xi * root_half);  // 1 - Phi(xi)
            if (!(uc > 0.0)) throw DomainError("point_source: latent too large");
            return gamma_p_inv(alpha, uc);
        }
        const double u = 0.5 * std::erfc(-xi * root_half);  // Phi(xi)
        if (!(u > 0.0)) throw DomainError("point_source: latent too large");
        return gamma_q_inv(alpha, u);
    };
    auto f = [tval, q](double xi) { return q / tval(xi); };
    auto df = [tval, alpha, q](double xi) {
        const double p = q / tval(xi);
        return normal_pdf(xi) / inv_gamma_pdf(alpha, q, p);
    };
    return pointwise_map(n, "point_source", f, df);
}

DiffMap psf_map(const Grid& grid, double fwhm) {
    if (!(fwhm > 0.0)) throw DomainError("psf_map: width must be positive");
    auto g = std::make_shared<Grid>(grid);
    const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));

    // Periodic Gaussian kernel, unit sum, centered on pixel 0.
    const std::size_t n = grid.size();
    CVec kernel(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        if (grid.ndim() == 1) {
            const double d = static_cast<double>(std::min(i, n - i));
            d2 = d * d;
        } else {
            const std::size_t n0 = grid.shape()[0], n1 = grid.shape()[1];
            const std::size_t r = i / n1, c = i % n1;
            const double dr = static_cast<double>(std::min(r, n0 - r));
            const double dc = static_cast<double>(std::min(c, n1 - c));
            d2 = dr * dr + dc * dc;
        }
        const double v = std::exp(-0.5 * d2 / (sigma * sigma));
        kernel[i] = Cplx(v, 0.0);
        total += v;
    }
    for (auto& v : kernel) v /= total;

    // The kernel is even, so the transfer function is real and the operator
    // symmetric; scrub round-off imaginary parts to keep the adjoint exact.
    const CVec tf_c = dft(grid, kernel, false);
    auto transfer = std::make_shared<Vec>(real_part(tf_c));

    LinOp op;
    op.dim_in = op.dim_out = n;
    op.apply = [g, transfer](const Vec& s) {
        CVec modes(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) modes[i] = Cplx(s[i], 0.0);
        modes = dft(*g, modes, false);
        for (std::size_t k = 0; k < modes.size(); ++k) modes[k] *= (*transfer)[k];
        return real_part(dft(*g, modes, true));
    };
    op.apply_t = op.apply;
    return linear_op_map(op, "psf");
}

}  // namespace geovi
