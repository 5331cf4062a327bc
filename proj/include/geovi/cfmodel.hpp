#pragma once

#include <cmath>

#include "geovi/dense.hpp"
#include "geovi/diffmap.hpp"
#include "geovi/grid.hpp"

namespace geovi {

// Positive scalar reparameterized as exp(log_mean + log_std * xi) of a unit
// normal latent.  log_mean may be -inf to pin the value to exactly zero (the
// sigma = 0 spectrum limit).
struct LogNormalPrior {
    double log_mean = 0.0;
    double log_std = 1.0;
    double value(double xi) const { return std::exp(log_mean + log_std * xi); }
};

// Affine reparameterization mean + std * xi of a unit normal latent.
struct NormalPrior {
    double mean = 0.0;
    double std = 1.0;
    double value(double xi) const { return mean + std * xi; }
};

// Hyper-priors of the amplitude-spectrum model.  The log-amplitude tau over
// log|k| is a power law (straight line with the slope value) plus integrated
// Wiener-process deviations scaled by flexibility (sigma) and roughened by
// asperity (eps).  offset_std sets the zero-mode amplitude; fluctuations
// sets the a-priori standard deviation of the nonzero-mode field.
struct SpectrumParams {
    LogNormalPrior offset_std{std::log(0.3), 0.3};
    LogNormalPrior fluctuations{0.0, 0.3};
    NormalPrior slope{-2.0, 0.5};
    LogNormalPrior flexibility{std::log(0.4), 0.4};
    LogNormalPrior asperity{std::log(0.2), 0.4};
};

// Latent block for the spectrum: five scalars (offset_std, fluctuations,
// slope, flexibility, asperity), then two innovations (eta_l, xi_l) per
// transition between adjacent nonzero log-|k| bins.
struct SpectrumLatents {
    Vec scalars;  // size 5
    Vec tau;      // size 2 * (nonzero bins - 1)
};

std::size_t spectrum_latent_dim(const Grid& grid);

// 2x2 transition covariance of the integrated Wiener process over a
// log-frequency gap delta: sigma^2 [[d^3/3 + eps^2 d, d^2/2], [d^2/2, d]].
DenseMatrix wiener_transition_cov(double delta, double sigma, double eps);

// Realize (tau, y) at ascending locations l from tau[0] = 0, y[0] = slope,
// consuming two innovations per step through the Cholesky factor of the
// transition covariance.  tau and y are resized to l.size().
void realize_tau(const Vec& l, double slope, double sigma, double eps,
                 const Vec& innovations, Vec& tau, Vec& y);

// Amplitude per distinct-|k| bin.  Index 0 is the zero mode (= offset_std
// value); nonzero bins carry fluctuations * exp(tau) normalized so the
// a-priori nonzero-mode field standard deviation equals fluctuations.
Vec amplitude_spectrum(const SpectrumParams& params, const SpectrumLatents& latents,
                       const Grid& grid);

// amplitude_spectrum as a DiffMap over the packed latents [scalars, tau].
DiffMap spectrum_map(const SpectrumParams& params, const Grid& grid);

// Field synthesis s_x = sum_k c_k A_bin(k) pack(xi)_k exp(-2 pi i k.x / n)
// with c_k = 1/sqrt(2) on conjugate pairs and 1 on self-conjugate modes: a
// unit excitation of one pair mode is a sinusoid with peak amplitude A
// (spatial variance A^2/2), and the zero mode contributes the constant
// A_0 * xi_0.
Vec correlated_field(const Vec& amplitude, const Vec& xi, const Grid& grid);

// Joint map over [spectrum latents, excitations] -> field values.
DiffMap correlated_field_map(const SpectrumParams& params, const Grid& grid);

// Pointwise inverse-gamma point sources p = Quantile_{alpha,q}(Phi(xi)):
// monotone increasing, xi = 0 lands on the distribution median.
DiffMap point_source_map(std::size_t n, double alpha, double q);

// Periodic FFT convolution with an isotropic Gaussian kernel of the given
// full width at half maximum (in pixels), normalized to unit sum.
DiffMap psf_map(const Grid& grid, double fwhm);

}  // namespace geovi
