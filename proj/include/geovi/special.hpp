#pragma once

namespace geovi {

// Standard normal density / distribution function (via std::erf).
double normal_pdf(double x);
double normal_cdf(double x);

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// series expansion for x < a + 1, continued fraction otherwise.
double gamma_p(double a, double x);

// Inverse of gamma_p in x: returns t with P(a, t) = p.  Bisection bracket
// plus Newton polish; converges to ~1e-14 relative so finite-difference
// derivatives stay clean.
double gamma_p_inv(double a, double p);

// Upper complement Q(a, x) = 1 - P(a, x) and its inverse, evaluated through
// the continued fraction so tiny tail probabilities keep full precision.
double gamma_q(double a, double x);
double gamma_q_inv(double a, double s);

// Inverse-gamma distribution with shape alpha and scale q:
//   pdf(x)      = q^alpha / Gamma(alpha) * x^(-alpha-1) exp(-q/x)
//   cdf(x)      = 1 - P(alpha, q/x)
//   quantile(u) = q / gamma_p_inv(alpha, 1 - u)
double inv_gamma_pdf(double alpha, double q, double x);
double inv_gamma_cdf(double alpha, double q, double x);
double inv_gamma_quantile(double alpha, double q, double u);

}  // namespace geovi
