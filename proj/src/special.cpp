#include "geovi/special.hpp"

#include <cmath>
#include <string>

#include "geovi/errors.hpp"

namespace geovi {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Lower series: P(a,x) = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)...(a+n)).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x) (modified Lentz).
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw DomainError("gamma_p: a must be positive");
    if (x < 0.0) throw DomainError("gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_p_inv(double a, double p) {
    if (!(a > 0.0)) throw DomainError("gamma_p_inv: a must be positive");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("gamma_p_inv: p must lie in (0, 1)");

    // Bracket the root; P is monotone increasing in x.
    double lo = 0.0, hi = a + 1.0;
    while (gamma_p(a, hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw Error("gamma_p_inv: failed to bracket");
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        const double f = gamma_p(a, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        // Newton step with the analytic density, clipped to the bracket.
        const double pdf = std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
        double xn = (pdf > 0.0) ? x - f / pdf : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-15 * std::fabs(x)) { x = xn; break; }
        x = xn;
    }
    return x;
}

double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw DomainError("gamma_q: a must be positive");
    if (x < 0.0) throw DomainError("gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
}

double gamma_q_inv(double a, double s) {
    if (!(a > 0.0)) throw DomainError("gamma_q_inv: a must be positive");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("gamma_q_inv: s must lie in (0, 1)");

    // Q is monotone decreasing in x; expand the bracket upward.
    double lo = 0.0, hi = a + 1.0;
    while (gamma_q(a, hi) > s) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw Error("gamma_q_inv: failed to bracket");
    }
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        const double f = gamma_q(a, x) - s;
        if (f > 0.0) lo = x; else hi = x;
        const double pdf = std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
        double xn = (pdf > 0.0) ? x + f / pdf : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-15 * std::fabs(x)) { x = xn; break; }
        x = xn;
    }
    return x;
}

double inv_gamma_pdf(double alpha, double q, double x) {
    if (!(x > 0.0)) return 0.0;
    return std::exp(alpha * std::log(q) - std::lgamma(alpha) - (alpha + 1.0) * std::log(x) - q / x);
}

double inv_gamma_cdf(double alpha, double q, double x) {
    if (!(x > 0.0)) return 0.0;
    return 1.0 - gamma_p(alpha, q / x);
}

double inv_gamma_quantile(double alpha, double q, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("inv_gamma_quantile: u must lie in (0, 1)");
    return q / gamma_p_inv(alpha, 1.0 - u);
}

}  // namespace geovi
