#include <cmath>

#include <doctest.h>

#include "geovi/errors.hpp"
#include "geovi/special.hpp"

using namespace geovi;

TEST_SUITE_BEGIN("special");

TEST_CASE("normal pdf and cdf at reference points") {
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Abramowitz & Stegun style reference values.
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-13));
    CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-13));
    // Symmetry and far tails.
    for (double x : {0.3, 1.7, 4.0}) {
        CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(normal_cdf(-40.0) >= 0.0);
    CHECK(normal_cdf(40.0) == doctest::Approx(1.0));
}

TEST_CASE("normal cdf derivative is the pdf") {
    const double h = 1e-6;
    for (double x : {-2.5, -0.4, 0.0, 1.2, 3.0}) {
        const double fd = (normal_cdf(x + h) - normal_cdf(x - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(normal_pdf(x)).epsilon(1e-8));
    }
}

TEST_CASE("regularized incomplete gamma against closed forms") {
    // P(1, x) = 1 - exp(-x).
    for (double x : {0.01, 0.5, 1.0, 3.0, 20.0}) {
        CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
    }
    // P(1/2, x) = erf(sqrt(x)).
    for (double x : {0.1, 1.0, 4.0}) {
        CHECK(gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-13));
    }
    // P(2, x) = 1 - (1 + x) exp(-x).
    for (double x : {0.2, 2.0, 8.0}) {
        CHECK(gamma_p(2.0, x) == doctest::Approx(1.0 - (1.0 + x) * std::exp(-x)).epsilon(1e-13));
    }
    CHECK(gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("gamma_p_inv round trips across shapes and tail probabilities") {
    for (double a : {0.3, 0.5, 1.0, 2.5, 10.0, 80.0}) {
        for (double p : {1e-8, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-6}) {
            const double t = gamma_p_inv(a, p);
            CHECK(t > 0.0);
            CHECK(gamma_p(a, t) == doctest::Approx(p).epsilon(1e-11));
        }
    }
}

TEST_CASE("inverse gamma quantile matches the alpha=1 closed form") {
    // alpha = 1: cdf(x) = exp(-q/x), so quantile(u) = -q / log(u).
    const double q = 3.0;
    for (double u : {0.05, 0.3, 0.5, 0.9, 0.999}) {
        CHECK(inv_gamma_quantile(1.0, q, u) ==
              doctest::Approx(-q / std::log(u)).epsilon(1e-11));
    }
}

TEST_CASE("inverse gamma cdf/quantile round trip and pdf consistency") {
    const double alpha = 2.0, q = 3.0;
    for (double u : {0.01, 0.2, 0.5, 0.8, 0.99}) {
        const double x = inv_gamma_quantile(alpha, q, u);
        CHECK(inv_gamma_cdf(alpha, q, x) == doctest::Approx(u).epsilon(1e-11));
        // pdf is the derivative of the cdf.
        const double h = 1e-6 * x;
        const double fd = (inv_gamma_cdf(alpha, q, x + h) - inv_gamma_cdf(alpha, q, x - h)) /
                          (2.0 * h);
        CHECK(fd == doctest::Approx(inv_gamma_pdf(alpha, q, x)).epsilon(1e-7));
    }
    // Mode of the density sits at q / (alpha + 1).
    const double mode = q / (alpha + 1.0);
    CHECK(inv_gamma_pdf(alpha, q, mode) > inv_gamma_pdf(alpha, q, mode * 1.1));
    CHECK(inv_gamma_pdf(alpha, q, mode) > inv_gamma_pdf(alpha, q, mode * 0.9));
}

TEST_CASE("inverse gamma quantile rejects u outside the open unit interval") {
    CHECK_THROWS_AS(inv_gamma_quantile(2.0, 3.0, 0.0), DomainError);
    CHECK_THROWS_AS(inv_gamma_quantile(2.0, 3.0, 1.0), DomainError);
    CHECK_THROWS_AS(inv_gamma_quantile(2.0, 3.0, -0.5), DomainError);
}

TEST_SUITE_END();
