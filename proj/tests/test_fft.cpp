#include <doctest.h>

#include <cmath>

#include "geovi/errors.hpp"
#include "geovi/fft.hpp"
#include "geovi/grid.hpp"
#include "geovi/rng.hpp"
#include "test_support.hpp"

using namespace geovi;
using namespace geovi_test;

namespace {

double max_err(const CVec& a, const CVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

CVec random_cvec(std::size_t n, Rng& rng) {
    CVec v(n);
    for (auto& x : v) x = Cplx(rng.normal(), rng.normal());
    return v;
}

}  // namespace

TEST_SUITE("fft") {

TEST_CASE("grid: shape validation and mode geometry") {
    CHECK_THROWS_AS(Grid({3}), BadShape);
    CHECK_THROWS_AS(Grid({0}), BadShape);
    CHECK_THROWS_AS(Grid({4, 4, 4}), BadShape);

    Grid g({8});
    CHECK(g.size() == 8);
    CHECK(g.folded_freq(0, 0) == 0);
    CHECK(g.folded_freq(3, 0) == 3);
    CHECK(g.folded_freq(4, 0) == 4);   // Nyquist stays positive
    CHECK(g.folded_freq(5, 0) == -3);
    CHECK(g.folded_freq(7, 0) == -1);
    // |k| bins on 8 sites: 0,1,2,3,4 with multiplicities 1,2,2,2,1.
    CHECK(g.n_bins() == 5);
    CHECK(g.bin_kmag()[0] == 0.0);
    CHECK(g.bin_kmag()[4] == 4.0);
    CHECK(g.bin_multiplicity()[0] == 1);
    CHECK(g.bin_multiplicity()[1] == 2);
    CHECK(g.bin_multiplicity()[4] == 1);

    Grid g2({4, 4});
    CHECK(g2.size() == 16);
    // Distinct |k|^2 on a 4x4 grid: 0,1,2,4,5,8.
    CHECK(g2.n_bins() == 6);
    CHECK(g2.bin_kmag()[1] == doctest::Approx(1.0));
    CHECK(g2.bin_kmag()[2] == doctest::Approx(std::sqrt(2.0)));
    CHECK(g2.bin_kmag()[5] == doctest::Approx(std::sqrt(8.0)));
    std::size_t total = 0;
    for (std::size_t m : g2.bin_multiplicity()) total += m;
    CHECK(total == 16);
}

TEST_CASE("fft: impulse and constant inputs (hand-checked values)") {
    // Forward of a delta at x=0 is all-ones.
    Grid g({8});
    CVec delta(8, Cplx(0, 0));
    delta[0] = 1.0;
    CVec f = dft(g, delta, false);
    for (const auto& x : f) CHECK(std::abs(x - Cplx(1, 0)) < 1e-14);

    // Forward of a constant c is (8c, 0, ..., 0).
    CVec c(8, Cplx(2.5, 0));
    CVec fc = dft(g, c, false);
    CHECK(std::abs(fc[0] - Cplx(20.0, 0)) < 1e-13);
    for (std::size_t i = 1; i < 8; ++i) CHECK(std::abs(fc[i]) < 1e-13);

    // A pure mode exp(+2 pi i 3 x / 8) has forward transform 8 at k=3:
    CVec mode(8);
    for (std::size_t x = 0; x < 8; ++x) {
        const double ang = 2.0 * M_PI * 3.0 * static_cast<double>(x) / 8.0;
        mode[x] = Cplx(std::cos(ang), std::sin(ang));
    }
    CVec fm = dft(g, mode, false);
    CHECK(std::abs(fm[3] - Cplx(8, 0)) < 1e-12);
    for (std::size_t i = 0; i < 8; ++i)
        if (i != 3) CHECK(std::abs(fm[i]) < 1e-12);
}

TEST_CASE("fft: matches the naive O(n^2) reference on random data") {
    Rng rng(101);
    for (std::size_t n : {2u, 8u, 64u, 256u}) {
        Grid g({n});
        CVec in = random_cvec(n, rng);
        CHECK(max_err(dft(g, in, false), naive_dft(g, in, false)) < 1e-9);
        CHECK(max_err(dft(g, in, true), naive_dft(g, in, true)) < 1e-9);
    }
    for (auto shape : std::vector<std::vector<std::size_t>>{{4, 4}, {8, 16}}) {
        Grid g(shape);
        CVec in = random_cvec(g.size(), rng);
        CHECK(max_err(dft(g, in, false), naive_dft(g, in, false)) < 1e-9);
        CHECK(max_err(dft(g, in, true), naive_dft(g, in, true)) < 1e-9);
    }
}

TEST_CASE("fft: adjoint round trip is the identity up to 1024") {
    Rng rng(103);
    for (std::size_t n : {16u, 128u, 1024u}) {
        Grid g({n});
        CVec in = random_cvec(n, rng);
        CVec round = dft(g, dft(g, in, false), true);
        CHECK(max_err(round, in) < 1e-10);
    }
    Grid g2({32, 32});
    CVec in2 = random_cvec(g2.size(), rng);
    CHECK(max_err(dft(g2, dft(g2, in2, false), true), in2) < 1e-10);
}

TEST_CASE("fft: forward/adjoint pair satisfies the scaled inner-product identity") {
    // <F x, y> = <x, N * F_adj y> under the chosen scaling.
    Rng rng(107);
    Grid g({64});
    CVec x = random_cvec(64, rng), y = random_cvec(64, rng);
    CVec fx = dft(g, x, false);
    CVec fay = dft(g, y, true);
    Cplx lhs(0, 0), rhs(0, 0);
    for (std::size_t i = 0; i < 64; ++i) {
        lhs += std::conj(fx[i]) * y[i];
        rhs += std::conj(x[i]) * fay[i] * 64.0;
    }
    CHECK(std::abs(lhs - rhs) < 1e-9);
}

TEST_CASE("fft: rejects non-power-of-two input") {
    CVec v(6);
    CHECK_THROWS_AS(fft_radix2(v, false), BadShape);
}

TEST_CASE("hermitian pack: produces hermitian modes with unit expected power") {
    Rng rng(109);
    for (auto shape : std::vector<std::vector<std::size_t>>{{16}, {8, 8}}) {
        Grid g(shape);
        Vec xi = rng.normal_vec(g.size());
        CVec c = hermitian_pack(g, xi);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const std::size_t kc = g.conjugate_index(k);
            CHECK(std::abs(c[k] - std::conj(c[kc])) < 1e-14);
        }
        // Pack is an isometry: sum xi^2 == sum |c|^2.
        double p_real = 0.0, p_cplx = 0.0;
        for (double v : xi) p_real += v * v;
        for (const auto& v : c) p_cplx += std::norm(v);
        CHECK(p_real == doctest::Approx(p_cplx).epsilon(1e-12));
        // The resulting field (adjoint DFT of hermitian modes) is real.
        CVec field = dft(g, c, true);
        for (const auto& v : field) CHECK(std::fabs(v.imag()) < 1e-12);
    }
}

TEST_CASE("hermitian pack: adjoint identity <pack(x), u> = <x, pack_adj(u)>") {
    Rng rng(113);
    for (auto shape : std::vector<std::vector<std::size_t>>{{16}, {4, 8}}) {
        Grid g(shape);
        Vec x = rng.normal_vec(g.size());
        CVec u = random_cvec(g.size(), rng);
        CVec px = hermitian_pack(g, x);
        Vec pau = hermitian_pack_adjoint(g, u);
        double lhs = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            lhs += px[i].real() * u[i].real() + px[i].imag() * u[i].imag();
        const double rhs = dot(x, pau);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

}  // TEST_SUITE
