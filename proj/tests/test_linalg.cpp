#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "geovi/dense.hpp"
#include "geovi/errors.hpp"
#include "geovi/linop.hpp"
#include "geovi/parallel.hpp"
#include "geovi/rng.hpp"
#include "geovi/vec.hpp"
#include "test_support.hpp"

using namespace geovi;
using namespace geovi_test;

TEST_SUITE("linalg") {

TEST_CASE("rng: identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(43);
    bool any_diff = false;
    for (int i = 0; i < 16; ++i) any_diff |= (c.next_u64() != d.next_u64());
    CHECK(any_diff);
}

TEST_CASE("rng: forked streams are reproducible and distinct") {
    Rng root(7);
    Rng f1 = root.fork(3), f2 = root.fork(3), f3 = root.fork(4);
    for (int i = 0; i < 100; ++i) CHECK(f1.next_u64() == f2.next_u64());
    bool any_diff = false;
    Rng f4 = root.fork(3);
    for (int i = 0; i < 16; ++i) any_diff |= (f4.next_u64() != f3.next_u64());
    CHECK(any_diff);
    // Forking must not depend on the parent's consumed state.
    root.next_u64();
    Rng f5 = root.fork(3);
    Rng f6 = Rng(7).fork(3);
    for (int i = 0; i < 16; ++i) CHECK(f5.next_u64() == f6.next_u64());
}

TEST_CASE("rng: gaussian moments at 10^5 draws") {
    Rng rng(123);
    const int n = 100000;
    double s = 0.0, s2 = 0.0, s3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
        s3 += x * x * x;
    }
    CHECK(std::fabs(s / n) < 0.02);
    CHECK(std::fabs(s2 / n - 1.0) < 0.03);
    CHECK(std::fabs(s3 / n) < 0.08);
}

TEST_CASE("rng: poisson mean and variance") {
    Rng rng(5);
    for (double lambda : {0.5, 4.0, 60.0, 400.0}) {
        const int n = 20000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(lambda));
            s += k;
            s2 += k * k;
        }
        const double mean = s / n;
        const double var = s2 / n - mean * mean;
        CHECK(std::fabs(mean - lambda) < 5.0 * std::sqrt(lambda / n) + 1e-12);
        CHECK(std::fabs(var / lambda - 1.0) < 0.1);
    }
    CHECK(Rng(1).poisson(0.0) == 0);
    CHECK_THROWS_AS(Rng(1).poisson(-1.0), DomainError);
}

TEST_CASE("dense: cholesky reproduces a hand-factored matrix") {
    // A = L L^T with L = [[2,0],[1,3]] -> A = [[4,2],[2,10]].
    DenseMatrix a(2, 2);
    a(0, 0) = 4.0; a(0, 1) = 2.0; a(1, 0) = 2.0; a(1, 1) = 10.0;
    DenseMatrix l = cholesky(a);
    CHECK(l(0, 0) == doctest::Approx(2.0));
    CHECK(l(1, 0) == doctest::Approx(1.0));
    CHECK(l(1, 1) == doctest::Approx(3.0));
    CHECK(cholesky_logdet(a) == doctest::Approx(std::log(36.0)));

    DenseMatrix notpd(2, 2);
    notpd(0, 0) = 1.0; notpd(0, 1) = 2.0; notpd(1, 0) = 2.0; notpd(1, 1) = 1.0;
    CHECK_THROWS_AS(cholesky(notpd), NotPositiveDefinite);
}

TEST_CASE("dense: logdet agrees with the jacobi eigenvalue oracle") {
    Rng rng(11);
    for (std::size_t n : {2u, 5u, 17u, 40u}) {
        DenseMatrix a = random_spd(n, rng);
        // Oracle: sum of eigenvalue logs from the (algorithmically unrelated)
        // Jacobi route.
        EighResult e = jacobi_eigh(a);
        double expected = 0.0;
        for (double lam : e.values) expected += std::log(lam);
        CHECK(cholesky_logdet(a) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("dense: jacobi eigendecomposition reconstructs the matrix") {
    Rng rng(13);
    DenseMatrix a = random_spd(8, rng);
    EighResult e = jacobi_eigh(a);
    // V diag(vals) V^T == A
    DenseMatrix rec(8, 8);
    for (std::size_t k = 0; k < 8; ++k)
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t j = 0; j < 8; ++j)
                rec(i, j) += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
    CHECK(rec.max_abs_diff(a) < 1e-10);
    for (std::size_t k = 1; k < 8; ++k) CHECK(e.values[k] >= e.values[k - 1]);
}

TEST_CASE("dense: sym_sqrt squares back and inverse root inverts") {
    Rng rng(17);
    DenseMatrix a = random_spd(6, rng);
    DenseMatrix r = sym_sqrt(a);
    CHECK(r.mul(r).max_abs_diff(a) < 1e-9);
    DenseMatrix ir = sym_inv_sqrt(a);
    DenseMatrix should_be_i = ir.mul(a).mul(ir);
    CHECK(should_be_i.max_abs_diff(DenseMatrix::identity(6)) < 1e-9);
}

TEST_CASE("dense: gauss_solve against cholesky_solve on SPD systems") {
    Rng rng(19);
    DenseMatrix a = random_spd(12, rng);
    Vec b = rng.normal_vec(12);
    Vec x1 = gauss_solve(a, b);
    Vec x2 = cholesky_solve(cholesky(a), b);
    CHECK(norm2(sub(x1, x2)) < 1e-9 * (1.0 + norm2(x1)));
    Vec recon = a.matvec(x1);
    CHECK(norm2(sub(recon, b)) < 1e-9 * norm2(b));
}

TEST_CASE("cg: solves an SPD system to the requested tolerance") {
    Rng rng(23);
    const std::size_t n = 30;
    DenseMatrix a = random_spd(n, rng, 1.0);
    Vec b = rng.normal_vec(n);
    LinOp op = LinOp::from_dense(a);
    CgResult res = cg_solve(op, b, {1e-10, 0});
    CHECK(res.converged);
    // Oracle: direct elimination solve.
    Vec expected = gauss_solve(a, b);
    CHECK(norm2(sub(res.x, expected)) < 1e-7 * (1.0 + norm2(expected)));
}

TEST_CASE("cg: identity converges in one iteration, zero rhs immediately") {
    LinOp id = LinOp::identity(5);
    Vec b{1, 2, 3, 4, 5};
    CgResult res = cg_solve(id, b);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(norm2(sub(res.x, b)) < 1e-14);

    CgResult z = cg_solve(id, zeros(5));
    CHECK(z.converged);
    CHECK(z.iterations == 0);
}

TEST_CASE("cg: iteration cap reports non-convergence without throwing") {
    Rng rng(29);
    // Ill-conditioned: diag(1, 1e-8) style spectrum.
    DenseMatrix a(40, 40);
    for (std::size_t i = 0; i < 40; ++i) a(i, i) = (i == 0) ? 1e-8 : 1.0 + rng.uniform();
    Vec b = rng.normal_vec(40);
    CgResult res = cg_solve(LinOp::from_dense(a), b, {1e-14, 3});
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 3);
    CHECK(res.relative_residual > 0.0);
}

TEST_CASE("cg: rejects non-finite inputs") {
    LinOp id = LinOp::identity(2);
    Vec bad{1.0, std::nan("")};
    CHECK_THROWS_AS(cg_solve(id, bad), NonFiniteValue);
}

TEST_CASE("dense_materialize: recovers the matrix and enforces the limit") {
    Rng rng(31);
    DenseMatrix a = random_spd(9, rng);
    DenseMatrix m = dense_materialize(LinOp::from_dense(a));
    CHECK(m.max_abs_diff(a) == 0.0);

    LinOp big = LinOp::identity(dense_limit() + 1);
    CHECK_THROWS_AS(dense_materialize(big), DimensionTooLarge);

    // Environment override is honored.
    setenv("GEOVI_DENSE_LIMIT", "4", 1);
    CHECK(dense_limit() == 4);
    CHECK_THROWS_AS(dense_materialize(LinOp::identity(5)), DimensionTooLarge);
    unsetenv("GEOVI_DENSE_LIMIT");
    CHECK(dense_limit() == 3000);
}

TEST_CASE("parallel_for: slot writes match serial execution for any thread count") {
    const std::size_t n = 101;
    std::vector<double> serial(n), par(n);
    auto work = [](std::size_t i) { return std::sqrt(static_cast<double>(i) + 0.5) * 3.0; };
    for (std::size_t i = 0; i < n; ++i) serial[i] = work(i);
    for (int threads : {1, 2, 3, 8}) {
        std::fill(par.begin(), par.end(), 0.0);
        parallel_for(n, threads, [&](std::size_t i) { par[i] = work(i); });
        CHECK(par == serial);
    }
}

TEST_CASE("vec: helpers and finiteness guards") {
    Vec a{1.0, 2.0}, b{3.0, -1.0};
    CHECK(dot(a, b) == doctest::Approx(1.0));
    CHECK(norm2(Vec{3.0, 4.0}) == doctest::Approx(5.0));
    CHECK_THROWS_AS(dot(a, Vec{1.0}), DimensionMismatch);
    CHECK_THROWS_AS(require_finite(Vec{1.0, INFINITY}, "t"), NonFiniteValue);
    Vec c = concat(a, b);
    CHECK(c == Vec{1.0, 2.0, 3.0, -1.0});
}

}  // TEST_SUITE
