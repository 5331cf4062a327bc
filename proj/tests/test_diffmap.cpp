#include <cmath>
#include <vector>

#include <doctest.h>

#include "geovi/diffmap.hpp"
#include "geovi/errors.hpp"
#include "geovi/rng.hpp"
#include "test_support.hpp"

using namespace geovi;
using geovi_test::fd_jacobian;

namespace {

// fd_check plus an explicit dense-Jacobian comparison at the same point.
void check_map_at(const DiffMap& map, const Vec& x, Rng& rng) {
    INFO("map: ", map.name);
    const FdReport rep = fd_check(map, x, rng);
    INFO("tangent err ", rep.max_tangent_err, " adjoint err ", rep.max_adjoint_err);
    CHECK(rep.pass);

    const DenseMatrix jfd = fd_jacobian([&](const Vec& p) { return map.forward(p); }, x,
                                        map.dim_out);
    for (std::size_t j = 0; j < map.dim_in; ++j) {
        Vec e(map.dim_in, 0.0);
        e[j] = 1.0;
        const Vec col = map.jvp(x, e);
        for (std::size_t i = 0; i < map.dim_out; ++i) {
            CHECK(col[i] == doctest::Approx(jfd(i, j)).epsilon(1e-5).scale(1.0));
        }
    }
}

}  // namespace

TEST_SUITE_BEGIN("diffmap");

TEST_CASE("primitive maps pass derivative and adjoint checks") {
    Rng rng(101);
    Vec x = rng.normal_vec(5);
    Vec xpos(5);
    for (std::size_t i = 0; i < 5; ++i) xpos[i] = 0.2 + std::fabs(x[i]);

    check_map_at(identity_map(5), x, rng);
    check_map_at(affine_map(5, 3.0, -0.7), x, rng);
    check_map_at(exp_map(5), x, rng);
    check_map_at(log_map(5), xpos, rng);
    check_map_at(sigmoid_map(5), x, rng);
    check_map_at(pow_map(5, 2.5), xpos, rng);
    check_map_at(pow_map(5, 4.0), x, rng);  // integer exponent: any base
    check_map_at(sum_map(5), x, rng);
    check_map_at(broadcast_map(5), Vec{0.37}, rng);
    check_map_at(normal_cdf_map(5), x, rng);
    check_map_at(select_map(5, {4, 0, 0, 2}), x, rng);

    Vec x10 = rng.normal_vec(10);
    check_map_at(product_map(5), x10, rng);

    DenseMatrix a(3, 5);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 5; ++j) a(i, j) = rng.normal();
    check_map_at(linear_map(a), x, rng);
}

TEST_CASE("pointwise map values and hand-checked derivatives") {
    auto cube = pointwise_map(3, "cube", [](double t) { return t * t * t; },
                              [](double t) { return 3.0 * t * t; });
    const Vec x{1.0, -2.0, 0.5};
    const Vec y = cube.forward(x);
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(-8.0));
    CHECK(y[2] == doctest::Approx(0.125));
    const Vec t = cube.jvp(x, Vec{1.0, 1.0, 1.0});
    CHECK(t[1] == doctest::Approx(12.0));
    Rng rng(7);
    CHECK(fd_check(cube, x, rng).pass);
}

TEST_CASE("fd_check flags a wrong tangent") {
    auto bad = pointwise_map(3, "bad-tangent", [](double t) { return std::sin(t); },
                             [](double t) { return std::cos(t) + 0.05; });
    Rng rng(8);
    const FdReport rep = fd_check(bad, Vec{0.1, -0.6, 1.1}, rng);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_tangent_err > 1e-3);
}

TEST_CASE("fd_check flags a broken adjoint") {
    // Correct tangent, deliberately transposed-with-noise cotangent.
    DiffMap bad = identity_map(4);
    bad.name = "bad-adjoint";
    bad.cotangent_fn = [](const Vec&, const Vec& u) {
        Vec out = u;
        out[0] += 0.01 * u[1];
        return out;
    };
    Rng rng(9);
    const FdReport rep = fd_check(bad, Vec{0.3, 1.0, -0.2, 0.5}, rng);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_adjoint_err > 1e-6);
}

TEST_CASE("compose chains values and derivatives") {
    // x -> exp(3x - 1), scalar chain hand-check.
    auto m = compose(exp_map(2), affine_map(2, 3.0, -1.0));
    const Vec x{0.2, -0.4};
    const Vec y = m.forward(x);
    CHECK(y[0] == doctest::Approx(std::exp(-0.4)).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(std::exp(-2.2)).epsilon(1e-14));
    const Vec t = m.jvp(x, Vec{1.0, 0.0});
    CHECK(t[0] == doctest::Approx(3.0 * std::exp(-0.4)).epsilon(1e-14));
    CHECK(t[1] == doctest::Approx(0.0));
    Rng rng(11);
    check_map_at(m, x, rng);

    // Deep chain: sigmoid(exp(0.5 x + 0.1)).
    auto deep = compose(sigmoid_map(3), compose(exp_map(3), affine_map(3, 0.5, 0.1)));
    check_map_at(deep, rng.normal_vec(3), rng);
}

TEST_CASE("composition dimension mismatch is rejected") {
    CHECK_THROWS_AS(compose(exp_map(3), affine_map(2, 1.0, 0.0)), DimensionMismatch);
}

TEST_CASE("stack_blocks forms a block-diagonal Jacobian") {
    auto m = stack_blocks({exp_map(2), affine_map(3, 2.0, 0.0)});
    CHECK(m.dim_in == 5);
    CHECK(m.dim_out == 5);
    const Vec x{0.1, 0.2, 1.0, 2.0, 3.0};
    const Vec y = m.forward(x);
    CHECK(y[0] == doctest::Approx(std::exp(0.1)));
    CHECK(y[3] == doctest::Approx(4.0));
    // A tangent in the second block leaves the first block's output alone.
    const Vec t = m.jvp(x, Vec{0.0, 0.0, 1.0, 0.0, 0.0});
    CHECK(t[0] == 0.0);
    CHECK(t[1] == 0.0);
    CHECK(t[2] == doctest::Approx(2.0));
    Rng rng(13);
    check_map_at(m, x, rng);
}

TEST_CASE("fanout_shared stacks outputs and accumulates cotangents") {
    auto m = fanout_shared({identity_map(2), affine_map(2, 2.0, 0.0)});
    CHECK(m.dim_in == 2);
    CHECK(m.dim_out == 4);
    const Vec x{0.5, -1.0};
    const Vec y = m.forward(x);
    CHECK(y[0] == doctest::Approx(0.5));
    CHECK(y[2] == doctest::Approx(1.0));
    // vjp: J^T = [I, 2I], so u = (a, b, c, d) pulls back to (a + 2c, b + 2d).
    const Vec u{1.0, 2.0, 3.0, 4.0};
    const Vec v = m.vjp(x, u);
    CHECK(v[0] == doctest::Approx(7.0));
    CHECK(v[1] == doctest::Approx(10.0));
    Rng rng(17);
    check_map_at(m, x, rng);
}

TEST_CASE("select_map gathers forward and scatter-adds the cotangent") {
    auto m = select_map(4, {2, 2, 0});
    const Vec x{10.0, 20.0, 30.0, 40.0};
    const Vec y = m.forward(x);
    CHECK(y == Vec{30.0, 30.0, 10.0});
    const Vec v = m.vjp(x, Vec{1.0, 2.0, 5.0});
    CHECK(v == Vec{5.0, 0.0, 3.0, 0.0});
    CHECK_THROWS_AS(select_map(3, {3}), DimensionMismatch);
}

TEST_CASE("linear_op_map wraps an implicit operator") {
    Rng rng(19);
    DenseMatrix a(3, 4);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) a(i, j) = rng.normal();
    auto m = linear_op_map(LinOp::from_dense(a), "dense-op");
    const Vec x = rng.normal_vec(4);
    CHECK(max_abs(sub(m.forward(x), a.matvec(x))) == doctest::Approx(0.0));
    check_map_at(m, x, rng);

    LinOp no_adjoint = LinOp::symmetric_op(3, [](const Vec& v) { return v; });
    no_adjoint.apply_t = nullptr;
    no_adjoint.apply = [](const Vec& v) { return v; };
    CHECK_THROWS_AS(linear_op_map(no_adjoint, "no-adjoint"), Error);
}

TEST_CASE("domain violations and boundary guards throw") {
    auto lg = log_map(2);
    CHECK_THROWS_AS(lg.forward(Vec{1.0, -0.5}), DomainError);
    CHECK_THROWS_AS(lg.forward(Vec{0.0, 1.0}), DomainError);
    auto pw = pow_map(2, 0.5);
    CHECK_THROWS_AS(pw.forward(Vec{-1.0, 1.0}), DomainError);

    auto id = identity_map(3);
    CHECK_THROWS_AS(id.forward(Vec{1.0, 2.0}), DimensionMismatch);
    CHECK_THROWS_AS(id.jvp(Vec{1.0, 2.0, 3.0}, Vec{1.0}), DimensionMismatch);
    const double nan = std::nan("");
    CHECK_THROWS_AS(id.forward(Vec{nan, 0.0, 0.0}), NonFiniteValue);
}

TEST_CASE("integer pow at negative base, fractional pow derivative domain") {
    auto p4 = pow_map(1, 4.0);
    CHECK(p4.forward(Vec{-2.0})[0] == doctest::Approx(16.0));
    CHECK(p4.jvp(Vec{-2.0}, Vec{1.0})[0] == doctest::Approx(-32.0));
    auto p0 = pow_map(1, 0.0);
    CHECK(p0.forward(Vec{-3.0})[0] == doctest::Approx(1.0));
    CHECK(p0.jvp(Vec{-3.0}, Vec{1.0})[0] == doctest::Approx(0.0));
}

TEST_SUITE_END();
