#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chiral/error.hpp"
#include "chiral/lattice.hpp"

using namespace chiral;

TEST_CASE("model parameters derive alpha and epsilon") {
    const ModelParams p = ModelParams::make(0.02, 0.08);
    CHECK(p.alpha() == doctest::Approx(4.0 * 0.92).epsilon(1e-15));
    CHECK(p.epsilon() == doctest::Approx(0.02 / std::sqrt(0.16)).epsilon(1e-15));
    CHECK(p.optimal_angle() == doctest::Approx(std::acos(0.92)));
    CHECK_THROWS_AS(ModelParams::make(0.0, 0.1), ValidationError);
    CHECK_THROWS_AS(ModelParams::make(0.1, -0.1), ValidationError);
}

TEST_CASE("index set of a square counts closed triples of cells") {
    // cells Q(i,j), Q(i+1,j), Q(i,j+1) inside [0,1]^2 with lambda = 1/N: 0 <= i, j <= N-2
    for (int n : {4, 7, 16}) {
        const auto idx = index_set(Domain::unit_square(), 1.0 / n);
        REQUIRE(idx.size() == static_cast<std::size_t>((n - 1) * (n - 1)));
        CHECK(idx.front() == Index2{0, 0});
        CHECK(idx.back() == Index2{n - 2, n - 2});
        // row-major, j outer
        CHECK(idx[1] == Index2{1, 0});
    }
}

TEST_CASE("index set of an offset rectangle") {
    const Domain d = Domain::rectangle({0.5, 0.25}, 1.0, 0.5);
    const auto idx = index_set(d, 0.25);
    // i from 2 to 4, j from 1 to 1
    REQUIRE(idx.size() == 3);
    CHECK(idx[0] == Index2{2, 1});
    CHECK(idx[2] == Index2{4, 1});
}

TEST_CASE("index set of an L-shaped polygon drops the notch") {
    const Domain l = Domain::polygon({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}});
    const auto idx = index_set(l, 0.25);
    for (const Index2& k : idx) {
        const bool in_notch = k.i >= 2 && k.j >= 1;
        CHECK_FALSE(in_notch);
    }
    CHECK(std::find(idx.begin(), idx.end(), Index2{0, 0}) != idx.end());
    CHECK(std::find(idx.begin(), idx.end(), Index2{2, 0}) != idx.end());
    CHECK(std::find(idx.begin(), idx.end(), Index2{0, 2}) != idx.end());
}

TEST_CASE("1d index set") {
    const auto idx = index_set_1d(0.0, 1.0, 0.25);
    REQUIRE(idx.size() == 3);
    CHECK(idx.front() == 0);
    CHECK(idx.back() == 2);
}

TEST_CASE("discrete derivatives of polynomials") {
    const double h = 0.1;
    ScalarGrid g(6, 5, h);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 6; ++i) {
            const double x = h * i, y = h * j;
            g.at(i, j) = x * x + 3.0 * x * y - y;
        }
    const ScalarGrid d1 = discrete_derivative(g, Derivative::d1);
    CHECK(d1.nx() == 5);
    CHECK(d1.ny() == 5);
    // (g(x+h) - g(x)) / h = 2x + h + 3y
    CHECK(d1.at(2, 3) == doctest::Approx(2 * 0.2 + h + 3 * 0.3).epsilon(1e-12));
    const ScalarGrid d2 = discrete_derivative(g, Derivative::d2);
    CHECK(d2.at(1, 1) == doctest::Approx(3 * 0.1 - 1.0).epsilon(1e-12));
    const ScalarGrid d11 = discrete_derivative(g, Derivative::d11);
    CHECK(d11.nx() == 4);
    CHECK(d11.at(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
    const ScalarGrid d12 = discrete_derivative(g, Derivative::d12);
    CHECK(d12.at(3, 2) == doctest::Approx(3.0).epsilon(1e-9));
    const ScalarGrid d22 = discrete_derivative(g, Derivative::d22);
    CHECK(std::abs(d22.at(0, 0)) < 1e-9);
}

TEST_CASE("discrete derivative rejects grids smaller than the stencil") {
    CHECK_THROWS_AS(discrete_derivative(ScalarGrid(1, 3, 1.0), Derivative::d1), ValidationError);
    CHECK_THROWS_AS(discrete_derivative(ScalarGrid(3, 2, 1.0), Derivative::d22), ValidationError);
}

TEST_CASE("affine interpolation reproduces affine data and triangle gradients") {
    const double h = 0.5;
    ScalarGrid g(4, 4, h);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 4; ++i) g.at(i, j) = 2.0 * h * i - 1.0 * h * j + 0.25;
    const AffineInterpolant f(g);
    CHECK(f({0.3, 0.7}) == doctest::Approx(2 * 0.3 - 0.7 + 0.25));
    CHECK(f({1.5, 1.5}) == doctest::Approx(1.5 + 0.25));
    const Vec2 lo = f.gradient_lower(1, 1), hi = f.gradient_upper(1, 1);
    CHECK(lo.x == doctest::Approx(2.0));
    CHECK(lo.y == doctest::Approx(-1.0));
    CHECK(hi.x == doctest::Approx(2.0));
    CHECK(hi.y == doctest::Approx(-1.0));
}

TEST_CASE("affine interpolation is piecewise linear on the two triangles") {
    ScalarGrid g(2, 2, 1.0, std::vector<double>{0.0, 1.0, 2.0, 5.0});
    const AffineInterpolant f(g);
    // lower triangle: 0 + x + 2y
    CHECK(f({0.25, 0.25}) == doctest::Approx(0.75));
    // upper triangle through (1,0)=1, (0,1)=2, (1,1)=5: gradient (3, 4)
    CHECK(f({0.75, 0.75}) == doctest::Approx(5.0 - 3 * 0.25 - 4 * 0.25));
    CHECK(f.gradient_upper(0, 0).x == doctest::Approx(3.0));
    CHECK(f.gradient_upper(0, 0).y == doctest::Approx(4.0));
}

TEST_CASE("pairwise sum matches an exact long double reference") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(100000);
    for (double& x : v) x = u(rng);
    long double ref = 0.0L;
    for (double x : v) ref += x;
    CHECK(std::abs(pairwise_sum(v) - static_cast<double>(ref)) < 1e-12);
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("domain projection and membership") {
    const Domain d = Domain::rectangle({1.0, 2.0}, 3.0, 1.0);
    CHECK(d.contains({1.0, 2.0}));
    CHECK_FALSE(d.contains({0.9, 2.5}));
    const Vec2 p = d.project({5.0, 0.0});
    CHECK(p == Vec2{4.0, 2.0});
    CHECK(d.area() == doctest::Approx(3.0));
    CHECK_THROWS_AS(Domain::rectangle({0, 0}, -1.0, 1.0), ValidationError);
}

TEST_CASE("index set edge cases") {
    // closures of Q(0,0), Q(1,0), Q(0,1) reach x = 1 and y = 1
    const auto half = index_set(Domain::unit_square(), 0.5);
    REQUIRE(half.size() == 1);
    CHECK(half[0] == Index2{0, 0});
    CHECK(index_set(Domain::rectangle({0.0, 0.0}, 0.3, 0.3), 0.5).empty());
    CHECK(index_set(Domain::unit_square(), 1.0).empty());
}

TEST_CASE("derivatives of constant, ramp and product fields") {
    const double h = 0.2;
    ScalarGrid c(5, 5, h, 3.0), ramp(5, 5, h), prod(5, 5, h);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 5; ++i) {
            ramp.at(i, j) = h * i;
            prod.at(i, j) = h * h * i * j;
        }
    for (Derivative d : {Derivative::d1, Derivative::d2, Derivative::d11, Derivative::d12, Derivative::d22}) {
        const ScalarGrid dc = discrete_derivative(c, d);
        for (double v : dc.values()) CHECK(v == 0.0);
    }
    const ScalarGrid r1 = discrete_derivative(ramp, Derivative::d1), r2 = discrete_derivative(ramp, Derivative::d2);
    for (double v : r1.values()) CHECK(v == doctest::Approx(1.0));
    for (double v : r2.values()) CHECK(v == 0.0);
    for (Derivative d : {Derivative::d11, Derivative::d12, Derivative::d22}) {
        const ScalarGrid dr = discrete_derivative(ramp, d);
        for (double v : dr.values()) CHECK(std::abs(v) < 1e-12);
    }
    // d12 agrees with both composition orders
    const ScalarGrid d12 = discrete_derivative(prod, Derivative::d12);
    const ScalarGrid a = discrete_derivative(discrete_derivative(prod, Derivative::d1), Derivative::d2);
    const ScalarGrid b = discrete_derivative(discrete_derivative(prod, Derivative::d2), Derivative::d1);
    REQUIRE(a.size() == d12.size());
    for (std::size_t k = 0; k < d12.size(); ++k) {
        CHECK(d12.values()[k] == doctest::Approx(1.0));
        CHECK(a.values()[k] == doctest::Approx(1.0));
        CHECK(b.values()[k] == doctest::Approx(1.0));
    }
}

TEST_CASE("interpolant hits lattice values and jumps by lambda (1,1) across the diagonal") {
    const double h = 0.25;
    ScalarGrid g(5, 5, h);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 5; ++i) g.at(i, j) = h * h * i * j;
    const AffineInterpolant f(g);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 5; ++i) CHECK(f({h * i, h * j}) == doctest::Approx(g.at(i, j)).epsilon(1e-14));
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 4; ++i) {
            const Vec2 d = f.gradient_upper(i, j) - f.gradient_lower(i, j);
            CHECK(d.x == doctest::Approx(h));
            CHECK(d.y == doctest::Approx(h));
        }
}
