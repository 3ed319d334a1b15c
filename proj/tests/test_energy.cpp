#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chiral/energy.hpp"
#include "chiral/error.hpp"

using namespace chiral;

namespace {

constexpr double pi = std::numbers::pi;

SpinField random_field(std::size_t nx, std::size_t ny, double h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-pi, pi);
    SpinField f(nx, ny, h);
    for (double& x : f.angles().values()) x = u(rng);
    return f;
}

// Direct evaluation with trig on every site, summed in long double.
double naive_H(const SpinField& f, const ModelParams& p) {
    const double ha = p.alpha() / 2.0;
    long double s = 0.0L;
    auto term = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) {
        const double x = std::cos(f.angle(i2, j2)) - ha * std::cos(f.angle(i1, j1)) + std::cos(f.angle(i0, j0));
        const double y = std::sin(f.angle(i2, j2)) - ha * std::sin(f.angle(i1, j1)) + std::sin(f.angle(i0, j0));
        return static_cast<long double>(x * x + y * y);
    };
    for (std::size_t j = 0; j + 2 < f.ny(); ++j)
        for (std::size_t i = 0; i + 2 < f.nx(); ++i)
            s += term(i, j, i + 1, j, i + 2, j) + term(i, j, i, j + 1, i, j + 2);
    return static_cast<double>(s) * p.lambda() / (2.0 * std::sqrt(2.0) * std::pow(p.delta(), 1.5));
}

}  // namespace

TEST_CASE("energy matches a direct trigonometric evaluation") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 10; ++k) {
        const ModelParams p = ModelParams::make(0.05, 0.2 + 0.05 * k);
        const SpinField f = random_field(12, 9, p.lambda(), rng);
        const EnergyReport r = energy_H(f, p);
        CHECK(r.term_count == 10u * 7u);
        CHECK(r.total == doctest::Approx(naive_H(f, p)).epsilon(1e-12));
        CHECK(r.total == doctest::Approx(r.horizontal + r.vertical).epsilon(1e-15));
        CHECK(energy_H_expanded(f, grid_domain(12, 9, p.lambda()), p) == doctest::Approx(r.total).epsilon(1e-9));
    }
}

TEST_CASE("ground states have zero energy") {
    for (double delta : {0.5, 0.1, 0.01}) {
        const ModelParams p = ModelParams::make(1.0 / 64, delta);
        for (int w : {1, -1})
            for (int z : {1, -1}) CHECK(std::abs(energy_H(helical_ground_state(20, 20, p, w, z, 1.0), p).total) < 1e-12);
    }
}

TEST_CASE("a constant field pays 4 delta^2 per stencil") {
    const ModelParams p = ModelParams::make(0.1, 0.3);
    const SpinField f(8, 6, p.lambda(), 0.7);
    const double expected = 2.0 * 6 * 4 * 2.0 * std::sqrt(2.0) * p.lambda() * std::sqrt(p.delta()) / 2.0;
    CHECK(energy_H(f, p).total == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("changing one site only touches neighbouring stencils") {
    std::mt19937_64 rng(4);
    const ModelParams p = ModelParams::make(0.1, 0.25);
    SpinField f = random_field(10, 10, p.lambda(), rng);
    const double before = energy_H(f, p).total;
    f.angle(5, 5) += 0.8;
    const double after = energy_H(f, p).total;
    CHECK(after - before == doctest::Approx(naive_H(f, p) - before).epsilon(1e-10));
    // a site outside every stencil contributes nothing
    f.angle(9, 9) += 1.3;
    CHECK(energy_H(f, p).total == after);
}

TEST_CASE("domain must fit inside the grid") {
    const ModelParams p = ModelParams::make(0.1, 0.25);
    const SpinField f(5, 5, p.lambda(), 0.0);
    CHECK_THROWS_AS(energy_H(f, Domain::unit_square(), p), ValidationError);
}

TEST_CASE("modica-mortola decomposition is exact") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ul(0.005, 0.1), ud(0.01, 0.9);
    for (int k = 0; k < 30; ++k) {
        const ModelParams p = ModelParams::make(ul(rng), ud(rng));
        const SpinField f = random_field(16, 16, p.lambda(), rng);
        const EnergyReport h = energy_H(f, p);
        const EnergyReport m = mm_decomposition(f, p);
        CHECK(m.decomposed);
        CHECK(std::abs(h.total - m.total) <= 1e-9 * (1.0 + h.total));
        CHECK(std::abs(h.horizontal - m.horizontal) <= 1e-9 * (1.0 + h.total));
        CHECK(m.total == doctest::Approx(m.potential_part + m.gradient_part).epsilon(1e-14));
    }
}

TEST_CASE("rho definition and closed form agree") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-pi, pi), small(-1e-6, 1e-6);
    for (int k = 0; k < 20000; ++k) {
        const double a = u(rng);
        const double b = k % 2 ? u(rng) : std::clamp(a + small(rng), -pi, pi);
        const double d = rho(a, b, RhoMethod::definition);
        const double c = rho(a, b, RhoMethod::closed_form);
        CHECK(std::abs(d - c) <= 1e-12 * std::max(1.0, std::abs(c)));
    }
    CHECK(rho(0.3, 0.3, RhoMethod::definition) == 1.0);
    CHECK(rho(-2.0, -2.0, RhoMethod::closed_form) == doctest::Approx(std::cos(-4.0) / std::pow(std::cos(-1.0), 2)));
    CHECK_THROWS_AS(rho(4.0, 0.0, RhoMethod::definition), ValidationError);
    CHECK_THROWS_AS(rho(pi, pi, RhoMethod::closed_form), ValidationError);
}

TEST_CASE("modified double well lies below the quartic well") {
    for (double delta : {0.9, 0.3, 0.01}) {
        for (int k = -100; k <= 100; ++k) {
            const double s = k / 100.0;
            CHECK(tilde_W(s, delta) <= double_well(s) + 1e-15);
        }
        CHECK(tilde_W(1.0, delta) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(tilde_W(0.0, delta) == 1.0);
    }
}

TEST_CASE("discrete modica-mortola of simple profiles") {
    const double h = 0.25;
    ScalarGrid ones(5, 4, h, 1.0);
    CHECK(discrete_mm(ones, 0.1, 1) == 0.0);
    ScalarGrid ramp(5, 4, h);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 5; ++i) ramp.at(i, j) = 1.0;
    ramp.at(2, 0) = 0.0;
    // two horizontal pairs touch (2,0); each has W = 1 and slope 1/h
    const double eps = 0.2;
    CHECK(discrete_mm(ramp, eps, 1) == doctest::Approx(h * h / (2 * eps) * 2 + eps * h * h * 2 / (h * h)));
    // one vertical pair touches (2,0)
    CHECK(discrete_mm(ramp, eps, 2) == doctest::Approx(h * h / (2 * eps) + eps));
    CHECK_THROWS_AS(discrete_mm(ramp, eps, 3), ValidationError);
}

TEST_CASE("energy of a chirality pair") {
    const ModelParams p = ModelParams::make(0.1, 0.2);
    const Transformed t = transform(helical_ground_state(8, 8, p, 1, -1), p);
    const PairEnergy e = energy_H_of_pair(t.pair, grid_domain(8, 8, p.lambda()), p);
    CHECK(e.status == PairStatus::admissible);
    CHECK(std::abs(e.report.total) < 1e-12);
    ChiralityPair broken = t.pair;
    broken.w.at(3, 3) = -broken.w.at(3, 3);
    const PairEnergy b = energy_H_of_pair(broken, grid_domain(8, 8, p.lambda()), p);
    CHECK(b.status == PairStatus::inadmissible);
    CHECK(b.failed_plaquettes.size() == 2);
}

TEST_CASE("unrenormalized energy of a ground state") {
    const ModelParams p = ModelParams::make(0.25, 0.2);
    const SpinField f = helical_ground_state(5, 5, p, 1, 1);
    // 20 nearest and 15 next-nearest bonds in each direction family
    const double c1 = std::cos(p.optimal_angle()), c2 = std::cos(2 * p.optimal_angle());
    const double expected = p.lambda() * p.lambda() * (2 * 20 * -p.alpha() * c1 + 2 * 15 * c2);
    CHECK(energy_E(f, grid_domain(5, 5, p.lambda()), p.alpha()) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rho special values") {
    for (RhoMethod m : {RhoMethod::definition, RhoMethod::closed_form}) {
        CHECK(rho(pi / 2, -pi / 2, m) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(rho(0.0, 0.0, m) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("a three-spin chain has a single summand") {
    const ModelParams p = ModelParams::make(0.1, 0.3);
    SpinField chain(3, 1, p.lambda());
    chain.angle(1, 0) = 0.3;
    chain.angle(2, 0) = 0.7;
    const double ha = p.alpha() / 2.0;
    const double x = std::cos(0.7) - ha * std::cos(0.3) + 1.0, y = std::sin(0.7) - ha * std::sin(0.3);
    const double expected = (x * x + y * y) / (2.0 * std::sqrt(2.0) * std::pow(p.delta(), 1.5));
    CHECK(energy_H_1d(chain, 0.0, 2 * p.lambda(), p) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(energy_H_1d(chain, 0.0, 1.5 * p.lambda(), p) == 0.0);
}

TEST_CASE("alternating antipodal spins without nearest-neighbour coupling") {
    const double h = 0.2;
    SpinField f(5, 5, h);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 5; ++i) f.angle(i, j) = (i + j) % 2 ? pi : 0.0;
    // next-nearest neighbours are parallel: 15 bonds per direction
    CHECK(energy_E(f, grid_domain(5, 5, h), 0.0) == doctest::Approx(h * h * 30.0).epsilon(1e-14));
}

TEST_CASE("decomposition of a constant field is all potential") {
    const ModelParams p = ModelParams::make(0.1, 0.3);
    const SpinField f(7, 6, p.lambda(), 1.1);
    const EnergyReport r = mm_decomposition(f, p);
    CHECK(r.gradient_part == 0.0);
    CHECK(r.potential_part == doctest::Approx(r.total).epsilon(1e-14));
    CHECK(r.total == doctest::Approx(energy_H(f, p).total).epsilon(1e-12));
    // zero field: W(0) = 1 at both ends of each of the 4 x 5 horizontal pairs
    const ScalarGrid zero(5, 5, 0.2);
    CHECK(discrete_mm(zero, 0.1, 1) == doctest::Approx(0.04 / 0.1 * 20).epsilon(1e-14));
}
