#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chiral/error.hpp"
#include "chiral/optimize.hpp"

using namespace chiral;

namespace {

constexpr double pi = std::numbers::pi;

SpinField random_field(std::size_t nx, std::size_t ny, double h, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-pi, pi);
    SpinField f(nx, ny, h);
    for (double& x : f.angles().values()) x = u(rng);
    return f;
}

Domain chain_domain(std::size_t n, double lambda) {
    return Domain::rectangle({0.0, 0.0}, lambda * static_cast<double>(n - 1), lambda);
}

double wrap(double a) { return std::remainder(a, 2 * pi); }

// Largest relative deviation between the analytic gradient and central differences.
double gradient_error(const SpinField& f, const Domain& d, const ModelParams& p, const BoundaryCondition& bc) {
    const ScalarGrid g = energy_gradient(f, d, p, bc, 2);
    const double h = 1e-6;
    double scale = 0.0, err = 0.0;
    for (double v : g.values()) scale = std::max(scale, std::abs(v));
    SpinField x = f;
    for (std::size_t j = 0; j < f.ny(); ++j) {
        for (std::size_t i = 0; i < f.nx(); ++i) {
            if (bc.frozen(i, j)) {
                err = std::max(err, std::abs(g.at(i, j)));
                continue;
            }
            const double a = f.angle(i, j);
            x.angle(i, j) = a + h;
            const double ep = objective_energy(x, d, p);
            x.angle(i, j) = a - h;
            const double em = objective_energy(x, d, p);
            x.angle(i, j) = a;
            err = std::max(err, std::abs((ep - em) / (2 * h) - g.at(i, j)));
        }
    }
    return err / std::max(scale, 1e-300);
}

}  // namespace

TEST_CASE("analytic gradient matches finite differences") {
    std::mt19937_64 rng(17);
    for (std::size_t n : {6u, 9u, 14u}) {
        for (int k = 0; k < 5; ++k) {
            const ModelParams p = ModelParams::make(0.1, 0.1 + 0.15 * k);
            const SpinField f = random_field(n, n + 1, p.lambda(), rng);
            const Domain d = grid_domain(n, n + 1, p.lambda());
            CHECK(gradient_error(f, d, p, BoundaryCondition::none(n, n + 1, p.lambda())) <= 1e-6);
            CHECK(gradient_error(f, d, p, BoundaryCondition::left_right(n, n + 1, p, {1, 1}, {-1, 1})) <= 1e-6);
        }
    }
    // chains
    const ModelParams p = ModelParams::make(0.2, 0.3);
    const SpinField c = random_field(8, 1, p.lambda(), rng);
    CHECK(gradient_error(c, chain_domain(8, p.lambda()), p, BoundaryCondition::none(8, 1, p.lambda())) <= 1e-6);
}

TEST_CASE("objective agrees with the unit-vector energy") {
    std::mt19937_64 rng(3);
    const ModelParams p = ModelParams::make(0.05, 0.2);
    const SpinField f = random_field(10, 10, p.lambda(), rng);
    const Domain d = grid_domain(10, 10, p.lambda());
    CHECK(objective_energy(f, d, p) == doctest::Approx(energy_H(f, d, p).total).epsilon(1e-12));
    const SpinField c = random_field(9, 1, p.lambda(), rng);
    CHECK(objective_energy(c, chain_domain(9, p.lambda()), p) ==
          doctest::Approx(energy_H_1d(c, 0.0, 8 * p.lambda(), p)).epsilon(1e-12));
}

TEST_CASE("ground states are critical points") {
    for (int w : {1, -1})
        for (int z : {1, -1}) {
            const ModelParams p = ModelParams::make(1.0 / 32, 0.1);
            const SpinField f = helical_ground_state(12, 12, p, w, z, 0.3);
            const ScalarGrid g =
                energy_gradient(f, grid_domain(12, 12, p.lambda()), p, BoundaryCondition::none(12, 12, p.lambda()));
            for (double v : g.values()) CHECK(std::abs(v) <= 1e-10);
        }
}

TEST_CASE("global rotation leaves the energy unchanged") {
    std::mt19937_64 rng(23);
    const ModelParams p = ModelParams::make(0.05, 0.4);
    SpinField f = random_field(11, 7, p.lambda(), rng);
    const Domain d = grid_domain(11, 7, p.lambda());
    const double e = energy_H(f, d, p).total;
    for (double& x : f.angles().values()) x += 2.5;
    CHECK(energy_H(f, d, p).total == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("single-site minimizer continues the helix") {
    const ModelParams p = ModelParams::make(0.1, 0.2);
    SpinField f = helical_ground_state(7, 7, p, -1, 1, 0.5);
    const Domain d = grid_domain(7, 7, p.lambda());
    const double target = f.angle(3, 3);
    f.angle(3, 3) += 1.7;
    const double s = stationary_angle(f, 3, 3, d, p);
    CHECK(std::abs(wrap(s - target)) < 1e-12);
}

TEST_CASE("single-site minimizer beats a dense scan") {
    std::mt19937_64 rng(31);
    const ModelParams p = ModelParams::make(0.1, 0.5);
    for (int k = 0; k < 10; ++k) {
        SpinField f = random_field(6, 6, p.lambda(), rng);
        const Domain d = grid_domain(6, 6, p.lambda());
        const double s = stationary_angle(f, 2, 3, d, p);
        double best = 1e300;
        for (int q = 0; q < 20000; ++q) {
            f.angle(2, 3) = 2 * pi * q / 20000;
            best = std::min(best, objective_energy(f, d, p));
        }
        f.angle(2, 3) = s;
        CHECK(objective_energy(f, d, p) <= best + 1e-14);
    }
}

TEST_CASE("equal chiralities at both ends need no work") {
    const ModelParams p = ModelParams::make(1.0 / 16, 0.2);
    const BoundaryCondition bc = BoundaryCondition::left_right(17, 17, p, {1, -1}, {1, -1});
    const MinimizeResult r = minimize_H(initial_guess(bc), grid_domain(17, 17, p.lambda()), p, bc);
    CHECK(r.reason == StopReason::converged);
    CHECK(r.log.size() <= 2);
    CHECK(std::abs(r.report.total) < 1e-10);
}

TEST_CASE("boundary data") {
    const ModelParams p = ModelParams::make(0.1, 0.2);
    const BoundaryCondition bc = BoundaryCondition::left_right(9, 4, p, {1, 1}, {-1, 1});
    CHECK(bc.free_count() == 5u * 4u);
    CHECK(bc.frozen(1, 2));
    CHECK_FALSE(bc.frozen(2, 2));
    CHECK(bc.frozen(7, 0));
    // both planes meet at the center column
    const double a = p.optimal_angle();
    const double x = 4 * p.lambda(), y = 2 * p.lambda();
    const double left = a * (x + y) / p.lambda();
    const double right = a * (-x + y + bc.planes()->shift) / p.lambda();
    CHECK(left == doctest::Approx(right));
    SpinField wrong(8, 4, p.lambda());
    CHECK_THROWS_AS(bc.apply(wrong), ValidationError);
    CHECK_THROWS_AS(BoundaryCondition::left_right(4, 4, p, {1, 1}, {-1, 1}), ValidationError);
}

TEST_CASE("descent log is monotone") {
    const double eps = 0.1;
    const double lambda = std::pow(std::sqrt(2.0) * eps, 1.5);
    const ModelParams p = ModelParams::make(lambda, std::pow(lambda, 2.0 / 3.0));
    const auto n = static_cast<std::size_t>(std::lround(2.0 / lambda)) + 1;
    const BoundaryCondition bc = BoundaryCondition::left_right(n, 1, p, {1, 1}, {-1, 1});
    const MinimizeResult r = minimize_H(initial_guess(bc), chain_domain(n, lambda), p, bc);
    REQUIRE(r.log.size() > 2);
    for (std::size_t k = 1; k < r.log.size(); ++k) CHECK(r.log[k].energy <= r.log[k - 1].energy + 1e-15);
    CHECK(r.reason == StopReason::converged);
    CHECK_FALSE(r.stalled);
    for (std::size_t i = 0; i < n; ++i)
        if (bc.frozen(i, 0)) CHECK(r.psi.angle(i, 0) == bc.value(i, 0));
    const std::string csv = iteration_log_csv(r.log);
    CHECK(csv.rfind("iter,energy,grad_norm,step\n", 0) == 0);
}

TEST_CASE("one-dimensional wall approaches 8/3") {
    const double eps = 0.05;
    const double lambda = std::pow(std::sqrt(2.0) * eps, 1.5);
    const ModelParams p = ModelParams::make(lambda, std::pow(lambda, 2.0 / 3.0));
    const auto n = static_cast<std::size_t>(std::lround(2.0 / lambda)) + 1;
    const BoundaryCondition bc = BoundaryCondition::left_right(n, 1, p, {1, 1}, {-1, 1});
    const MinimizeResult r = minimize_H(initial_guess(bc), chain_domain(n, lambda), p, bc);
    CHECK(r.reason == StopReason::converged);
    CHECK(std::abs(r.report.total / (8.0 / 3.0) - 1.0) <= 0.03);
}

TEST_CASE("square with opposite corners forms a diagonal wall") {
    const std::size_t n = 65;
    const double lambda = 1.0 / (n - 1);
    const ModelParams p = ModelParams::make(lambda, std::pow(lambda, 2.0 / 3.0));
    const BoundaryCondition bc = BoundaryCondition::left_right(n, n, p, {-1, -1}, {1, 1});
    const MinimizeResult r = minimize_H(initial_guess(bc), grid_domain(n, n, lambda), p, bc);
    CHECK(r.reason == StopReason::converged);
    // wall along the full diagonal of the unit square
    const double target = 8.0 * std::sqrt(2.0) / 3.0 * std::sqrt(2.0);
    CHECK(std::abs(r.report.total / target - 1.0) <= 0.10);
}

TEST_CASE("annealing is reproducible") {
    const ModelParams p = ModelParams::make(0.1, 0.3);
    const BoundaryCondition bc = BoundaryCondition::left_right(10, 8, p, {1, 1}, {-1, 1});
    MinimizeOptions o;
    o.anneal.enabled = true;
    o.anneal.sweeps = 20;
    o.anneal.seed = 99;
    const Domain d = grid_domain(10, 8, p.lambda());
    const MinimizeResult a = minimize_H(initial_guess(bc), d, p, bc, o);
    const MinimizeResult b = minimize_H(initial_guess(bc), d, p, bc, o);
    CHECK(a.psi == b.psi);
    o.threads = 3;
    const MinimizeResult c = minimize_H(initial_guess(bc), d, p, bc, o);
    CHECK(c.psi == a.psi);
}

TEST_CASE("brute force with everything frozen") {
    const ModelParams p = ModelParams::make(0.2, 0.3);
    ScalarGrid v(5, 1, p.lambda(), std::vector<double>{0.1, 0.9, 1.4, 2.8, 3.0});
    const BoundaryCondition bc = BoundaryCondition::custom(v, std::vector<char>(5, 1));
    const BruteForceResult r = brute_force_1d(16, p, bc);
    CHECK(r.evaluations == 1u);
    CHECK(r.best.energy == doctest::Approx(objective_energy(SpinField(v), chain_domain(5, p.lambda()), p)).epsilon(1e-14));
    CHECK(r.slack == 0.0);
}

TEST_CASE("brute force with one free site agrees with the closed form") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-pi, pi);
    const ModelParams p = ModelParams::make(0.15, 0.25);
    for (int k = 0; k < 10; ++k) {
        ScalarGrid v(5, 1, p.lambda());
        for (double& x : v.values()) x = u(rng);
        std::vector<char> mask(5, 1);
        mask[2] = 0;
        const BoundaryCondition bc = BoundaryCondition::custom(v, mask);
        const int m = 256;
        const BruteForceResult r = brute_force_1d(m, p, bc);
        CHECK(r.evaluations == static_cast<std::uint64_t>(m));
        const double s = stationary_angle(SpinField(v), 2, 0, chain_domain(5, p.lambda()), p);
        CHECK(std::abs(wrap(r.best.angles[2] - s)) <= 2 * pi / m);
        SpinField at(v);
        at.angle(2, 0) = s;
        CHECK(objective_energy(at, chain_domain(5, p.lambda()), p) <= r.best.energy + 1e-14);
    }
}

TEST_CASE("brute force limits") {
    const ModelParams p = ModelParams::make(0.2, 0.3);
    CHECK_THROWS_AS(brute_force_1d(64, p, BoundaryCondition::none(8, 1, p.lambda())), ValidationError);
    CHECK_THROWS_AS(brute_force_1d(64, p, BoundaryCondition::none(6, 1, p.lambda()), 10, 1, 1000), ValidationError);
    CHECK_THROWS_AS(brute_force_1d(64, p, BoundaryCondition::none(4, 2, p.lambda())), ValidationError);
}

TEST_CASE("brute force keeps the lowest points in order") {
    const ModelParams p = ModelParams::make(0.2, 0.4);
    const BoundaryCondition bc = BoundaryCondition::left_right(6, 1, p, {1, 1}, {-1, 1});
    const BruteForceResult one = brute_force_1d(32, p, bc, 10, 1);
    const BruteForceResult many = brute_force_1d(32, p, bc, 10, 4);
    REQUIRE(one.top.size() == 10);
    for (std::size_t k = 1; k < one.top.size(); ++k) CHECK(one.top[k - 1].energy <= one.top[k].energy);
    CHECK(one.best.energy == one.top.front().energy);
    CHECK(one.evaluations == 32u * 32u);
    for (std::size_t k = 0; k < one.top.size(); ++k) CHECK(one.top[k].angles == many.top[k].angles);
}
