#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chiral/continuum.hpp"
#include "chiral/energy.hpp"
#include "chiral/lattice.hpp"

namespace chiral {

// Frozen sites with prescribed angles; every other site is free.
class BoundaryCondition {
public:
    // No frozen sites.
    static BoundaryCondition none(std::size_t nx, std::size_t ny, double spacing);
    // Frozen sites where mask is nonzero, taking their angles from `values`.
    static BoundaryCondition custom(ScalarGrid values, std::vector<char> mask);
    // `depth` columns on each side, psi = arccos(1-delta) phi / lambda with phi
    // affine of gradient `left` (resp. `right`). The two planes agree at the
    // center of the grid.
    static BoundaryCondition left_right(std::size_t nx, std::size_t ny, const ModelParams& params, Label left,
                                        Label right, std::size_t depth = 2);

    std::size_t nx() const { return values_.nx(); }
    std::size_t ny() const { return values_.ny(); }
    bool frozen(std::size_t i, std::size_t j) const { return mask_[j * nx() + i] != 0; }
    double value(std::size_t i, std::size_t j) const { return values_.at(i, j); }
    std::size_t free_count() const;
    const ScalarGrid& values() const { return values_; }
    const std::vector<char>& mask() const { return mask_; }

    // Copies the frozen angles into psi; throws on shape mismatch.
    void apply(SpinField& psi) const;

    // Affine boundary liftings of left_right data.
    struct Planes {
        Label left;
        Label right;
        double shift = 0.0;  // phi_right = right . x + shift
        double angle = 0.0;  // arccos(1 - delta)
    };
    const std::optional<Planes>& planes() const { return planes_; }

private:
    ScalarGrid values_;
    std::vector<char> mask_;
    std::optional<Planes> planes_;
};

// Default start. For left_right data, psi blends the two boundary liftings,
// (1 - x/X) psi_left + (x/X) psi_right, so w runs linearly between the two
// sides. Otherwise psi is interpolated linearly along each row between the
// innermost frozen sites; rows without frozen sites at both ends keep
// bc.values().
SpinField initial_guess(const BoundaryCondition& bc);

struct AnnealOptions {
    bool enabled = false;
    int sweeps = 200;
    double t_start = 1.0;
    double t_end = 1e-4;
    double step = 0.5;
    std::uint64_t seed = 1;
};

struct MinimizeOptions {
    int max_iterations = 20000;
    double gradient_tolerance = 1e-8;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
    int memory = 10;
    int threads = 1;
    AnnealOptions anneal;
};

enum class StopReason { converged, iteration_cap, stalled };
const char* to_string(StopReason r);

struct IterationRecord {
    int iter = 0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;
};

struct MinimizeResult {
    SpinField psi;
    EnergyReport report;
    std::vector<IterationRecord> log;
    StopReason reason = StopReason::converged;
    bool stalled = false;
};

// Analytic gradient of H_n with respect to the site angles; zero at frozen
// sites. Chains (ny == 1) use the 1D energy on the x-extent of the domain.
ScalarGrid energy_gradient(const SpinField& psi, const Domain& domain, const ModelParams& params,
                           const BoundaryCondition& bc, int threads = 1);

// The minimized energy: H_n (or the 1D energy for chains) evaluated from angle
// differences, which loses less to cancellation than the unit-vector form used
// by energy_H. The two agree to roundoff.
double objective_energy(const SpinField& psi, const Domain& domain, const ModelParams& params);

// Minimizer of H_n in the angle at (i, j) with every other angle fixed.
double stationary_angle(const SpinField& psi, std::size_t i, std::size_t j, const Domain& domain,
                        const ModelParams& params);

// L-BFGS over the free angles with Armijo backtracking.
MinimizeResult minimize_H(const SpinField& psi0, const Domain& domain, const ModelParams& params,
                          const BoundaryCondition& bc, const MinimizeOptions& opts = {});

std::string iteration_log_csv(const std::vector<IterationRecord>& log);

struct GridPoint {
    double energy = 0.0;
    std::vector<double> angles;  // full chain, frozen sites included
};

struct BruteForceResult {
    GridPoint best;
    std::vector<GridPoint> top;  // lowest grid points, best first
    double slack = 0.0;          // largest energy change to a neighbouring grid point of the argmin
    std::uint64_t evaluations = 0;
};

// Exhaustive minimum of the 1D energy over free angles 2 pi k / m. The chain
// has bc.nx() <= 7 sites and the interval is [0, lambda (nx - 1)].
BruteForceResult brute_force_1d(int m, const ModelParams& params, const BoundaryCondition& bc, int keep = 10,
                                int threads = 1, std::uint64_t budget = 100000000);

}  // namespace chiral
