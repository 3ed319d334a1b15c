#pragma once

#include <cstddef>
#include <vector>

#include "chiral/chirality.hpp"
#include "chiral/lattice.hpp"

namespace chiral {

struct EnergyReport {
    double total = 0.0;
    double horizontal = 0.0;
    double vertical = 0.0;
    // Filled only by mm_decomposition; zero otherwise.
    double potential_part = 0.0;
    double gradient_part = 0.0;
    std::size_t term_count = 0;
    bool decomposed = false;
};

// Domain covered by a grid anchored at the origin: [0, lambda (nx-1)] x [0, lambda (ny-1)].
Domain grid_domain(std::size_t nx, std::size_t ny, double lambda);

// Unrenormalized J1-J3 energy. Bonds are summed when both endpoints are
// lattice sites of the grid lying in the closed domain.
double energy_E(const SpinField& u, const Domain& domain, double alpha);

// H_n = H_hor + H_ver summed over index_set(domain, lambda). The grid must
// contain every site touched by those stencils.
EnergyReport energy_H(const SpinField& u, const Domain& domain, const ModelParams& params);
EnergyReport energy_H(const SpinField& u, const ModelParams& params);

// The same sum with each square expanded into dot products,
// 1 + alpha^2/8 - (alpha/2)(u0.u1 + u1.u2) + u0.u2. Used to cross-check energy_H
// against energy_E-type bond sums.
double energy_H_expanded(const SpinField& u, const Domain& domain, const ModelParams& params);

// One-row chain (ny == 1) on the interval [a, b]; sites sit at lambda * i.
double energy_H_1d(const SpinField& chain, double a, double b, const ModelParams& params);

enum class RhoMethod { definition, closed_form };

// Correcting factor of the Modica-Mortola decomposition. The definition branch
// is evaluated in quad precision when |theta1 - theta2| is small because its
// numerator and denominator both vanish quadratically there.
double rho(double theta1, double theta2, RhoMethod method);

inline double double_well(double s) {
    const double t = 1.0 - s * s;
    return t * t;
}

// (1 - (2/delta) sin^2(arccos(1 - delta) s / 2))^2, bounded above by double_well.
double tilde_W(double s, double delta);

EnergyReport mm_decomposition(const SpinField& u, const Domain& domain, const ModelParams& params);
EnergyReport mm_decomposition(const SpinField& u, const ModelParams& params);

// (1/2 eps) lambda^2 sum [W(g) + W(g shifted)] + eps lambda^2 sum |d_k g|^2, k in {1, 2},
// over all sites where the shifted value exists.
double discrete_mm(const ScalarGrid& g, double epsilon, int direction);

enum class PairStatus { admissible, inadmissible };

struct PairEnergy {
    PairStatus status = PairStatus::admissible;
    EnergyReport report;
    std::vector<Index2> failed_plaquettes;
};

// Energy of a chirality pair through its reconstructed spin field. Pairs
// outside the image of the transform are reported as inadmissible.
PairEnergy energy_H_of_pair(const ChiralityPair& pair, const Domain& domain, const ModelParams& params);

}  // namespace chiral
