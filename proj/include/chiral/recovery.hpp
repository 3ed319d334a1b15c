#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chiral/chirality.hpp"
#include "chiral/continuum.hpp"
#include "chiral/energy.hpp"

namespace chiral {

enum class KernelProfile { bump, logistic };

// x-independent product mollifier eta(z) = k(z1) k(z2) / c^2, with k supported
// on [-support(), support()] (in units of epsilon).
//   bump:     k(t) = exp(-1/(1-(t/s)^2)),                       support s
//   logistic: k(t) = sech^2(t/s) exp(1 - 1/(1-(t/4s)^2)),      support 4s
// where s = width. The logistic profile makes the mollified gradient of a
// straight wall close to tanh, the optimal one-dimensional transition.
class Kernel {
public:
    static Kernel bump(double width = 1.0);
    static Kernel logistic(double width = 1.0);

    KernelProfile profile() const { return profile_; }
    double width() const { return width_; }
    double support() const;
    // Unnormalized one-dimensional profile.
    double profile_value(double t) const;
    // Integral of the one-dimensional profile.
    double normalization() const { return norm1d_; }
    // Normalized two-dimensional kernel; integrates to 1.
    double operator()(Vec2 z) const;
    std::string name() const;

private:
    Kernel(KernelProfile p, double width);
    KernelProfile profile_;
    double width_;
    double norm1d_ = 1.0;
};

Kernel parse_kernel(const std::string& name, double width);

// Kernel width suited to the mesh: narrower when diagonal walls dominate.
Kernel recommended_kernel(const MeshPotential& m);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

enum class ExtensionMode {
    // Walls that reach the boundary are continued straight outward; the
    // affine piece on each side is continued with them.
    ray_continuation,
    // phi(x) = phi(nearest point of the closed domain).
    projection,
};

// Extension of a mesh potential to the whole plane.
class ExtendedPotential {
public:
    explicit ExtendedPotential(const MeshPotential& m, ExtensionMode mode = ExtensionMode::ray_continuation);
    double operator()(Vec2 x) const;
    const MeshEvaluator& mesh() const { return eval_; }

private:
    struct Ray {
        Vec2 origin;
        Vec2 dir;
        Vec2 nu;
        Label plus;
        Label minus;
        double value;
    };
    MeshEvaluator eval_;
    ExtensionMode mode_;
    std::vector<Ray> rays_;
    Vec2 center_;
    double diam_;
};

// phi^eps(x) = int eta(z) phibar(x + eps z) dz by a fixed Gauss-Legendre
// product rule on the support square, weights normalized to sum 1.
class Mollified {
public:
    Mollified(const ExtendedPotential& ext, const Kernel& kernel, double epsilon, int nodes = 24);
    double operator()(Vec2 x) const;

private:
    const ExtendedPotential& ext_;
    double epsilon_;
    std::vector<double> offsets_;
    std::vector<double> weights_;
};

struct Bond {
    int i = 0;
    int j = 0;
    bool horizontal = true;
    double angle = 0.0;  // arccos(1-delta) times the discrete derivative
};

struct RecoveryOptions {
    // Fine quadrature points per lattice spacing in the lattice mollification.
    int oversample = 2;
    ExtensionMode extension = ExtensionMode::ray_continuation;
};

struct RecoveryResult {
    ScalarGrid phi;  // phi_n at lattice sites
    SpinField spins;
    ThetaFields theta;
    ChiralityPair pair;
    EnergyReport energy;
    std::vector<Bond> overflow;  // bonds whose angle would leave [-pi, pi)
    double max_identity_error = 0.0;
};

// Discretizes the mollified potential at lattice sites (lambda i, lambda j),
// lifts it to spins psi = arccos(1-delta) phi_n / lambda and evaluates H_n on
// the mesh domain. The domain must lie in the closed positive quadrant. The
// convolution uses a separable trapezoid rule aligned with the lattice.
RecoveryResult build_recovery(const MeshPotential& m, const ModelParams& params, const Kernel& kernel,
                              const RecoveryOptions& opts = {});

class SweepSchedule {
public:
    // lambda = 1/N, delta = lambda^(2/3) for each N.
    static SweepSchedule from_lattice_counts(const std::vector<int>& counts);
    // delta = lambda^(2/3) with lambda chosen so that lambda / sqrt(2 delta) = eps.
    static SweepSchedule from_epsilons(const std::vector<double>& eps);
    static SweepSchedule from_pairs(std::vector<std::pair<double, double>> lambda_delta);
    static SweepSchedule standard() { return from_lattice_counts({16, 32, 64, 128, 256}); }

    const std::vector<ModelParams>& steps() const { return steps_; }

private:
    std::vector<ModelParams> steps_;
};

// Smooth bump exp(-1/(1-r^2/R^2)) used as the test function of curl_residual.
struct TestBump {
    Vec2 center;
    double radius = 0.25;
    double value(Vec2 p) const;
    Vec2 gradient(Vec2 p) const;
};

// Midpoint rule for <curl(w,z), xi> = -int w d2 xi + int z d1 xi with w, z
// constant on lattice cells.
double curl_residual(const ChiralityPair& pair, const TestBump& test);

// Default test bump: centered at (0.42, 0.57) in domain-relative coordinates,
// radius 0.3 min(width, height).
TestBump default_test_bump(const Domain& d);

struct SweepRow {
    double epsilon = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    EnergyReport energy;
    double limit = 0.0;
    double ratio = 0.0;
    std::size_t overflow_count = 0;
    double curl_residual = 0.0;
    bool ok = true;
    std::string error;
};

std::vector<SweepRow> gamma_sweep(const MeshPotential& m, const SweepSchedule& schedule, const Kernel& kernel,
                                  int threads = 1, const RecoveryOptions& opts = {});

std::string sweep_csv(const std::vector<SweepRow>& rows);

double optimal_profile_1d(double t);

struct ProfileEnergy {
    double potential = 0.0;
    double gradient = 0.0;
    double total = 0.0;
};

// int W(tanh) and int |tanh'|^2 over [a, b] by composite Gauss-Legendre.
ProfileEnergy profile_energy_1d(double a = -20.0, double b = 20.0);

}  // namespace chiral
