#pragma once

#include <vector>

#include "chiral/error.hpp"
#include "chiral/lattice.hpp"

namespace chiral {

// Oriented angle from u to v, sign(u x v) * arccos(u . v) with sign(0) = -1.
// The result lies in [-pi, pi); antipodal spins give -pi. Inputs must be unit
// vectors to 1e-12.
double oriented_angle(Vec2 u, Vec2 v);

// Bond angles between neighbouring spins. `hor` is (nx-1) x ny, `ver` is nx x (ny-1).
struct ThetaFields {
    ScalarGrid hor;
    ScalarGrid ver;
};

// Horizontal/vertical chirality order parameters, w = sqrt(2/delta) sin(theta_hor/2)
// and z = sqrt(2/delta) sin(theta_ver/2). Shapes follow ThetaFields.
struct ChiralityPair {
    ScalarGrid w;
    ScalarGrid z;
    double delta = 0.5;

    // Shape of the underlying spin lattice.
    std::size_t nx() const { return z.nx(); }
    std::size_t ny() const { return w.ny(); }
    double spacing() const { return w.spacing(); }
};

struct Transformed {
    ThetaFields theta;
    ChiralityPair pair;
};

ThetaFields bond_angles(const SpinField& u);

// The order-parameter map u -> (w, z), together with the bond angles it used.
Transformed transform(const SpinField& u, const ModelParams& params);

// Inverse of the chirality formula for one bond: 2 arcsin(sqrt(delta/2) s).
double chirality_to_angle(double s, double delta);

// Plaquette sums theta_hor(i,j) + theta_ver(i+1,j) - theta_hor(i,j+1) - theta_ver(i,j),
// snapped to {-2pi, 0, 2pi}. Output is (nx-1) x (ny-1).
ScalarGrid vorticity(const ThetaFields& theta);

// Raised when chirality data cannot come from a single-valued spin lifting.
class ClosureError : public NumericalError {
public:
    ClosureError(const std::string& what, std::vector<Index2> plaquettes)
        : NumericalError(what), plaquettes_(std::move(plaquettes)) {}
    const std::vector<Index2>& plaquettes() const { return plaquettes_; }

private:
    std::vector<Index2> plaquettes_;
};

// Helical ground state psi(i, j) = anchor + arccos(1 - delta) (w i + z j) for
// chiralities w, z in {-1, 1}.
SpinField helical_ground_state(std::size_t nx, std::size_t ny, const ModelParams& params, int w, int z,
                               double anchor = 0.0);

// Integrates the implied bond angles along row 0 and then up each column,
// starting from psi(0,0) = anchor, and checks every plaquette closes to 1e-8.
SpinField reconstruct_spin(const ChiralityPair& pair, const ModelParams& params, double anchor);

}  // namespace chiral
