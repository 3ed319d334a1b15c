#include "chiral/chirality.hpp"

#include <algorithm>
#include <numbers>
#include <string>

namespace chiral {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kClosureTol = 1e-8;
constexpr double kSnapTol = 1e-6;
}  // namespace

double oriented_angle(Vec2 u, Vec2 v) {
    if (std::abs(norm(u) - 1.0) > 1e-12 || std::abs(norm(v) - 1.0) > 1e-12) {
        throw ValidationError("oriented_angle expects unit vectors");
    }
    const double c = cross(u, v);
    const double d = dot(u, v);
    if (c == 0.0) return d < 0.0 ? -kPi : 0.0;
    const double a = std::atan2(c, d);
    return a >= kPi ? -kPi : a;
}

ThetaFields bond_angles(const SpinField& u) {
    if (u.nx() < 2 || u.ny() < 2) throw ValidationError("spin field must be at least 2x2");
    const double h = u.spacing();
    ThetaFields t{ScalarGrid(u.nx() - 1, u.ny(), h), ScalarGrid(u.nx(), u.ny() - 1, h)};
    for (std::size_t j = 0; j < u.ny(); ++j)
        for (std::size_t i = 0; i + 1 < u.nx(); ++i) t.hor.at(i, j) = oriented_angle(u.unit(i, j), u.unit(i + 1, j));
    for (std::size_t j = 0; j + 1 < u.ny(); ++j)
        for (std::size_t i = 0; i < u.nx(); ++i) t.ver.at(i, j) = oriented_angle(u.unit(i, j), u.unit(i, j + 1));
    return t;
}

Transformed transform(const SpinField& u, const ModelParams& params) {
    ThetaFields theta = bond_angles(u);
    const double scale = std::sqrt(2.0 / params.delta());
    ScalarGrid w = theta.hor;
    ScalarGrid z = theta.ver;
    for (double& v : w.values()) v = scale * std::sin(0.5 * v);
    for (double& v : z.values()) v = scale * std::sin(0.5 * v);
    return {std::move(theta), ChiralityPair{std::move(w), std::move(z), params.delta()}};
}

double chirality_to_angle(double s, double delta) {
    const double arg = std::sqrt(delta / 2.0) * s;
    if (std::abs(arg) > 1.0 + 1e-12) throw ValidationError("chirality value exceeds sqrt(2/delta)");
    return 2.0 * std::asin(std::clamp(arg, -1.0, 1.0));
}

ScalarGrid vorticity(const ThetaFields& theta) {
    const std::size_t nx = theta.ver.nx();
    const std::size_t ny = theta.hor.ny();
    if (theta.hor.nx() + 1 != nx || theta.ver.ny() + 1 != ny || nx < 2 || ny < 2) {
        throw ValidationError("theta fields have inconsistent shapes");
    }
    ScalarGrid v(nx - 1, ny - 1, theta.hor.spacing());
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double s = theta.hor.at(i, j) + theta.ver.at(i + 1, j) - theta.hor.at(i, j + 1) - theta.ver.at(i, j);
            const double k = std::round(s / (2.0 * kPi));
            if (std::abs(k) > 1.0 || std::abs(s - 2.0 * kPi * k) > kSnapTol) {
                throw ClosureError("plaquette sum " + std::to_string(s) + " at (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") is not in {-2pi, 0, 2pi}",
                                   {{static_cast<int>(i), static_cast<int>(j)}});
            }
            v.at(i, j) = 2.0 * kPi * k;
        }
    }
    return v;
}

SpinField reconstruct_spin(const ChiralityPair& pair, const ModelParams& params, double anchor) {
    const std::size_t nx = pair.nx();
    const std::size_t ny = pair.ny();
    if (pair.w.nx() + 1 != nx || pair.z.ny() + 1 != ny || nx < 2 || ny < 2) {
        throw ValidationError("chirality pair has inconsistent shapes");
    }
    const double delta = params.delta();
    ScalarGrid th = pair.w;
    ScalarGrid tv = pair.z;
    for (double& v : th.values()) v = chirality_to_angle(v, delta);
    for (double& v : tv.values()) v = chirality_to_angle(v, delta);

    std::vector<Index2> bad;
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const double s = th.at(i, j) + tv.at(i + 1, j) - th.at(i, j + 1) - tv.at(i, j);
            if (std::abs(s) > kClosureTol) bad.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
    }
    if (!bad.empty()) {
        throw ClosureError(std::to_string(bad.size()) + " plaquette(s) fail to close", std::move(bad));
    }

    SpinField u(nx, ny, pair.spacing());
    u.angle(0, 0) = anchor;
    for (std::size_t i = 1; i < nx; ++i) u.angle(i, 0) = u.angle(i - 1, 0) + th.at(i - 1, 0);
    for (std::size_t j = 1; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) u.angle(i, j) = u.angle(i, j - 1) + tv.at(i, j - 1);
    return u;
}

SpinField helical_ground_state(std::size_t nx, std::size_t ny, const ModelParams& params, int w, int z,
                               double anchor) {
    if ((w != 1 && w != -1) || (z != 1 && z != -1)) throw ValidationError("chiralities must be +1 or -1");
    if (nx == 0 || ny == 0) throw ValidationError("grid must be nonempty");
    const double a = params.optimal_angle();
    SpinField u(nx, ny, params.lambda());
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            u.angle(i, j) = anchor + a * (w * static_cast<double>(i) + z * static_cast<double>(j));
    return u;
}

}  // namespace chiral
