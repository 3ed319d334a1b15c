#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace chiral {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Index2 {
    int i = 0;
    int j = 0;
    friend bool operator==(Index2, Index2) = default;
};

// Admissible region. Axis-aligned rectangles are the primary case; a simple
// polygon may be supplied instead, in which case cell inclusion is decided by
// the polygon predicate.
class Domain {
public:
    static Domain rectangle(Vec2 origin, double width, double height);
    static Domain unit_square() { return rectangle({0.0, 0.0}, 1.0, 1.0); }
    static Domain polygon(std::vector<Vec2> vertices);

    Vec2 origin() const { return origin_; }
    double width() const { return width_; }
    double height() const { return height_; }
    double area() const;
    bool is_rectangle() const { return !polygon_.has_value(); }
    const std::vector<Vec2>& polygon_vertices() const;

    // Closed-set membership with an absolute slack `tol`.
    bool contains(Vec2 p, double tol = 1e-12) const;
    // Whether the closed cell [lambda*i, lambda*(i+1)] x [lambda*j, lambda*(j+1)] lies in the domain.
    bool contains_closed_cell(int i, int j, double lambda) const;
    // Nearest point of the closed domain (rectangles only).
    Vec2 project(Vec2 p) const;

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    Vec2 origin_;
    double width_ = 0.0;
    double height_ = 0.0;
    std::optional<std::vector<Vec2>> polygon_;
};

// Lattice spacing and frustration offset, with the derived coupling ratio
// alpha = 4(1 - delta) and transition length epsilon = lambda / sqrt(2 delta).
class ModelParams {
public:
    static ModelParams make(double lambda, double delta);

    double lambda() const { return lambda_; }
    double delta() const { return delta_; }
    double alpha() const { return alpha_; }
    double epsilon() const { return epsilon_; }
    // arccos(1 - delta): rotation between neighbours in a helical ground state.
    double optimal_angle() const { return std::acos(1.0 - delta_); }
    // The regime of interest is epsilon << 1; larger values are allowed but flagged.
    bool in_asymptotic_regime() const { return epsilon_ < 1.0; }

private:
    ModelParams(double lambda, double delta);
    double lambda_;
    double delta_;
    double alpha_;
    double epsilon_;
};

// Real values on lattice sites (i, j), 0 <= i < nx, 0 <= j < ny, stored row-major
// (index j * nx + i). Site (i, j) sits at (spacing * i, spacing * j).
class ScalarGrid {
public:
    ScalarGrid() = default;
    ScalarGrid(std::size_t nx, std::size_t ny, double spacing, double fill = 0.0);
    ScalarGrid(std::size_t nx, std::size_t ny, double spacing, std::vector<double> values);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return values_.size(); }

    double& at(std::size_t i, std::size_t j) { return values_[j * nx_ + i]; }
    double at(std::size_t i, std::size_t j) const { return values_[j * nx_ + i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool same_shape(const ScalarGrid& other) const {
        return nx_ == other.nx_ && ny_ == other.ny_;
    }

    friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;

private:
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    double spacing_ = 1.0;
    std::vector<double> values_;
};

// Unit spins stored as a lifting psi: u = (cos psi, sin psi).
class SpinField {
public:
    SpinField() = default;
    explicit SpinField(ScalarGrid angles) : angles_(std::move(angles)) {}
    SpinField(std::size_t nx, std::size_t ny, double spacing, double fill = 0.0)
        : angles_(nx, ny, spacing, fill) {}

    std::size_t nx() const { return angles_.nx(); }
    std::size_t ny() const { return angles_.ny(); }
    double spacing() const { return angles_.spacing(); }

    double angle(std::size_t i, std::size_t j) const { return angles_.at(i, j); }
    double& angle(std::size_t i, std::size_t j) { return angles_.at(i, j); }
    Vec2 unit(std::size_t i, std::size_t j) const {
        const double a = angles_.at(i, j);
        return {std::cos(a), std::sin(a)};
    }

    const ScalarGrid& angles() const { return angles_; }
    ScalarGrid& angles() { return angles_; }

    friend bool operator==(const SpinField&, const SpinField&) = default;

private:
    ScalarGrid angles_;
};

// (i, j) such that the closed cells Q(i,j), Q(i+1,j), Q(i,j+1) all lie in the
// domain, in row-major order (j outer). Empty when no such triple fits.
std::vector<Index2> index_set(const Domain& domain, double lambda);

// 1D analogue on an interval [a, b]: i with [lambda i, lambda (i+2)] inside.
std::vector<int> index_set_1d(double a, double b, double lambda);

enum class Derivative { d1, d2, d11, d12, d22 };

// Forward differences (g(i+1,j) - g(i,j)) / lambda etc. The output shrinks by
// the stencil extent; no ghost values are introduced.
ScalarGrid discrete_derivative(const ScalarGrid& g, Derivative which);

// Continuous piecewise-affine interpolation on the triangles
//   T-(i,j) = conv{(i,j), (i+1,j), (i,j+1)},  T+(i,j) = conv{(i+1,j), (i,j+1), (i+1,j+1)}.
class AffineInterpolant {
public:
    explicit AffineInterpolant(ScalarGrid g);

    double operator()(Vec2 p) const;
    // Gradient on T-(i,j): (d1 g(i,j), d2 g(i,j)).
    Vec2 gradient_lower(std::size_t i, std::size_t j) const;
    // Gradient on T+(i,j): (d1 g(i,j+1), d2 g(i+1,j)).
    Vec2 gradient_upper(std::size_t i, std::size_t j) const;
    std::size_t cells_x() const { return grid_.nx() - 1; }
    std::size_t cells_y() const { return grid_.ny() - 1; }

private:
    ScalarGrid grid_;
};

// Fixed-order pairwise summation with extended-precision partial sums.
double pairwise_sum(std::span<const double> terms);

}  // namespace chiral
