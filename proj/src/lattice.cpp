#include "chiral/lattice.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "chiral/error.hpp"

namespace chiral {

namespace {

bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p, double tol) {
    // boundary counts as inside
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 a = poly[k];
        const Vec2 b = poly[(k + 1) % n];
        const Vec2 ab = b - a;
        const double len = norm(ab);
        if (len == 0.0) continue;
        const double t = std::clamp(dot(p - a, ab) / (len * len), 0.0, 1.0);
        if (norm(p - (a + t * ab)) <= tol) return true;
    }
    bool inside = false;
    for (std::size_t k = 0, l = n - 1; k < n; l = k++) {
        const Vec2 a = poly[k];
        const Vec2 b = poly[l];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

Domain Domain::rectangle(Vec2 origin, double width, double height) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
        throw ValidationError("domain width and height must be positive");
    }
    Domain d;
    d.origin_ = origin;
    d.width_ = width;
    d.height_ = height;
    return d;
}

Domain Domain::polygon(std::vector<Vec2> vertices) {
    if (vertices.size() < 3) throw ValidationError("polygon domain needs at least 3 vertices");
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const Vec2& v : vertices) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    Domain d = rectangle({xmin, ymin}, xmax - xmin, ymax - ymin);
    d.polygon_ = std::move(vertices);
    return d;
}

const std::vector<Vec2>& Domain::polygon_vertices() const {
    if (!polygon_) throw ValidationError("domain is a rectangle");
    return *polygon_;
}

double Domain::area() const {
    if (!polygon_) return width_ * height_;
    const auto& p = *polygon_;
    double a = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) a += cross(p[k], p[(k + 1) % p.size()]);
    return std::abs(a) / 2.0;
}

bool Domain::contains(Vec2 p, double tol) const {
    if (polygon_) return point_in_polygon(*polygon_, p, tol);
    return p.x >= origin_.x - tol && p.x <= origin_.x + width_ + tol &&
           p.y >= origin_.y - tol && p.y <= origin_.y + height_ + tol;
}

bool Domain::contains_closed_cell(int i, int j, double lambda) const {
    const double tol = 1e-9 * lambda;
    const Vec2 lo{lambda * i, lambda * j};
    const Vec2 hi{lambda * (i + 1), lambda * (j + 1)};
    if (!polygon_) {
        return lo.x >= origin_.x - tol && hi.x <= origin_.x + width_ + tol &&
               lo.y >= origin_.y - tol && hi.y <= origin_.y + height_ + tol;
    }
    const Vec2 corners[4] = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
    for (const Vec2& c : corners) {
        if (!point_in_polygon(*polygon_, c, tol)) return false;
    }
    // a reflex vertex poking into the cell excludes it
    for (const Vec2& v : *polygon_) {
        if (v.x > lo.x + tol && v.x < hi.x - tol && v.y > lo.y + tol && v.y < hi.y - tol) return false;
    }
    return true;
}

Vec2 Domain::project(Vec2 p) const {
    if (polygon_) throw ValidationError("projection is only implemented for rectangles");
    return {std::clamp(p.x, origin_.x, origin_.x + width_),
            std::clamp(p.y, origin_.y, origin_.y + height_)};
}

ModelParams::ModelParams(double lambda, double delta)
    : lambda_(lambda),
      delta_(delta),
      alpha_(4.0 * (1.0 - delta)),
      epsilon_(lambda / std::sqrt(2.0 * delta)) {}

ModelParams ModelParams::make(double lambda, double delta) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
    return ModelParams(lambda, delta);
}

ScalarGrid::ScalarGrid(std::size_t nx, std::size_t ny, double spacing, double fill)
    : ScalarGrid(nx, ny, spacing, std::vector<double>(nx * ny, fill)) {}

ScalarGrid::ScalarGrid(std::size_t nx, std::size_t ny, double spacing, std::vector<double> values)
    : nx_(nx), ny_(ny), spacing_(spacing), values_(std::move(values)) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ValidationError("grid spacing must be positive");
    if (values_.size() != nx * ny) {
        throw ValidationError("grid holds " + std::to_string(values_.size()) + " values, expected " +
                              std::to_string(nx * ny));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw ValidationError("grid values must be finite");
    }
}

std::vector<Index2> index_set(const Domain& domain, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    const Vec2 o = domain.origin();
    const int i_lo = static_cast<int>(std::floor(o.x / lambda)) - 1;
    const int i_hi = static_cast<int>(std::ceil((o.x + domain.width()) / lambda)) + 1;
    const int j_lo = static_cast<int>(std::floor(o.y / lambda)) - 1;
    const int j_hi = static_cast<int>(std::ceil((o.y + domain.height()) / lambda)) + 1;
    std::vector<Index2> out;
    for (int j = j_lo; j <= j_hi; ++j) {
        for (int i = i_lo; i <= i_hi; ++i) {
            if (domain.contains_closed_cell(i, j, lambda) && domain.contains_closed_cell(i + 1, j, lambda) &&
                domain.contains_closed_cell(i, j + 1, lambda)) {
                out.push_back({i, j});
            }
        }
    }
    return out;
}

std::vector<int> index_set_1d(double a, double b, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    const double tol = 1e-9 * lambda;
    std::vector<int> out;
    const int lo = static_cast<int>(std::floor(a / lambda)) - 1;
    const int hi = static_cast<int>(std::ceil(b / lambda)) + 1;
    for (int i = lo; i <= hi; ++i) {
        if (lambda * i >= a - tol && lambda * (i + 2) <= b + tol) out.push_back(i);
    }
    return out;
}

namespace {

ScalarGrid forward_x(const ScalarGrid& g) {
    if (g.nx() < 2) throw ValidationError("grid too small for d1 stencil");
    ScalarGrid out(g.nx() - 1, g.ny(), g.spacing());
    const double h = g.spacing();
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) out.at(i, j) = (g.at(i + 1, j) - g.at(i, j)) / h;
    return out;
}

ScalarGrid forward_y(const ScalarGrid& g) {
    if (g.ny() < 2) throw ValidationError("grid too small for d2 stencil");
    ScalarGrid out(g.nx(), g.ny() - 1, g.spacing());
    const double h = g.spacing();
    for (std::size_t j = 0; j + 1 < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) out.at(i, j) = (g.at(i, j + 1) - g.at(i, j)) / h;
    return out;
}

}  // namespace

ScalarGrid discrete_derivative(const ScalarGrid& g, Derivative which) {
    switch (which) {
        case Derivative::d1: return forward_x(g);
        case Derivative::d2: return forward_y(g);
        case Derivative::d11:
            if (g.nx() < 3) throw ValidationError("grid too small for d11 stencil");
            return forward_x(forward_x(g));
        case Derivative::d12:
            if (g.nx() < 2 || g.ny() < 2) throw ValidationError("grid too small for d12 stencil");
            return forward_x(forward_y(g));
        case Derivative::d22:
            if (g.ny() < 3) throw ValidationError("grid too small for d22 stencil");
            return forward_y(forward_y(g));
    }
    throw ValidationError("unknown derivative");
}

AffineInterpolant::AffineInterpolant(ScalarGrid g) : grid_(std::move(g)) {
    if (grid_.nx() < 2 || grid_.ny() < 2) throw ValidationError("affine interpolation needs a 2x2 grid");
}

double AffineInterpolant::operator()(Vec2 p) const {
    const double h = grid_.spacing();
    const double xmax = h * static_cast<double>(grid_.nx() - 1);
    const double ymax = h * static_cast<double>(grid_.ny() - 1);
    const double tol = 1e-12 * h;
    if (p.x < -tol || p.y < -tol || p.x > xmax + tol || p.y > ymax + tol) {
        throw ValidationError("evaluation point outside the interpolated rectangle");
    }
    const std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(p.x / h))), grid_.nx() - 2);
    const std::size_t j = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(p.y / h))), grid_.ny() - 2);
    const double sx = p.x - h * static_cast<double>(i);
    const double sy = p.y - h * static_cast<double>(j);
    if (sx + sy <= h) {
        const Vec2 g = gradient_lower(i, j);
        return grid_.at(i, j) + sx * g.x + sy * g.y;
    }
    const Vec2 g = gradient_upper(i, j);
    return grid_.at(i, j + 1) + sx * g.x + (sy - h) * g.y;
}

Vec2 AffineInterpolant::gradient_lower(std::size_t i, std::size_t j) const {
    const double h = grid_.spacing();
    return {(grid_.at(i + 1, j) - grid_.at(i, j)) / h, (grid_.at(i, j + 1) - grid_.at(i, j)) / h};
}

Vec2 AffineInterpolant::gradient_upper(std::size_t i, std::size_t j) const {
    const double h = grid_.spacing();
    return {(grid_.at(i + 1, j + 1) - grid_.at(i, j + 1)) / h, (grid_.at(i + 1, j + 1) - grid_.at(i + 1, j)) / h};
}

namespace {

long double pairwise_rec(std::span<const double> t) {
    if (t.size() <= 8) {
        long double s = 0.0L;
        for (double v : t) s += v;
        return s;
    }
    const std::size_t half = t.size() / 2;
    return pairwise_rec(t.first(half)) + pairwise_rec(t.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> terms) {
    return static_cast<double>(pairwise_rec(terms));
}

}  // namespace chiral
