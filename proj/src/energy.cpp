#include "chiral/energy.hpp"

#include <quadmath.h>

#include <algorithm>
#include <numbers>
#include <string>

#include "chiral/error.hpp"

namespace chiral {

namespace {

struct Units {
    std::size_t nx;
    std::vector<Vec2> v;
    Vec2 at(std::size_t i, std::size_t j) const { return v[j * nx + i]; }
};

Units units_of(const SpinField& u) {
    Units out{u.nx(), std::vector<Vec2>(u.nx() * u.ny())};
    for (std::size_t j = 0; j < u.ny(); ++j)
        for (std::size_t i = 0; i < u.nx(); ++i) out.v[j * u.nx() + i] = u.unit(i, j);
    return out;
}

std::vector<Index2> checked_indices(const SpinField& u, const Domain& domain, double lambda) {
    std::vector<Index2> idx = index_set(domain, lambda);
    for (const Index2& k : idx) {
        if (k.i < 0 || k.j < 0 || static_cast<std::size_t>(k.i) + 2 >= u.nx() ||
            static_cast<std::size_t>(k.j) + 2 >= u.ny()) {
            throw ValidationError("domain index (" + std::to_string(k.i) + "," + std::to_string(k.j) +
                                  ") needs sites outside the " + std::to_string(u.nx()) + "x" +
                                  std::to_string(u.ny()) + " grid");
        }
    }
    return idx;
}

double sq(Vec2 v) { return v.x * v.x + v.y * v.y; }

// lambda/(2 sqrt2 delta^{3/2}) = (1/(sqrt2 lambda delta^{3/2})) (1/2) lambda^2
double h_prefactor(const ModelParams& p) {
    return p.lambda() / (2.0 * std::sqrt(2.0) * std::pow(p.delta(), 1.5));
}

}  // namespace

Domain grid_domain(std::size_t nx, std::size_t ny, double lambda) {
    if (nx < 2 || ny < 2) throw ValidationError("grid must be at least 2x2");
    return Domain::rectangle({0.0, 0.0}, lambda * static_cast<double>(nx - 1), lambda * static_cast<double>(ny - 1));
}

double energy_E(const SpinField& u, const Domain& domain, double alpha) {
    const double lambda = u.spacing();
    const double tol = 1e-9 * lambda;
    const Units un = units_of(u);
    auto inside = [&](std::size_t i, std::size_t j) {
        return domain.contains({lambda * static_cast<double>(i), lambda * static_cast<double>(j)}, tol);
    };
    std::vector<double> terms;
    for (std::size_t j = 0; j < u.ny(); ++j) {
        for (std::size_t i = 0; i < u.nx(); ++i) {
            if (!inside(i, j)) continue;
            const Vec2 a = un.at(i, j);
            if (i + 1 < u.nx() && inside(i + 1, j)) terms.push_back(-alpha * dot(a, un.at(i + 1, j)));
            if (j + 1 < u.ny() && inside(i, j + 1)) terms.push_back(-alpha * dot(a, un.at(i, j + 1)));
            if (i + 2 < u.nx() && inside(i + 2, j)) terms.push_back(dot(a, un.at(i + 2, j)));
            if (j + 2 < u.ny() && inside(i, j + 2)) terms.push_back(dot(a, un.at(i, j + 2)));
        }
    }
    return lambda * lambda * pairwise_sum(terms);
}

EnergyReport energy_H(const SpinField& u, const Domain& domain, const ModelParams& params) {
    const std::vector<Index2> idx = checked_indices(u, domain, params.lambda());
    const Units un = units_of(u);
    const double half_alpha = params.alpha() / 2.0;
    std::vector<double> hor(idx.size()), ver(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto i = static_cast<std::size_t>(idx[k].i);
        const auto j = static_cast<std::size_t>(idx[k].j);
        hor[k] = sq(un.at(i + 2, j) - half_alpha * un.at(i + 1, j) + un.at(i, j));
        ver[k] = sq(un.at(i, j + 2) - half_alpha * un.at(i, j + 1) + un.at(i, j));
    }
    const double c = h_prefactor(params);
    EnergyReport r;
    r.horizontal = c * pairwise_sum(hor);
    r.vertical = c * pairwise_sum(ver);
    r.total = r.horizontal + r.vertical;
    r.term_count = idx.size();
    return r;
}

EnergyReport energy_H(const SpinField& u, const ModelParams& params) {
    return energy_H(u, grid_domain(u.nx(), u.ny(), params.lambda()), params);
}

double energy_H_expanded(const SpinField& u, const Domain& domain, const ModelParams& params) {
    const std::vector<Index2> idx = checked_indices(u, domain, params.lambda());
    const Units un = units_of(u);
    const double a = params.alpha();
    const double constant = 1.0 + a * a / 8.0;
    std::vector<double> terms;
    terms.reserve(6 * idx.size());
    for (const Index2& k : idx) {
        const auto i = static_cast<std::size_t>(k.i);
        const auto j = static_cast<std::size_t>(k.j);
        const Vec2 u0 = un.at(i, j);
        terms.push_back(constant - a / 2.0 * (dot(u0, un.at(i + 1, j)) + dot(un.at(i + 1, j), un.at(i + 2, j))));
        terms.push_back(dot(u0, un.at(i + 2, j)));
        terms.push_back(constant - a / 2.0 * (dot(u0, un.at(i, j + 1)) + dot(un.at(i, j + 1), un.at(i, j + 2))));
        terms.push_back(dot(u0, un.at(i, j + 2)));
    }
    return 2.0 * h_prefactor(params) * pairwise_sum(terms);
}

double energy_H_1d(const SpinField& chain, double a, double b, const ModelParams& params) {
    if (chain.ny() != 1) throw ValidationError("1d energy expects a single-row chain");
    const std::vector<int> idx = index_set_1d(a, b, params.lambda());
    const double half_alpha = params.alpha() / 2.0;
    std::vector<double> terms;
    terms.reserve(idx.size());
    for (int i : idx) {
        if (i < 0 || static_cast<std::size_t>(i) + 2 >= chain.nx()) {
            throw ValidationError("interval needs sites outside the chain");
        }
        const auto k = static_cast<std::size_t>(i);
        terms.push_back(sq(chain.unit(k + 2, 0) - half_alpha * chain.unit(k + 1, 0) + chain.unit(k, 0)));
    }
    const double c = 1.0 / (2.0 * std::sqrt(2.0) * std::pow(params.delta(), 1.5));
    return c * pairwise_sum(terms);
}

namespace {

double rho_definition_quad(double t1, double t2) {
    const __float128 a = t1;
    const __float128 b = t2;
    const __float128 s1 = sinq(a);
    const __float128 s2 = sinq(b);
    const __float128 num = -(1 - cosq(a + b)) + s1 * s1 + s2 * s2;
    const __float128 d = sinq(b / 2) - sinq(a / 2);
    return static_cast<double>(num / (2 * d * d));
}

double rho_definition_long(double t1, double t2) {
    const long double a = t1;
    const long double b = t2;
    const long double s1 = std::sin(a);
    const long double s2 = std::sin(b);
    const long double num = -(1.0L - std::cos(a + b)) + s1 * s1 + s2 * s2;
    const long double d = std::sin(b / 2.0L) - std::sin(a / 2.0L);
    return static_cast<double>(num / (2.0L * d * d));
}

}  // namespace

double rho(double theta1, double theta2, RhoMethod method) {
    constexpr double pi = std::numbers::pi;
    if (!(std::abs(theta1) <= pi) || !(std::abs(theta2) <= pi)) {
        throw ValidationError("rho arguments must lie in [-pi, pi]");
    }
    if (method == RhoMethod::definition) {
        if (theta1 == theta2) return 1.0;
        if (std::abs(theta1 - theta2) < 0.05) return rho_definition_quad(theta1, theta2);
        return rho_definition_long(theta1, theta2);
    }
    if (theta1 == theta2 && std::abs(theta1) == pi) {
        throw ValidationError("closed form of rho is singular at (-pi,-pi) and (pi,pi)");
    }
    const long double s = static_cast<long double>(theta1) + theta2;
    const long double d = static_cast<long double>(theta2) - theta1;
    const long double cq = std::cos(s / 4.0L);
    const long double cd = std::cos(d / 4.0L);
    return static_cast<double>(cd * cd * std::cos(s) / (cq * cq));
}

double tilde_W(double s, double delta) {
    const double sn = std::sin(std::acos(1.0 - delta) * s / 2.0);
    const double t = 1.0 - (2.0 / delta) * sn * sn;
    return t * t;
}

EnergyReport mm_decomposition(const SpinField& u, const Domain& domain, const ModelParams& params) {
    const std::vector<Index2> idx = checked_indices(u, domain, params.lambda());
    const Transformed tr = transform(u, params);
    const ScalarGrid& w = tr.pair.w;
    const ScalarGrid& z = tr.pair.z;
    const ScalarGrid& th = tr.theta.hor;
    const ScalarGrid& tv = tr.theta.ver;
    const double lambda = params.lambda();
    const double eps = params.epsilon();
    auto rho_mm = [](double a, double b) { return a == b ? 1.0 : rho(a, b, RhoMethod::closed_form); };

    std::vector<double> pot_h(idx.size()), pot_v(idx.size()), grad_h(idx.size()), grad_v(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto i = static_cast<std::size_t>(idx[k].i);
        const auto j = static_cast<std::size_t>(idx[k].j);
        pot_h[k] = double_well(w.at(i, j)) + double_well(w.at(i + 1, j));
        pot_v[k] = double_well(z.at(i, j)) + double_well(z.at(i, j + 1));
        const double dw = (w.at(i + 1, j) - w.at(i, j)) / lambda;
        const double dz = (z.at(i, j + 1) - z.at(i, j)) / lambda;
        grad_h[k] = rho_mm(th.at(i, j), th.at(i + 1, j)) * dw * dw;
        grad_v[k] = rho_mm(tv.at(i, j), tv.at(i, j + 1)) * dz * dz;
    }
    const double cp = lambda * lambda / (2.0 * eps);
    const double cg = eps * lambda * lambda;
    const double ph = cp * pairwise_sum(pot_h);
    const double pv = cp * pairwise_sum(pot_v);
    const double gh = cg * pairwise_sum(grad_h);
    const double gv = cg * pairwise_sum(grad_v);

    EnergyReport r;
    r.horizontal = ph + gh;
    r.vertical = pv + gv;
    r.total = r.horizontal + r.vertical;
    r.potential_part = ph + pv;
    r.gradient_part = gh + gv;
    r.term_count = idx.size();
    r.decomposed = true;
    return r;
}

EnergyReport mm_decomposition(const SpinField& u, const ModelParams& params) {
    return mm_decomposition(u, grid_domain(u.nx(), u.ny(), params.lambda()), params);
}

double discrete_mm(const ScalarGrid& g, double epsilon, int direction) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (direction != 1 && direction != 2) throw ValidationError("direction must be 1 or 2");
    const std::size_t di = direction == 1 ? 1 : 0;
    const std::size_t dj = direction == 2 ? 1 : 0;
    if (g.nx() < 1 + di || g.ny() < 1 + dj) throw ValidationError("grid too small for the stencil");
    const double h = g.spacing();
    std::vector<double> pot, grad;
    for (std::size_t j = 0; j + dj < g.ny(); ++j) {
        for (std::size_t i = 0; i + di < g.nx(); ++i) {
            const double a = g.at(i, j);
            const double b = g.at(i + di, j + dj);
            pot.push_back(double_well(a) + double_well(b));
            grad.push_back((b - a) * (b - a) / (h * h));
        }
    }
    return h * h / (2.0 * epsilon) * pairwise_sum(pot) + epsilon * h * h * pairwise_sum(grad);
}

PairEnergy energy_H_of_pair(const ChiralityPair& pair, const Domain& domain, const ModelParams& params) {
    PairEnergy out;
    try {
        const SpinField u = reconstruct_spin(pair, params, 0.0);
        out.report = energy_H(u, domain, params);
    } catch (const ClosureError& e) {
        out.status = PairStatus::inadmissible;
        out.failed_plaquettes = e.plaquettes();
    }
    return out;
}

}  // namespace chiral
