#include "chiral/optimize.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "chiral/chirality.hpp"
#include "chiral/error.hpp"

namespace chiral {

namespace {

using Triple = std::array<std::size_t, 3>;

// Accepted steps may raise the energy by at most this much.
constexpr double kEnergyNoise = 1e-15;

struct Stencils {
    std::vector<Triple> hor;
    std::vector<Triple> ver;  // empty for chains
    double c = 0.0;
    double half_alpha = 0.0;
    double two_delta = 0.0;
    bool chain = false;
};

Stencils build_stencils(std::size_t nx, std::size_t ny, const Domain& domain, const ModelParams& params) {
    Stencils s;
    s.half_alpha = params.alpha() / 2.0;
    s.two_delta = 2.0 * params.delta();
    const double d32 = std::pow(params.delta(), 1.5);
    if (ny == 1) {
        s.chain = true;
        s.c = 1.0 / (2.0 * std::sqrt(2.0) * d32);
        const double a = domain.origin().x;
        for (int i : index_set_1d(a, a + domain.width(), params.lambda())) {
            if (i < 0 || static_cast<std::size_t>(i) + 2 >= nx) {
                throw ValidationError("interval needs sites outside the chain");
            }
            const auto k = static_cast<std::size_t>(i);
            s.hor.push_back({k, k + 1, k + 2});
        }
        return s;
    }
    s.c = params.lambda() / (2.0 * std::sqrt(2.0) * d32);
    for (const Index2& k : index_set(domain, params.lambda())) {
        if (k.i < 0 || k.j < 0 || static_cast<std::size_t>(k.i) + 2 >= nx || static_cast<std::size_t>(k.j) + 2 >= ny) {
            throw ValidationError("domain index (" + std::to_string(k.i) + "," + std::to_string(k.j) +
                                  ") needs sites outside the grid");
        }
        const auto i = static_cast<std::size_t>(k.i);
        const auto j = static_cast<std::size_t>(k.j);
        const std::size_t o = j * nx + i;
        s.hor.push_back({o, o + 1, o + 2});
        s.ver.push_back({o, o + nx, o + 2 * nx});
    }
    return s;
}

std::vector<Vec2> units(std::span<const double> angles) {
    std::vector<Vec2> u(angles.size());
    for (std::size_t k = 0; k < angles.size(); ++k) u[k] = {std::cos(angles[k]), std::sin(angles[k])};
    return u;
}

Vec2 residual(const Stencils& s, const std::vector<Vec2>& u, const Triple& t) {
    return u[t[2]] - s.half_alpha * u[t[1]] + u[t[0]];
}

// |u2 - (alpha/2) u1 + u0|^2 in the frame of u1, from a = psi0 - psi1 and
// b = psi2 - psi1. Avoids the cancellation of the O(1) components of the
// residual, whose length is only O(delta).
struct Local {
    double a_part;  // first component 2 delta - 2 sin^2(a/2) - 2 sin^2(b/2)
    double b_part;  // second component sin a + sin b
};

Local local(const Stencils& s, std::span<const double> psi, const Triple& t) {
    const double a = psi[t[0]] - psi[t[1]];
    const double b = psi[t[2]] - psi[t[1]];
    const double sa = std::sin(a / 2.0);
    const double sb = std::sin(b / 2.0);
    return {s.two_delta - 2.0 * sa * sa - 2.0 * sb * sb, std::sin(a) + std::sin(b)};
}

double stencil_energy(const Stencils& s, std::span<const double> psi) {
    std::vector<double> terms(s.hor.size());
    auto fill = [&](const std::vector<Triple>& list) {
        for (std::size_t k = 0; k < list.size(); ++k) {
            const Local l = local(s, psi, list[k]);
            terms[k] = l.a_part * l.a_part + l.b_part * l.b_part;
        }
        return s.c * pairwise_sum(terms);
    };
    const double total = fill(s.hor);
    return s.chain ? total : total + fill(s.ver);
}

void accumulate(const Stencils& s, std::span<const double> psi, const std::vector<Triple>& list, std::size_t lo,
                std::size_t hi, std::vector<double>& g) {
    for (std::size_t k = lo; k < hi; ++k) {
        const Triple& t = list[k];
        const Local l = local(s, psi, t);
        const double a = psi[t[0]] - psi[t[1]];
        const double b = psi[t[2]] - psi[t[1]];
        const double da = 2.0 * s.c * (-l.a_part * std::sin(a) + l.b_part * std::cos(a));
        const double db = 2.0 * s.c * (-l.a_part * std::sin(b) + l.b_part * std::cos(b));
        g[t[0]] += da;
        g[t[1]] -= da + db;
        g[t[2]] += db;
    }
}

std::vector<double> stencil_gradient(const Stencils& s, std::span<const double> psi, int threads) {
    const std::size_t n = psi.size();
    const std::size_t total = s.hor.size() + s.ver.size();
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                                                        std::max<std::size_t>(total / 4096, 1));
    auto run = [&](std::size_t w, std::vector<double>& g) {
        const std::size_t lo = total * w / workers;
        const std::size_t hi = total * (w + 1) / workers;
        const std::size_t nh = s.hor.size();
        if (lo < nh) accumulate(s, psi, s.hor, lo, std::min(hi, nh), g);
        if (hi > nh) accumulate(s, psi, s.ver, std::max(lo, nh) - nh, hi - nh, g);
    };
    if (workers == 1) {
        std::vector<double> g(n, 0.0);
        run(0, g);
        return g;
    }
    std::vector<std::vector<double>> parts(workers, std::vector<double>(n, 0.0));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w, std::ref(parts[w]));
    for (std::thread& t : pool) t.join();
    std::vector<double> g = std::move(parts[0]);
    for (std::size_t w = 1; w < workers; ++w)
        for (std::size_t k = 0; k < n; ++k) g[k] += parts[w][k];
    return g;
}

// Stencils touching each site, with the site's position inside the stencil.
struct Incidence {
    std::vector<std::vector<std::pair<const Triple*, int>>> at;
};

Incidence incidence(const Stencils& s, std::size_t n) {
    Incidence inc;
    inc.at.resize(n);
    for (const auto* list : {&s.hor, &s.ver})
        for (const Triple& t : *list)
            for (int p = 0; p < 3; ++p) inc.at[t[p]].push_back({&t, p});
    return inc;
}

// H_n restricted to the angle at `site` is const + R . u(site).
Vec2 site_field(const Stencils& s, const Incidence& inc, const std::vector<Vec2>& u, std::size_t site) {
    const double coef[3] = {1.0, -s.half_alpha, 1.0};
    Vec2 r{0.0, 0.0};
    for (const auto& [t, p] : inc.at[site]) {
        const Vec2 rest = residual(s, u, *t) - coef[p] * u[site];
        r = r + (2.0 * s.c * coef[p]) * rest;
    }
    return r;
}

void check_shape(const SpinField& psi, const BoundaryCondition& bc) {
    if (psi.nx() != bc.nx() || psi.ny() != bc.ny()) {
        throw ValidationError("boundary condition is " + std::to_string(bc.nx()) + "x" + std::to_string(bc.ny()) +
                              " but the field is " + std::to_string(psi.nx()) + "x" + std::to_string(psi.ny()));
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

BoundaryCondition BoundaryCondition::none(std::size_t nx, std::size_t ny, double spacing) {
    BoundaryCondition bc;
    bc.values_ = ScalarGrid(nx, ny, spacing);
    bc.mask_.assign(nx * ny, 0);
    return bc;
}

BoundaryCondition BoundaryCondition::custom(ScalarGrid values, std::vector<char> mask) {
    if (mask.size() != values.size()) throw ValidationError("mask and values differ in size");
    BoundaryCondition bc;
    bc.values_ = std::move(values);
    bc.mask_ = std::move(mask);
    return bc;
}

BoundaryCondition BoundaryCondition::left_right(std::size_t nx, std::size_t ny, const ModelParams& params,
                                                Label left, Label right, std::size_t depth) {
    if (depth == 0 || nx < 2 * depth + 1) throw ValidationError("grid too narrow for the frozen layers");
    const double lambda = params.lambda();
    const double a = params.optimal_angle();
    const double X = lambda * static_cast<double>(nx - 1);
    const double Y = lambda * static_cast<double>(ny - 1);
    const double shift = (left.w - right.w) * X / 2.0 + (left.z - right.z) * Y / 2.0;
    BoundaryCondition bc = none(nx, ny, lambda);
    bc.planes_ = Planes{left, right, shift, a};
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = lambda * static_cast<double>(j);
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = lambda * static_cast<double>(i);
            if (i < depth) {
                bc.values_.at(i, j) = a * (left.w * x + left.z * y) / lambda;
            } else if (i >= nx - depth) {
                bc.values_.at(i, j) = a * (right.w * x + right.z * y + shift) / lambda;
            } else {
                continue;
            }
            bc.mask_[j * nx + i] = 1;
        }
    }
    return bc;
}

std::size_t BoundaryCondition::free_count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 0));
}

void BoundaryCondition::apply(SpinField& psi) const {
    check_shape(psi, *this);
    for (std::size_t j = 0; j < ny(); ++j)
        for (std::size_t i = 0; i < nx(); ++i)
            if (frozen(i, j)) psi.angle(i, j) = values_.at(i, j);
}

SpinField initial_guess(const BoundaryCondition& bc) {
    SpinField psi(bc.values());
    const std::size_t nx = bc.nx();
    if (const auto& pl = bc.planes()) {
        const double lambda = psi.spacing();
        const double X = lambda * static_cast<double>(nx - 1);
        for (std::size_t j = 0; j < bc.ny(); ++j) {
            const double y = lambda * static_cast<double>(j);
            for (std::size_t i = 0; i < nx; ++i) {
                if (bc.frozen(i, j)) continue;
                const double x = lambda * static_cast<double>(i);
                const double t = x / X;
                const double left = pl->left.w * x + pl->left.z * y;
                const double right = pl->right.w * x + pl->right.z * y + pl->shift;
                psi.angle(i, j) = pl->angle * ((1.0 - t) * left + t * right) / lambda;
            }
        }
        return psi;
    }
    for (std::size_t j = 0; j < bc.ny(); ++j) {
        if (!bc.frozen(0, j) || !bc.frozen(nx - 1, j)) continue;
        std::size_t lo = 0, hi = nx - 1;
        while (lo + 1 < nx && bc.frozen(lo + 1, j)) ++lo;
        while (hi > lo && bc.frozen(hi - 1, j)) --hi;
        if (hi <= lo + 1) continue;
        const double a = psi.angle(lo, j);
        const double b = psi.angle(hi, j);
        for (std::size_t i = lo + 1; i < hi; ++i)
            psi.angle(i, j) = a + (b - a) * static_cast<double>(i - lo) / static_cast<double>(hi - lo);
    }
    return psi;
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::converged: return "converged";
        case StopReason::iteration_cap: return "iteration_cap";
        case StopReason::stalled: return "stalled";
    }
    return "unknown";
}

ScalarGrid energy_gradient(const SpinField& psi, const Domain& domain, const ModelParams& params,
                           const BoundaryCondition& bc, int threads) {
    check_shape(psi, bc);
    const Stencils s = build_stencils(psi.nx(), psi.ny(), domain, params);
    std::vector<double> g = stencil_gradient(s, psi.angles().values(), threads);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (bc.mask()[k]) g[k] = 0.0;
    return ScalarGrid(psi.nx(), psi.ny(), psi.spacing(), std::move(g));
}

double objective_energy(const SpinField& psi, const Domain& domain, const ModelParams& params) {
    const Stencils s = build_stencils(psi.nx(), psi.ny(), domain, params);
    return stencil_energy(s, psi.angles().values());
}

double stationary_angle(const SpinField& psi, std::size_t i, std::size_t j, const Domain& domain,
                        const ModelParams& params) {
    if (i >= psi.nx() || j >= psi.ny()) throw ValidationError("site outside the grid");
    const Stencils s = build_stencils(psi.nx(), psi.ny(), domain, params);
    const Incidence inc = incidence(s, psi.nx() * psi.ny());
    const std::size_t site = j * psi.nx() + i;
    const Vec2 r = site_field(s, inc, units(psi.angles().values()), site);
    const double current = psi.angle(i, j);
    if (r.x == 0.0 && r.y == 0.0) return current;
    const double best = std::atan2(-r.y, -r.x);
    return current + std::remainder(best - current, 2.0 * std::numbers::pi);
}

namespace {

void anneal(SpinField& psi, const Stencils& s, const BoundaryCondition& bc, const AnnealOptions& opt) {
    if (opt.sweeps <= 0 || !(opt.t_start > 0.0) || !(opt.t_end > 0.0) || !(opt.step > 0.0)) {
        throw ValidationError("annealing needs positive sweeps, temperatures and step");
    }
    const std::size_t n = psi.nx() * psi.ny();
    const Incidence inc = incidence(s, n);
    std::vector<double> angles(psi.angles().values().begin(), psi.angles().values().end());
    std::vector<Vec2> u = units(angles);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> move(-opt.step, opt.step);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double ratio = opt.sweeps > 1 ? std::pow(opt.t_end / opt.t_start, 1.0 / (opt.sweeps - 1)) : 1.0;
    double temp = opt.t_start;
    for (int sweep = 0; sweep < opt.sweeps; ++sweep, temp *= ratio) {
        for (std::size_t k = 0; k < n; ++k) {
            if (bc.mask()[k]) continue;
            const double proposal = angles[k] + move(rng);
            const Vec2 nu{std::cos(proposal), std::sin(proposal)};
            const double change = dot(site_field(s, inc, u, k), nu - u[k]);
            if (change <= 0.0 || coin(rng) < std::exp(-change / temp)) {
                angles[k] = proposal;
                u[k] = nu;
            }
        }
    }
    std::copy(angles.begin(), angles.end(), psi.angles().values().begin());
}

}  // namespace

MinimizeResult minimize_H(const SpinField& psi0, const Domain& domain, const ModelParams& params,
                          const BoundaryCondition& bc, const MinimizeOptions& opts) {
    if (!(opts.gradient_tolerance > 0.0) || !(opts.armijo > 0.0 && opts.armijo < 1.0) ||
        !(opts.backtrack > 0.0 && opts.backtrack < 1.0) || opts.max_iterations < 0 || opts.max_backtracks < 1 ||
        opts.memory < 1) {
        throw ValidationError("invalid minimizer options");
    }
    check_shape(psi0, bc);
    const Stencils s = build_stencils(psi0.nx(), psi0.ny(), domain, params);

    MinimizeResult out;
    out.psi = psi0;
    bc.apply(out.psi);
    if (opts.anneal.enabled) anneal(out.psi, s, bc, opts.anneal);

    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < bc.mask().size(); ++k)
        if (!bc.mask()[k]) free.push_back(k);
    std::vector<double> full(out.psi.angles().values().begin(), out.psi.angles().values().end());

    auto energy_at = [&](const std::vector<double>& x) {
        std::vector<double> a = full;
        for (std::size_t k = 0; k < free.size(); ++k) a[free[k]] = x[k];
        return stencil_energy(s, a);
    };
    auto gradient_at = [&](const std::vector<double>& x) {
        std::vector<double> a = full;
        for (std::size_t k = 0; k < free.size(); ++k) a[free[k]] = x[k];
        const std::vector<double> g = stencil_gradient(s, a, opts.threads);
        std::vector<double> gf(free.size());
        for (std::size_t k = 0; k < free.size(); ++k) gf[k] = g[free[k]];
        return gf;
    };

    std::vector<double> x(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) x[k] = full[free[k]];
    double f = energy_at(x);
    std::vector<double> g = gradient_at(x);
    std::deque<std::pair<std::vector<double>, std::vector<double>>> memory;
    double last_step = 0.0;
    bool retry = false;
    out.reason = StopReason::iteration_cap;

    for (int iter = 0;; ++iter) {
        const double gnorm = max_abs(g);
        if (!retry) out.log.push_back({iter, f, gnorm, last_step});
        retry = false;
        if (gnorm <= opts.gradient_tolerance) {
            out.reason = StopReason::converged;
            break;
        }
        if (iter >= opts.max_iterations) break;

        // two-loop recursion
        std::vector<double> d = g;
        std::vector<double> alphas(memory.size());
        for (std::size_t m = memory.size(); m-- > 0;) {
            const auto& [sv, yv] = memory[m];
            double sy = 0.0, sd = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                sy += sv[k] * yv[k];
                sd += sv[k] * d[k];
            }
            alphas[m] = sd / sy;
            for (std::size_t k = 0; k < d.size(); ++k) d[k] -= alphas[m] * yv[k];
        }
        if (!memory.empty()) {
            const auto& [sv, yv] = memory.back();
            double sy = 0.0, yy = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                sy += sv[k] * yv[k];
                yy += yv[k] * yv[k];
            }
            for (double& v : d) v *= sy / yy;
        }
        for (std::size_t m = 0; m < memory.size(); ++m) {
            const auto& [sv, yv] = memory[m];
            double sy = 0.0, yd = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                sy += sv[k] * yv[k];
                yd += yv[k] * d[k];
            }
            const double beta = yd / sy;
            for (std::size_t k = 0; k < d.size(); ++k) d[k] += (alphas[m] - beta) * sv[k];
        }
        for (double& v : d) v = -v;
        double slope = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) slope += g[k] * d[k];
        if (!(slope < 0.0)) {
            memory.clear();
            slope = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                d[k] = -g[k];
                slope -= g[k] * g[k];
            }
        }

        double t = memory.empty() ? std::min(1.0, 0.1 / gnorm) : 1.0;
        bool accepted = false;
        std::vector<double> xn(x.size());
        std::vector<double> gn;
        double fn = f;
        for (int b = 0; b < opts.max_backtracks; ++b, t *= opts.backtrack) {
            for (std::size_t k = 0; k < x.size(); ++k) xn[k] = x[k] + t * d[k];
            fn = energy_at(xn);
            if (fn < f && fn <= f + opts.armijo * t * slope) {
                accepted = true;
                break;
            }
            // Once energy differences drop below roundoff, fall back on the
            // approximate Wolfe test of Hager and Zhang, which uses slopes only.
            if (fn <= f + kEnergyNoise) {
                gn = gradient_at(xn);
                double dn = 0.0;
                for (std::size_t k = 0; k < d.size(); ++k) dn += gn[k] * d[k];
                if (dn >= 0.9 * slope && dn <= -0.8 * slope) {
                    accepted = true;
                    break;
                }
                gn.clear();
            }
        }
        if (!accepted) {
            if (!memory.empty()) {
                // retry the same iterate along steepest descent
                memory.clear();
                retry = true;
                --iter;
                continue;
            }
            out.reason = StopReason::stalled;
            out.stalled = true;
            break;
        }
        if (gn.empty()) gn = gradient_at(xn);
        std::vector<double> sv(x.size()), yv(x.size());
        double sy = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            sv[k] = xn[k] - x[k];
            yv[k] = gn[k] - g[k];
            sy += sv[k] * yv[k];
        }
        if (sy > 0.0) {
            memory.push_back({std::move(sv), std::move(yv)});
            if (memory.size() > static_cast<std::size_t>(opts.memory)) memory.pop_front();
        }
        x = std::move(xn);
        g = std::move(gn);
        f = fn;
        last_step = t;
    }

    for (std::size_t k = 0; k < free.size(); ++k) out.psi.angles().values()[free[k]] = x[k];
    if (s.chain) {
        const double a = domain.origin().x;
        out.report.total = energy_H_1d(out.psi, a, a + domain.width(), params);
        out.report.horizontal = out.report.total;
        out.report.term_count = s.hor.size();
    } else {
        out.report = energy_H(out.psi, domain, params);
    }
    return out;
}

std::string iteration_log_csv(const std::vector<IterationRecord>& log) {
    std::ostringstream out;
    out << "iter,energy,grad_norm,step\n";
    for (const IterationRecord& r : log)
        out << r.iter << ',' << num(r.energy) << ',' << num(r.grad_norm) << ',' << num(r.step) << '\n';
    return out.str();
}

BruteForceResult brute_force_1d(int m, const ModelParams& params, const BoundaryCondition& bc, int keep,
                                int threads, std::uint64_t budget) {
    const std::size_t n = bc.nx();
    if (bc.ny() != 1) throw ValidationError("brute force runs on single-row chains");
    if (n < 3 || n > 7) throw ValidationError("brute force supports 3 to 7 sites");
    if (m < 2) throw ValidationError("angle grid needs at least 2 points");
    if (keep < 1) throw ValidationError("keep must be positive");
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < n; ++k)
        if (!bc.frozen(k, 0)) free.push_back(k);
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < free.size(); ++k) {
        total *= static_cast<std::uint64_t>(m);
        if (total > budget) throw ValidationError("brute force budget exceeded");
    }

    const double lambda = params.lambda();
    const Domain chain_domain = Domain::rectangle({0.0, 0.0}, lambda * static_cast<double>(n - 1), lambda);
    const Stencils s = build_stencils(n, 1, chain_domain, params);
    std::vector<double> grid(static_cast<std::size_t>(m));
    for (int q = 0; q < m; ++q) grid[static_cast<std::size_t>(q)] = 2.0 * std::numbers::pi * q / m;
    std::vector<double> base(n);
    for (std::size_t k = 0; k < n; ++k) base[k] = bc.value(k, 0);

    auto decode = [&](std::uint64_t code, std::vector<double>& a) {
        a = base;
        for (std::size_t k = free.size(); k-- > 0;) {
            a[free[k]] = grid[code % static_cast<std::uint64_t>(m)];
            code /= static_cast<std::uint64_t>(m);
        }
    };
    using Entry = std::pair<double, std::uint64_t>;
    const auto ukeep = static_cast<std::size_t>(keep);
    auto scan = [&](std::uint64_t lo, std::uint64_t hi, std::vector<Entry>& heap) {
        std::vector<double> a;
        for (std::uint64_t code = lo; code < hi; ++code) {
            decode(code, a);
            const Entry e{stencil_energy(s, a), code};
            if (heap.size() < ukeep) {
                heap.push_back(e);
                std::push_heap(heap.begin(), heap.end());
            } else if (e < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = e;
                std::push_heap(heap.begin(), heap.end());
            }
        }
    };

    // split over the outermost free angle
    const std::uint64_t outer = free.empty() ? 1 : static_cast<std::uint64_t>(m);
    const std::uint64_t inner = total / outer;
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, outer);
    std::vector<std::vector<Entry>> heaps(workers);
    auto run = [&](std::size_t w) {
        const std::uint64_t lo = outer * w / workers;
        const std::uint64_t hi = outer * (w + 1) / workers;
        scan(lo * inner, hi * inner, heaps[w]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (std::thread& t : pool) t.join();
    }
    std::vector<Entry> all;
    for (const auto& h : heaps) all.insert(all.end(), h.begin(), h.end());
    std::sort(all.begin(), all.end());
    if (all.size() > ukeep) all.resize(ukeep);

    BruteForceResult out;
    out.evaluations = total;
    for (const Entry& e : all) {
        GridPoint p;
        p.energy = e.first;
        decode(e.second, p.angles);
        out.top.push_back(std::move(p));
    }
    out.best = out.top.front();

    // neighbours of the argmin differing by at most one grid step per free angle
    std::uint64_t combos = 1;
    for (std::size_t k = 0; k < free.size(); ++k) combos *= 3;
    std::vector<double> a;
    for (std::uint64_t c = 0; c < combos; ++c) {
        a = out.best.angles;
        std::uint64_t r = c;
        for (std::size_t k = 0; k < free.size(); ++k, r /= 3) {
            a[free[k]] += (static_cast<double>(r % 3) - 1.0) * 2.0 * std::numbers::pi / m;
        }
        out.slack = std::max(out.slack, stencil_energy(s, a) - out.best.energy);
    }
    return out;
}

}  // namespace chiral
