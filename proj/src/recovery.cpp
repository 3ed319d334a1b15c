#include "chiral/recovery.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "chiral/error.hpp"

namespace chiral {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ValidationError("Gauss-Legendre order must be positive");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int l = 2; l <= n; ++l) {
            const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(k)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - k)] = x;
        weights[static_cast<std::size_t>(k)] = w;
        weights[static_cast<std::size_t>(n - 1 - k)] = w;
    }
    if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

namespace {

// composite Gauss-Legendre on [a, b]
template <class F>
double integrate(F f, double a, double b, int panels, int order) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    const double h = (b - a) / panels;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(panels * order));
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int k = 0; k < order; ++k) terms.push_back(0.5 * h * w[k] * f(mid + 0.5 * h * x[k]));
    }
    return pairwise_sum(terms);
}

}  // namespace

Kernel::Kernel(KernelProfile p, double width) : profile_(p), width_(width) {
    if (!(width > 0.0) || !std::isfinite(width)) throw ValidationError("kernel width must be positive");
    const double r = support();
    norm1d_ = integrate([this](double t) { return profile_value(t); }, -r, r, 64, 16);
}

Kernel Kernel::bump(double width) { return Kernel(KernelProfile::bump, width); }
Kernel Kernel::logistic(double width) { return Kernel(KernelProfile::logistic, width); }

double Kernel::support() const { return profile_ == KernelProfile::bump ? width_ : 4.0 * width_; }

double Kernel::profile_value(double t) const {
    const double r = support();
    const double q = t / r;
    if (std::abs(q) >= 1.0) return 0.0;
    const double cutoff = std::exp(-1.0 / (1.0 - q * q));
    if (profile_ == KernelProfile::bump) return cutoff;
    const double c = 1.0 / std::cosh(t / width_);
    return c * c * std::exp(1.0) * cutoff;
}

double Kernel::operator()(Vec2 z) const {
    return profile_value(z.x) * profile_value(z.y) / (norm1d_ * norm1d_);
}

std::string Kernel::name() const { return profile_ == KernelProfile::bump ? "bump" : "logistic"; }

Kernel parse_kernel(const std::string& name, double width) {
    if (name == "bump") return Kernel::bump(width);
    if (name == "logistic") return Kernel::logistic(width);
    throw ValidationError("unknown kernel '" + name + "'");
}

Kernel recommended_kernel(const MeshPotential& m) {
    double diagonal = 0.0, axis = 0.0;
    for (const JumpSegment& s : jump_set(m)) {
        if (classify_triple(s.plus, s.minus, s.nu) == JumpClass::J3) {
            diagonal += s.length;
        } else {
            axis += s.length;
        }
    }
    return Kernel::logistic(diagonal > axis ? 0.75 : 1.0);
}

ExtendedPotential::ExtendedPotential(const MeshPotential& m, ExtensionMode mode) : eval_(m), mode_(mode) {
    const Domain& d = m.domain;
    if (!d.is_rectangle()) throw ValidationError("extension is implemented for rectangular domains");
    center_ = d.origin() + Vec2{d.width() / 2.0, d.height() / 2.0};
    diam_ = std::hypot(d.width(), d.height());
    if (mode_ != ExtensionMode::ray_continuation) return;
    const double tol = 1e-9 * diam_;
    const Vec2 lo = d.origin();
    const Vec2 hi = lo + Vec2{d.width(), d.height()};
    auto on_boundary = [&](Vec2 p) {
        return std::abs(p.x - lo.x) <= tol || std::abs(p.x - hi.x) <= tol || std::abs(p.y - lo.y) <= tol ||
               std::abs(p.y - hi.y) <= tol;
    };
    for (const JumpSegment& s : jump_set(m)) {
        const Vec2 tau = (1.0 / s.length) * (s.q - s.p);
        const std::pair<Vec2, Vec2> ends[2] = {{s.p, -1.0 * tau}, {s.q, tau}};
        for (const auto& [e, dir] : ends) {
            if (!on_boundary(e) || d.contains(e + 1e-6 * diam_ * dir, 0.0)) continue;
            rays_.push_back({e, dir, s.nu, s.plus, s.minus, eval_(e)});
        }
    }
}

double ExtendedPotential::operator()(Vec2 x) const {
    const Domain& d = eval_.mesh().domain;
    if (d.contains(x, 0.0)) return eval_(x);
    const Vec2 p = d.project(x);
    if (mode_ == ExtensionMode::projection) return eval_(p);

    const Vec2 toward = center_ - p;
    const Vec2 q = p + (1e-9 * diam_ / norm(toward)) * toward;
    const auto t = eval_.locate(q);
    if (!t) throw NumericalError("extension could not locate a boundary triangle");
    Vec2 base = q;
    double base_value = eval_(q);
    Label label = eval_.label(*t);

    const Vec2 dir = x - q;
    std::vector<std::pair<double, std::size_t>> hits;
    for (std::size_t r = 0; r < rays_.size(); ++r) {
        const double den = cross(dir, rays_[r].dir);
        if (den == 0.0) continue;
        const Vec2 rel = rays_[r].origin - q;
        const double s = cross(rel, rays_[r].dir) / den;
        const double along = cross(rel, dir) / den;
        if (s >= 0.0 && s <= 1.0 && along >= -1e-7 * diam_) hits.push_back({s, r});
    }
    std::sort(hits.begin(), hits.end());
    for (const auto& [s, r] : hits) {
        const Ray& ray = rays_[r];
        label = dot(ray.nu, dir) > 0.0 ? ray.plus : ray.minus;
        base = ray.origin;
        base_value = ray.value;
    }
    return base_value + label.w * (x.x - base.x) + label.z * (x.y - base.y);
}

Mollified::Mollified(const ExtendedPotential& ext, const Kernel& kernel, double epsilon, int nodes)
    : ext_(ext), epsilon_(epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    std::vector<double> x, w;
    gauss_legendre(nodes, x, w);
    const double r = kernel.support();
    double total = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        offsets_.push_back(r * x[k]);
        weights_.push_back(r * w[k] * kernel.profile_value(r * x[k]));
        total += weights_.back();
    }
    for (double& v : weights_) v /= total;
}

double Mollified::operator()(Vec2 x) const {
    std::vector<double> terms;
    terms.reserve(offsets_.size() * offsets_.size());
    for (std::size_t b = 0; b < offsets_.size(); ++b) {
        for (std::size_t a = 0; a < offsets_.size(); ++a) {
            const Vec2 y = x + epsilon_ * Vec2{offsets_[a], offsets_[b]};
            terms.push_back(weights_[a] * weights_[b] * ext_(y));
        }
    }
    return pairwise_sum(terms);
}

RecoveryResult build_recovery(const MeshPotential& m, const ModelParams& params, const Kernel& kernel,
                              const RecoveryOptions& opts) {
    const Domain& dom = m.domain;
    if (!dom.is_rectangle()) throw ValidationError("recovery needs a rectangular domain");
    if (dom.origin().x < -1e-12 || dom.origin().y < -1e-12) {
        throw ValidationError("recovery grids are anchored at the origin; the domain must lie in x, y >= 0");
    }
    if (opts.oversample < 1) throw ValidationError("oversample must be at least 1");
    const double lambda = params.lambda();
    const double eps = params.epsilon();
    const auto nx = static_cast<std::size_t>(std::floor((dom.origin().x + dom.width()) / lambda + 1e-9)) + 1;
    const auto ny = static_cast<std::size_t>(std::floor((dom.origin().y + dom.height()) / lambda + 1e-9)) + 1;
    if (nx < 3 || ny < 3) throw ValidationError("lattice spacing too coarse for the domain");

    const ExtendedPotential ext(m, opts.extension);
    const auto ms = static_cast<std::size_t>(opts.oversample);
    const double h = lambda / static_cast<double>(ms);
    const auto M = static_cast<std::size_t>(std::ceil(kernel.support() * eps / h));
    std::vector<double> k(2 * M + 1);
    double ksum = 0.0;
    for (std::size_t c = 0; c < k.size(); ++c) {
        k[c] = kernel.profile_value((static_cast<double>(c) - static_cast<double>(M)) * h / eps);
        ksum += k[c];
    }
    for (double& v : k) v /= ksum;

    const std::size_t fx = ms * (nx - 1) + 2 * M + 1;
    const std::size_t fy = ms * (ny - 1) + 2 * M + 1;
    std::vector<double> fine(fx * fy);
    for (std::size_t b = 0; b < fy; ++b) {
        const double y = (static_cast<double>(b) - static_cast<double>(M)) * h;
        for (std::size_t a = 0; a < fx; ++a) {
            const double x = (static_cast<double>(a) - static_cast<double>(M)) * h;
            fine[b * fx + a] = ext({x, y});
        }
    }
    std::vector<double> rows(fy * nx);
    for (std::size_t b = 0; b < fy; ++b) {
        for (std::size_t i = 0; i < nx; ++i) {
            long double s = 0.0L;
            const double* src = &fine[b * fx + ms * i];
            for (std::size_t c = 0; c < k.size(); ++c) s += k[c] * src[c];
            rows[b * nx + i] = static_cast<double>(s);
        }
    }
    RecoveryResult out;
    out.phi = ScalarGrid(nx, ny, lambda);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            long double s = 0.0L;
            for (std::size_t c = 0; c < k.size(); ++c) s += k[c] * rows[(ms * j + c) * nx + i];
            out.phi.at(i, j) = static_cast<double>(s);
        }
    }

    const double a = params.optimal_angle();
    out.spins = SpinField(nx, ny, lambda);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) out.spins.angle(i, j) = a * out.phi.at(i, j) / lambda;

    Transformed tr = transform(out.spins, params);
    constexpr double pi = std::numbers::pi;
    auto check = [&](std::size_t i, std::size_t j, bool hor, double theta, double next, double here) {
        const double angle = a * (next - here) / lambda;
        if (angle < -pi || angle >= pi) {
            out.overflow.push_back({static_cast<int>(i), static_cast<int>(j), hor, angle});
        } else {
            out.max_identity_error = std::max(out.max_identity_error, std::abs(theta - angle));
        }
    };
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i + 1 < nx; ++i)
            check(i, j, true, tr.theta.hor.at(i, j), out.phi.at(i + 1, j), out.phi.at(i, j));
    for (std::size_t j = 0; j + 1 < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            check(i, j, false, tr.theta.ver.at(i, j), out.phi.at(i, j + 1), out.phi.at(i, j));

    out.theta = std::move(tr.theta);
    out.pair = std::move(tr.pair);
    out.energy = energy_H(out.spins, dom, params);
    return out;
}

SweepSchedule SweepSchedule::from_pairs(std::vector<std::pair<double, double>> lambda_delta) {
    if (lambda_delta.empty()) throw ValidationError("schedule must not be empty");
    SweepSchedule s;
    for (const auto& [l, d] : lambda_delta) {
        ModelParams p = ModelParams::make(l, d);
        if (!s.steps_.empty() && !(p.epsilon() < s.steps_.back().epsilon())) {
            throw ValidationError("schedule epsilons must be strictly decreasing");
        }
        s.steps_.push_back(p);
    }
    return s;
}

SweepSchedule SweepSchedule::from_lattice_counts(const std::vector<int>& counts) {
    std::vector<std::pair<double, double>> steps;
    for (int n : counts) {
        if (n < 2) throw ValidationError("lattice counts must be at least 2");
        const double l = 1.0 / n;
        steps.push_back({l, std::pow(l, 2.0 / 3.0)});
    }
    return from_pairs(std::move(steps));
}

SweepSchedule SweepSchedule::from_epsilons(const std::vector<double>& eps) {
    std::vector<std::pair<double, double>> steps;
    for (double e : eps) {
        if (!(e > 0.0)) throw ValidationError("epsilons must be positive");
        const double l = std::pow(std::sqrt(2.0) * e, 1.5);
        steps.push_back({l, std::pow(l, 2.0 / 3.0)});
    }
    return from_pairs(std::move(steps));
}

double TestBump::value(Vec2 p) const {
    const Vec2 r = p - center;
    const double q = dot(r, r) / (radius * radius);
    return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
}

Vec2 TestBump::gradient(Vec2 p) const {
    const Vec2 r = p - center;
    const double q = dot(r, r) / (radius * radius);
    if (q >= 1.0) return {0.0, 0.0};
    const double f = std::exp(-1.0 / (1.0 - q));
    const double c = -2.0 * f / (radius * radius * (1.0 - q) * (1.0 - q));
    return c * r;
}

TestBump default_test_bump(const Domain& d) {
    // off center: the example geometries are symmetric about the center, which
    // would cancel the pairing exactly
    return {d.origin() + Vec2{0.42 * d.width(), 0.57 * d.height()}, 0.3 * std::min(d.width(), d.height())};
}

double curl_residual(const ChiralityPair& pair, const TestBump& test) {
    const std::size_t nx = pair.nx();
    const std::size_t ny = pair.ny();
    const double lambda = pair.spacing();
    const double xmax = lambda * static_cast<double>(nx - 1);
    const double ymax = lambda * static_cast<double>(ny - 1);
    const double tol = 1e-12 * std::max(xmax, ymax);
    if (!(test.radius > 0.0) || test.center.x - test.radius < -tol || test.center.y - test.radius < -tol ||
        test.center.x + test.radius > xmax + tol || test.center.y + test.radius > ymax + tol) {
        throw ValidationError("test function support leaves the covered rectangle");
    }
    std::vector<double> terms;
    terms.reserve((nx - 1) * (ny - 1));
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const Vec2 c{lambda * (static_cast<double>(i) + 0.5), lambda * (static_cast<double>(j) + 0.5)};
            const Vec2 g = test.gradient(c);
            if (g.x == 0.0 && g.y == 0.0) continue;
            terms.push_back(-pair.w.at(i, j) * g.y + pair.z.at(i, j) * g.x);
        }
    }
    return lambda * lambda * pairwise_sum(terms);
}

std::vector<SweepRow> gamma_sweep(const MeshPotential& m, const SweepSchedule& schedule, const Kernel& kernel,
                                  int threads, const RecoveryOptions& opts) {
    const double limit = limit_energy(m);
    const TestBump bump = default_test_bump(m.domain);
    const auto& steps = schedule.steps();
    std::vector<SweepRow> rows(steps.size());
    auto run_row = [&](std::size_t r) {
        SweepRow& row = rows[r];
        const ModelParams& p = steps[r];
        row.epsilon = p.epsilon();
        row.lambda = p.lambda();
        row.delta = p.delta();
        row.limit = limit;
        try {
            const RecoveryResult rec = build_recovery(m, p, kernel, opts);
            row.energy = rec.energy;
            row.ratio = limit > 0.0 ? rec.energy.total / limit : 0.0;
            row.overflow_count = rec.overflow.size();
            row.curl_residual = curl_residual(rec.pair, bump);
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), steps.size());
    if (workers <= 1) {
        for (std::size_t r = 0; r < steps.size(); ++r) run_row(r);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t r = next++; r < steps.size(); r = next++) run_row(r);
        });
    }
    for (std::thread& t : pool) t.join();
    return rows;
}

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "epsilon,lambda,delta,H_n_total,H_n_hor,H_n_ver,H_limit,ratio,overflow_count,curl_residual,status\n";
    for (const SweepRow& r : rows) {
        out << num(r.epsilon) << ',' << num(r.lambda) << ',' << num(r.delta) << ',';
        if (r.ok) {
            out << num(r.energy.total) << ',' << num(r.energy.horizontal) << ',' << num(r.energy.vertical) << ','
                << num(r.limit) << ',' << num(r.ratio) << ',' << r.overflow_count << ',' << num(r.curl_residual)
                << ",ok\n";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out << ",,," << num(r.limit) << ",,,,failed: " << msg << '\n';
        }
    }
    return out.str();
}

double optimal_profile_1d(double t) { return std::tanh(t); }

ProfileEnergy profile_energy_1d(double a, double b) {
    if (!(b > a)) throw ValidationError("profile interval must be nonempty");
    ProfileEnergy e;
    e.potential = integrate([](double t) { return double_well(std::tanh(t)); }, a, b, 400, 16);
    e.gradient = integrate(
        [](double t) {
            const double c = 1.0 / std::cosh(t);
            return c * c * c * c;
        },
        a, b, 400, 16);
    e.total = e.potential + e.gradient;
    return e;
}

}  // namespace chiral
