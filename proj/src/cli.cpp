#include "chiral/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "chiral/error.hpp"
#include "chiral/svg.hpp"

namespace chiral {

namespace {

template <class C, class F>
void each_field(C& c, F&& f) {
    f("command", c.command);
    f("input", c.input);
    f("mesh", c.mesh);
    f("example", c.example);
    f("walls", c.walls);
    f("x0", c.x0);
    f("y0", c.y0);
    f("width", c.width);
    f("height", c.height);
    f("out", c.out);
    f("format", c.format);
    f("deterministic", c.deterministic);
    f("threads", c.threads);
    f("error_json", c.error_json);
    f("lambda", c.lambda);
    f("delta", c.delta);
    f("n", c.n);
    f("nx", c.nx);
    f("ny", c.ny);
    f("pair", c.pair);
    f("left", c.left);
    f("right", c.right);
    f("anchor", c.anchor);
    f("schedule", c.schedule);
    f("epsilons", c.epsilons);
    f("kernel", c.kernel);
    f("kernel_width", c.kernel_width);
    f("oversample", c.oversample);
    f("extension", c.extension);
    f("max_iter", c.max_iter);
    f("gtol", c.gtol);
    f("anneal", c.anneal);
    f("seed", c.seed);
    f("length", c.length);
    f("a", c.a);
    f("b", c.b);
}

template <class T>
json encode(const T& v) {
    return v;
}

template <class T>
json encode(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

void decode(const json& j, const std::string& key, std::string& v) {
    if (!j.is_string()) throw ValidationError("config key '" + key + "' must be a string");
    v = j.get<std::string>();
}

void decode(const json& j, const std::string& key, bool& v) {
    if (!j.is_boolean()) throw ValidationError("config key '" + key + "' must be a boolean");
    v = j.get<bool>();
}

void decode(const json& j, const std::string& key, int& v) {
    if (!j.is_number_integer()) throw ValidationError("config key '" + key + "' must be an integer");
    v = j.get<int>();
}

void decode(const json& j, const std::string& key, std::uint64_t& v) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw ValidationError("config key '" + key + "' must be a nonnegative integer");
    }
    v = j.get<std::uint64_t>();
}

void decode(const json& j, const std::string& key, double& v) {
    if (!j.is_number()) throw ValidationError("config key '" + key + "' must be a number");
    v = j.get<double>();
}

template <class T>
void decode(const json& j, const std::string& key, std::optional<T>& v) {
    if (j.is_null()) {
        v.reset();
        return;
    }
    T x{};
    decode(j, key, x);
    v = x;
}

// Flag text to a typed value.
void assign(std::string& v, const std::string&, const std::string& s) { v = s; }

void assign(bool& v, const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "on") {
        v = true;
    } else if (s == "false" || s == "0" || s == "off") {
        v = false;
    } else {
        throw ValidationError("--" + key + " expects true or false");
    }
}

template <class T>
void assign_number(T& v, const std::string& key, const std::string& s) {
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ValidationError("--" + key + " expects a number, got '" + s + "'");
}

void assign(int& v, const std::string& key, const std::string& s) { assign_number(v, key, s); }
void assign(std::uint64_t& v, const std::string& key, const std::string& s) { assign_number(v, key, s); }
void assign(double& v, const std::string& key, const std::string& s) { assign_number(v, key, s); }

template <class T>
void assign(std::optional<T>& v, const std::string& key, const std::string& s) {
    if (s.empty() || s == "null") {
        v.reset();
        return;
    }
    T x{};
    assign(x, key, s);
    v = x;
}

Label parse_label(const std::string& s) {
    auto sign = [&](char c) {
        if (c == '+') return 1;
        if (c == '-') return -1;
        throw ValidationError("chirality pair must be two of '+' / '-', got '" + s + "'");
    };
    if (s.size() != 2) throw ValidationError("chirality pair must be two of '+' / '-', got '" + s + "'");
    return {sign(s[0]), sign(s[1])};
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string number_text(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Context {
    const RunConfig& cfg;
    RunOutcome& outcome;

    std::filesystem::path artifact(const std::string& name) {
        std::filesystem::create_directories(cfg.out);
        const std::filesystem::path p = std::filesystem::path(cfg.out) / name;
        outcome.artifacts.push_back(p.string());
        return p;
    }
    void write(const std::string& name, const std::string& text) { write_text_file(artifact(name).string(), text); }
};

ModelParams params_or(const RunConfig& c, double lambda, std::optional<double> delta = std::nullopt) {
    const double l = c.lambda.value_or(lambda);
    const double d = c.delta ? *c.delta : delta ? *delta : std::pow(l, 2.0 / 3.0);
    return ModelParams::make(l, d);
}

MeshPotential load_mesh(const RunConfig& c) {
    if (!c.mesh.empty()) return mesh_from_json(read_json_file(c.mesh));
    return build_example(parse_example_kind(c.example), Domain::rectangle({c.x0, c.y0}, c.width, c.height), c.walls);
}

Kernel kernel_for(const RunConfig& c, const MeshPotential& m) {
    if (c.kernel == "auto") return c.kernel_width ? Kernel::logistic(*c.kernel_width) : recommended_kernel(m);
    return parse_kernel(c.kernel, c.kernel_width.value_or(1.0));
}

RecoveryOptions recovery_options(const RunConfig& c) {
    RecoveryOptions o;
    o.oversample = c.oversample;
    if (c.extension == "ray") {
        o.extension = ExtensionMode::ray_continuation;
    } else if (c.extension == "projection") {
        o.extension = ExtensionMode::projection;
    } else {
        throw ValidationError("extension must be 'ray' or 'projection'");
    }
    return o;
}

json kernel_json(const Kernel& k) { return {{"name", k.name()}, {"width", k.width()}}; }

// Spin field from `input`, with parameters from the file's "params" entry
// unless given on the command line.
std::pair<SpinField, ModelParams> load_spins(const RunConfig& c) {
    if (c.input.empty()) throw ValidationError("--input is required");
    const json j = read_json_file(c.input);
    SpinField u = spins_from_json(j);
    std::optional<double> lambda = c.lambda, delta = c.delta;
    if (j.contains("params")) {
        const ModelParams p = params_from_json(j["params"]);
        if (!lambda) lambda = p.lambda();
        if (!delta) delta = p.delta();
    }
    if (!lambda) lambda = u.spacing();
    if (!delta) throw ValidationError("--delta is required");
    if (std::abs(*lambda - u.spacing()) > 1e-12 * *lambda) {
        throw ValidationError("lambda differs from the spacing stored in the spin field");
    }
    return {std::move(u), ModelParams::make(*lambda, *delta)};
}

json cmd_groundstate(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Label l = parse_label(c.pair);
    const int nx = c.nx.value_or(c.n), ny = c.ny.value_or(c.n);
    if (nx < 3 || ny < 3) throw ValidationError("ground states need at least 3x3 sites");
    const ModelParams p = params_or(c, 0.01, 0.1);
    const SpinField u = helical_ground_state(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny), p, l.w, l.z,
                                             c.anchor);
    json field = to_json(u);
    field["params"] = to_json(p);
    ctx.write("groundstate.json", dump(field));
    if (c.format == "svg") ctx.write("groundstate.svg", grid_svg(u.angles(), "spin angles"));
    return {{"nx", nx}, {"ny", ny}, {"pair", c.pair}, {"params", to_json(p)}, {"energy", energy_H(u, p).total}};
}

json cmd_energy(Context& ctx) {
    const auto [u, p] = load_spins(ctx.cfg);
    const Domain d = grid_domain(u.nx(), u.ny(), p.lambda());
    json r = {{"params", to_json(p)},
              {"report", to_json(energy_H(u, d, p))},
              {"decomposition", to_json(mm_decomposition(u, d, p))},
              {"expanded", energy_H_expanded(u, d, p)},
              {"energy_E", energy_E(u, d, p.alpha())}};
    ctx.write("energy.json", dump(r));
    return r;
}

json cmd_transform(Context& ctx) {
    const auto [u, p] = load_spins(ctx.cfg);
    const Transformed tr = transform(u, p);
    const ScalarGrid v = vorticity(tr.theta);
    std::size_t defects = 0;
    for (double x : v.values()) defects += x != 0.0;
    json art = {{"pair", to_json(tr.pair)}, {"vorticity", to_json(v)}, {"defects", defects}};
    ctx.write("transform.json", dump(art));
    if (ctx.cfg.format == "svg") ctx.write("transform.svg", grid_svg(v, "vorticity"));
    return {{"params", to_json(p)}, {"nx", u.nx()}, {"ny", u.ny()}, {"defects", defects}};
}

json cmd_classify(Context& ctx) {
    const MeshPotential m = load_mesh(ctx.cfg);
    const MeshValidation val = validate_mesh(m);
    if (!val.valid) throw ValidationError(val.message);
    json segments = json::array();
    std::map<std::string, int> classes;
    for (const JumpSegment& s : jump_set(m)) {
        segments.push_back(to_json(s));
        ++classes[to_string(classify_triple(s.plus, s.minus, s.nu))];
    }
    const TotalVariations tv = total_variations(m);
    json r = {{"triangles", m.triangles.size()},
              {"segments", segments},
              {"classes", classes},
              {"total_variations", to_json(tv)},
              {"limit_energy", limit_energy(m)},
              {"limit_energy_by_sigma", limit_energy_by_sigma(m)},
              {"bootstrap", {{"d2w_le_d2z", tv.d2w <= tv.d2z + 1e-12}, {"d1z_le_d1w", tv.d1z <= tv.d1w + 1e-12}}}};
    ctx.write("classify.json", dump(r));
    if (ctx.cfg.format == "svg") ctx.write("classify.svg", mesh_svg(m));
    return r;
}

json cmd_recover(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const MeshPotential m = load_mesh(c);
    const ModelParams p = params_or(c, 1.0 / 64.0);
    const Kernel k = kernel_for(c, m);
    const RecoveryResult rec = build_recovery(m, p, k, recovery_options(c));
    const double limit = limit_energy(m);
    json r = {{"params", to_json(p)},
              {"kernel", kernel_json(k)},
              {"energy", to_json(rec.energy)},
              {"limit", limit},
              {"ratio", limit > 0.0 ? rec.energy.total / limit : 0.0},
              {"overflow_count", rec.overflow.size()},
              {"max_identity_error", rec.max_identity_error},
              {"curl_residual", curl_residual(rec.pair, default_test_bump(m.domain))}};
    json art = r;
    art["spins"] = to_json(rec.spins);
    art["pair"] = to_json(rec.pair);
    ctx.write("recover.json", dump(art));
    if (c.format == "svg") ctx.write("recover.svg", grid_svg(rec.pair.w, "w"));
    if (!rec.overflow.empty()) {
        ctx.outcome.status = 2;
        r["error"] = {{"kind", "numerical"}, {"message", "bond angles overflowed [-pi, pi)"}};
    }
    return r;
}

SweepSchedule schedule_for(const RunConfig& c) {
    if (!c.epsilons.empty()) {
        std::vector<double> eps;
        for (const std::string& s : split(c.epsilons)) {
            double v = 0.0;
            assign(v, "epsilons", s);
            eps.push_back(v);
        }
        return SweepSchedule::from_epsilons(eps);
    }
    if (c.schedule == "default") return SweepSchedule::standard();
    std::vector<int> counts;
    for (const std::string& s : split(c.schedule)) {
        int v = 0;
        assign(v, "schedule", s);
        counts.push_back(v);
    }
    if (counts.empty()) throw ValidationError("empty schedule");
    return SweepSchedule::from_lattice_counts(counts);
}

json cmd_sweep(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const MeshPotential m = load_mesh(c);
    const Kernel k = kernel_for(c, m);
    const std::vector<SweepRow> rows = gamma_sweep(m, schedule_for(c), k, c.threads, recovery_options(c));
    ctx.write("sweep.csv", sweep_csv(rows));
    json table = json::array();
    bool failed = false;
    for (const SweepRow& r : rows) {
        table.push_back(to_json(r));
        failed = failed || !r.ok || r.overflow_count > 0;
    }
    json r = {{"kernel", kernel_json(k)}, {"rows", table}, {"last_ratio", rows.back().ratio}};
    if (c.format == "json") ctx.write("sweep.json", dump(r));
    if (failed) {
        ctx.outcome.status = 2;
        r["error"] = {{"kind", "numerical"}, {"message", "a sweep step failed or overflowed"}};
    }
    return r;
}

json cmd_minimize(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const Label left = parse_label(c.left), right = parse_label(c.right);
    const int ny = c.ny.value_or(c.n);
    if (ny < 1) throw ValidationError("ny must be positive");
    std::size_t nx = 0;
    ModelParams p = ModelParams::make(1.0, 0.5);
    Domain d = Domain::unit_square();
    if (ny == 1) {
        if (!(c.length > 0.0)) throw ValidationError("chain length must be positive");
        p = params_or(c, c.length / (c.nx.value_or(c.n) - 1));
        nx = static_cast<std::size_t>(std::floor(c.length / p.lambda() + 1e-9)) + 1;
        d = Domain::rectangle({0.0, 0.0}, p.lambda() * static_cast<double>(nx - 1), p.lambda());
    } else {
        nx = static_cast<std::size_t>(c.nx.value_or(c.n));
        if (nx < 5 || ny < 3) throw ValidationError("grid too small");
        p = params_or(c, 1.0 / static_cast<double>(nx - 1));
        d = grid_domain(nx, static_cast<std::size_t>(ny), p.lambda());
    }
    const BoundaryCondition bc = BoundaryCondition::left_right(nx, static_cast<std::size_t>(ny), p, left, right);
    SpinField psi0 = c.input.empty() ? initial_guess(bc) : spins_from_json(read_json_file(c.input));
    MinimizeOptions opts;
    opts.max_iterations = c.max_iter;
    opts.gradient_tolerance = c.gtol;
    opts.threads = c.threads;
    opts.anneal.enabled = c.anneal;
    opts.anneal.seed = c.deterministic ? c.seed : std::random_device{}();
    const MinimizeResult res = minimize_H(psi0, d, p, bc, opts);
    json r = {{"params", to_json(p)},
              {"nx", nx},
              {"ny", ny},
              {"report", to_json(res.report)},
              {"reason", to_string(res.reason)},
              {"iterations", res.log.back().iter},
              {"grad_norm", res.log.back().grad_norm}};
    json art = r;
    art["spins"] = to_json(res.psi);
    art["spins"]["params"] = to_json(p);
    ctx.write("minimize.json", dump(art));
    ctx.write("minimize_log.csv", iteration_log_csv(res.log));
    if (res.stalled) {
        ctx.outcome.status = 2;
        r["error"] = {{"kind", "numerical"}, {"message", "line search stalled"}};
    }
    return r;
}

json cmd_profile1d(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const ProfileEnergy e = profile_energy_1d(c.a, c.b);
    const double target = 8.0 / 3.0;
    json r = {{"a", c.a},
              {"b", c.b},
              {"potential", e.potential},
              {"gradient", e.gradient},
              {"total", e.total},
              {"target", target},
              {"relative_error", std::abs(e.total - target) / target}};
    ctx.write("profile1d.json", dump(r));
    if (c.format == "csv") {
        std::ostringstream csv;
        csv << "t,profile,potential,gradient\n";
        for (int k = 0; k <= 80; ++k) {
            const double t = c.a + (c.b - c.a) * k / 80.0;
            const double s = optimal_profile_1d(t);
            const double ds = 1.0 - s * s;
            csv << number_text(t) << ',' << number_text(s) << ',' << number_text(double_well(s)) << ','
                << number_text(ds * ds) << '\n';
        }
        ctx.write("profile1d.csv", csv.str());
    }
    return r;
}

struct Suite {
    std::string name;
    int cases = 0;
    int failures = 0;
    void check(bool ok) {
        ++cases;
        failures += ok ? 0 : 1;
    }
};

json cmd_selftest(Context& ctx) {
    std::vector<Suite> suites;
    std::mt19937_64 rng(ctx.cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr double pi = std::numbers::pi;

    Suite ground{"ground_states"};
    for (double delta : {0.5, 0.1, 0.01}) {
        const ModelParams p = ModelParams::make(1.0 / 32.0, delta);
        for (int w : {1, -1}) {
            for (int z : {1, -1}) {
                const SpinField u = helical_ground_state(32, 32, p, w, z);
                ground.check(std::abs(energy_H(u, p).total) <= 1e-10);
                const Transformed tr = transform(u, p);
                double err = 0.0;
                for (double v : tr.pair.w.values()) err = std::max(err, std::abs(v - w));
                for (double v : tr.pair.z.values()) err = std::max(err, std::abs(v - z));
                ground.check(err <= 1e-12);
            }
        }
    }
    suites.push_back(ground);

    Suite decomposition{"decomposition_identity"};
    for (int k = 0; k < 20; ++k) {
        const ModelParams p = ModelParams::make(0.01 + 0.1 * unit(rng), 0.01 + 0.5 * unit(rng));
        SpinField u(12, 12, p.lambda());
        for (double& a : u.angles().values()) a = 2.0 * pi * unit(rng);
        const double h = energy_H(u, p).total;
        decomposition.check(std::abs(h - mm_decomposition(u, p).total) <= 1e-9 * (1.0 + h));
    }
    suites.push_back(decomposition);

    Suite rho_suite{"rho_consistency"};
    for (int k = 0; k < 10000; ++k) {
        const double t1 = pi * (2.0 * unit(rng) - 1.0);
        const double t2 = pi * (2.0 * unit(rng) - 1.0);
        const double a = rho(t1, t2, RhoMethod::definition);
        const double b = rho(t1, t2, RhoMethod::closed_form);
        rho_suite.check(std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}));
    }
    suites.push_back(rho_suite);

    Suite rigidity{"rigidity"};
    int admissible = 0;
    const double r = 1.0 / std::sqrt(2.0);
    const Vec2 normals[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {r, r}, {-r, -r}, {-r, r}, {r, -r}};
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            const Label pa{a & 1 ? -1 : 1, a & 2 ? -1 : 1}, pb{b & 1 ? -1 : 1, b & 2 ? -1 : 1};
            for (const Vec2& nu : normals) admissible += classify_triple(pa, pb, nu) != JumpClass::inadmissible;
        }
    }
    rigidity.check(admissible == 24);
    suites.push_back(rigidity);

    Suite bootstrap{"bootstrap_inequalities"};
    const Domain sq = Domain::unit_square();
    for (ExampleKind kind : {ExampleKind::vertical_wall, ExampleKind::horizontal_wall, ExampleKind::diagonal_wall,
                             ExampleKind::four_quadrant, ExampleKind::corner_junction, ExampleKind::laminate}) {
        const TotalVariations tv = total_variations(build_example(kind, sq));
        bootstrap.check(tv.d2w <= tv.d2z + 1e-12 && tv.d1z <= tv.d1w + 1e-12);
    }
    suites.push_back(bootstrap);

    Suite vortex{"vorticity"};
    SpinField v(2, 2, 1.0);
    v.angle(1, 0) = pi / 2.0;
    v.angle(1, 1) = pi;
    v.angle(0, 1) = -pi / 2.0;
    vortex.check(vorticity(bond_angles(v)).at(0, 0) == 2.0 * pi);
    suites.push_back(vortex);

    json list = json::array();
    bool passed = true;
    for (const Suite& s : suites) {
        list.push_back({{"name", s.name}, {"cases", s.cases}, {"failures", s.failures}});
        passed = passed && s.failures == 0 && s.cases > 0;
    }
    json res = {{"suites", list}, {"passed", passed}};
    ctx.write("selftest.json", dump(res));
    if (!passed) {
        ctx.outcome.status = 2;
        res["error"] = {{"kind", "numerical"}, {"message", "self test failures"}};
    }
    return res;
}

json error_json(const char* kind, const std::string& message) { return {{"error", {{"kind", kind}, {"message", message}}}}; }

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"groundstate", "energy",   "transform", "classify", "recover",
                                                   "sweep",       "minimize", "profile1d", "selftest"};
    return names;
}

json to_json(const RunConfig& c) {
    json j = json::object();
    each_field(c, [&](const char* key, const auto& v) { j[key] = encode(v); });
    return j;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    RunConfig c;
    std::vector<std::string> known;
    each_field(c, [&](const char* key, auto& v) {
        known.emplace_back(key);
        if (const auto it = j.find(key); it != j.end()) decode(*it, key, v);
    });
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ValidationError("unknown config key '" + key + "'");
        }
    }
    return c;
}

RunOutcome run(const std::string& command, const RunConfig& config) {
    RunOutcome outcome;
    RunConfig cfg = config;
    cfg.command = command;
    Context ctx{cfg, outcome};
    try {
        if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "svg") {
            throw ValidationError("format must be json, csv or svg");
        }
        if (cfg.threads < 1) throw ValidationError("threads must be positive");
        if (command == "groundstate") {
            outcome.result = cmd_groundstate(ctx);
        } else if (command == "energy") {
            outcome.result = cmd_energy(ctx);
        } else if (command == "transform") {
            outcome.result = cmd_transform(ctx);
        } else if (command == "classify") {
            outcome.result = cmd_classify(ctx);
        } else if (command == "recover") {
            outcome.result = cmd_recover(ctx);
        } else if (command == "sweep") {
            outcome.result = cmd_sweep(ctx);
        } else if (command == "minimize") {
            outcome.result = cmd_minimize(ctx);
        } else if (command == "profile1d") {
            outcome.result = cmd_profile1d(ctx);
        } else if (command == "selftest") {
            outcome.result = cmd_selftest(ctx);
        } else {
            throw ValidationError("unknown command '" + command + "'");
        }
    } catch (const ValidationError& e) {
        outcome.status = 1;
        outcome.result = error_json("validation", e.what());
    } catch (const json::exception& e) {
        outcome.status = 1;
        outcome.result = error_json("validation", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        outcome.status = 1;
        outcome.result = error_json("validation", e.what());
    } catch (const std::exception& e) {
        outcome.status = 2;
        outcome.result = error_json("numerical", e.what());
    }
    return outcome;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lattice chirality energies, recovery sequences and minimization"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config; flags override its keys");

    RunConfig defaults;
    std::map<std::string, std::string> text;
    std::map<std::string, CLI::Option*> options;
    each_field(defaults, [&](const char* key, auto& v) {
        if (std::string(key) == "command") return;
        using T = std::decay_t<decltype(v)>;
        const std::string flag = std::string("--") + key;
        if constexpr (std::is_same_v<T, bool>) {
            // bare --flag means true; --flag=false also accepted
            options[key] = app.add_option(flag, text[key])->expected(0, 1);
        } else {
            options[key] = app.add_option(flag, text[key]);
        }
    });
    for (const std::string& name : command_names()) app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << dump(error_json("validation", e.what()));
        return 1;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = config_from_json(read_json_file(config_path));
        each_field(cfg, [&](const char* key, auto& v) {
            const auto it = options.find(key);
            if (it == options.end() || it->second->count() == 0) return;
            std::string value = text[key];
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) {
                if (value.empty()) value = "true";
            }
            assign(v, key, value);
        });
    } catch (const ValidationError& e) {
        err << dump(error_json("validation", e.what()));
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const RunOutcome outcome = run(command, cfg);
    if (outcome.status == 0) {
        out << dump(outcome.result);
    } else if (cfg.error_json) {
        err << dump(outcome.result.contains("error") ? json{{"error", outcome.result["error"]}} : outcome.result);
        if (!outcome.artifacts.empty()) out << dump(outcome.result);
    } else {
        const json& e = outcome.result.at("error");
        err << "error (" << e.at("kind").get<std::string>() << "): " << e.at("message").get<std::string>() << "\n";
        if (!outcome.artifacts.empty()) out << dump(outcome.result);
    }
    return outcome.status;
}

}  // namespace chiral
