#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chiral/cli.hpp"
#include "chiral/continuum.hpp"

using namespace chiral;
namespace fs = std::filesystem;

namespace {

struct Call {
    int status;
    std::string out;
    std::string err;
};

Call call(std::vector<std::string> args) {
    args.insert(args.begin(), "chiral");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("chiral_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("config round-trips through json") {
    RunConfig c;
    c.command = "sweep";
    c.lambda = 0.02;
    c.kernel_width = 0.75;
    c.nx = 17;
    c.deterministic = false;
    c.seed = 12345678901234ULL;
    c.epsilons = "0.2,0.1";
    const json j = to_json(c);
    const RunConfig back = config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.lambda == 0.02);
    CHECK_FALSE(back.delta.has_value());
    CHECK(back.seed == 12345678901234ULL);
    CHECK(to_json(config_from_json(json::object())) == to_json(RunConfig{}));
    CHECK_THROWS_AS(config_from_json({{"lamda", 0.1}}), ValidationError);
    CHECK_THROWS_AS(config_from_json({{"n", "sixty"}}), ValidationError);
}

TEST_CASE("ground states written by the cli have zero energy") {
    const fs::path dir = scratch("groundstate");
    for (const std::string pair : {"++", "+-", "-+", "--"}) {
        const Call g = call({"groundstate", "--pair=" + pair, "--delta=0.1", "--lambda=0.01", "--n=64", "--out",
                             dir.string()});
        REQUIRE(g.status == 0);
        const Call e = call({"energy", "--input", (dir / "groundstate.json").string(), "--out", dir.string()});
        REQUIRE(e.status == 0);
        const json r = json::parse(e.out);
        CHECK(std::abs(r["report"]["total"].get<double>()) < 1e-10);
        CHECK(r["params"]["delta"] == 0.1);
        const Call t = call({"transform", "--input", (dir / "groundstate.json").string(), "--out", dir.string()});
        REQUIRE(t.status == 0);
        CHECK(json::parse(t.out)["defects"] == 0);
    }
}

TEST_CASE("flags override the config file") {
    const fs::path dir = scratch("override");
    std::ofstream(dir / "cfg.json") << R"({"lambda": 0.05, "delta": 0.3, "n": 8, "pair": "-+"})";
    const Call r = call({"groundstate", "--config", (dir / "cfg.json").string(), "--n=5", "--out", dir.string()});
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["nx"] == 5);
    CHECK(j["pair"] == "-+");
    CHECK(j["params"]["lambda"] == 0.05);
    CHECK(j["params"]["delta"] == 0.3);
}

TEST_CASE("boolean flags") {
    const fs::path dir = scratch("bools");
    const Call bare = call({"profile1d", "--error_json", "--out", dir.string()});
    CHECK(bare.status == 0);
    const Call off = call({"profile1d", "--deterministic=false", "--out", dir.string()});
    CHECK(off.status == 0);
    const Call bad = call({"profile1d", "--deterministic=maybe", "--error_json", "--out", dir.string()});
    CHECK(bad.status == 1);
}

TEST_CASE("validation failures exit with 1") {
    const fs::path dir = scratch("errors");
    const Call missing = call({"energy", "--input", (dir / "nope.json").string(), "--error_json", "--out", dir.string()});
    CHECK(missing.status == 1);
    const json e = json::parse(missing.err);
    CHECK(e["error"]["kind"] == "validation");
    const Call bad_pair = call({"groundstate", "--pair=+x", "--out", dir.string()});
    CHECK(bad_pair.status == 1);
    CHECK(bad_pair.err.rfind("error (validation)", 0) == 0);
    CHECK(call({"groundstate", "--lambda=-1", "--out", dir.string()}).status == 1);
    CHECK(call({"frobnicate"}).status == 1);
    CHECK(call({"classify", "--example=spiral", "--out", dir.string()}).status == 1);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK(call({"energy", "--input", (dir / "broken.json").string(), "--out", dir.string()}).status == 1);
}

TEST_CASE("numerical failures exit with 2") {
    const fs::path dir = scratch("numerical");
    // a gradient tolerance below roundoff can only end in a stalled line search
    const Call r = call({"minimize", "--n=9", "--gtol=1e-300", "--error_json", "--out", dir.string()});
    CHECK(r.status == 2);
    CHECK(json::parse(r.err)["error"]["kind"] == "numerical");
    CHECK(fs::exists(dir / "minimize.json"));
}

TEST_CASE("classify reports the limit energy") {
    const fs::path dir = scratch("classify");
    const Call r = call({"classify", "--example=four_quadrant", "--format=svg", "--out", dir.string()});
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["limit_energy"].get<double>() == doctest::Approx(16.0 / 3.0));
    CHECK(j["classes"]["J1"] == 2);
    CHECK(j["classes"]["J2"] == 2);
    CHECK(fs::exists(dir / "classify.svg"));
}

TEST_CASE("sweep on a mesh file") {
    const fs::path dir = scratch("sweep");
    std::ofstream(dir / "vertical_wall.json") << to_json(build_example(ExampleKind::vertical_wall, Domain::unit_square()));
    const Call r = call({"sweep", "--mesh=" + (dir / "vertical_wall.json").string(), "--schedule=default", "--threads=2",
                         "--out", dir.string()});
    REQUIRE(r.status == 0);
    const double last = json::parse(r.out)["last_ratio"].get<double>();
    CHECK(last >= 0.95);
    CHECK(last <= 1.05);
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("deterministic reruns are byte identical") {
    const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
    for (const fs::path& dir : {a, b}) {
        REQUIRE(call({"sweep", "--schedule=16,32", "--example=corner_junction", "--out", dir.string()}).status == 0);
        REQUIRE(call({"minimize", "--n=21", "--anneal", "--seed=7", "--out", dir.string()}).status == 0);
        REQUIRE(call({"recover", "--lambda=0.03125", "--format=svg", "--out", dir.string()}).status == 0);
    }
    for (const char* name : {"sweep.csv", "sweep.json", "minimize.json", "minimize_log.csv", "recover.json", "recover.svg"}) {
        CAPTURE(name);
        CHECK(slurp(a / name) == slurp(b / name));
        CHECK_FALSE(slurp(a / name).empty());
    }
}

TEST_CASE("minimize on a chain") {
    const fs::path dir = scratch("chain");
    const Call r = call({"minimize", "--ny=1", "--n=60", "--left=++", "--right=-+", "--out", dir.string()});
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["reason"] == "converged");
    CHECK(j["report"]["total"].get<double>() > 1.0);
    CHECK(fs::exists(dir / "minimize_log.csv"));
}

TEST_CASE("profile and selftest") {
    const fs::path dir = scratch("selftest");
    const Call p = call({"profile1d", "--format=csv", "--out", dir.string()});
    REQUIRE(p.status == 0);
    CHECK(json::parse(p.out)["relative_error"].get<double>() < 1e-12);
    CHECK(fs::exists(dir / "profile1d.csv"));
    const Call s = call({"selftest", "--out", dir.string()});
    CHECK(s.status == 0);
    const json j = json::parse(s.out);
    REQUIRE(j.contains("suites"));
    for (const json& suite : j["suites"]) {
        CHECK(suite["failures"] == 0);
        CHECK(suite["cases"].get<int>() > 0);
    }
}
