#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chiral/io.hpp"

namespace chiral {

// Every field is a config key; the command line flag of the same name
// (--lambda, --kernel_width, ...) overrides it.
struct RunConfig {
    std::string command;
    std::string input;           // SpinField JSON for energy / transform
    std::string mesh;            // MeshPotential JSON; empty selects `example`
    std::string example = "vertical_wall";
    int walls = 3;               // laminate walls
    double x0 = 0.0;
    double y0 = 0.0;
    double width = 1.0;
    double height = 1.0;
    std::string out = ".";
    std::string format = "json";  // json, csv or svg
    bool deterministic = true;
    int threads = 1;
    bool error_json = false;
    std::optional<double> lambda;
    std::optional<double> delta;
    int n = 64;
    std::optional<int> nx;
    std::optional<int> ny;
    std::string pair = "++";
    std::string left = "--";
    std::string right = "++";
    double anchor = 0.0;
    std::string schedule = "default";  // "default" or comma-separated lattice counts
    std::string epsilons;              // comma-separated; overrides schedule when set
    std::string kernel = "auto";       // auto, logistic or bump
    std::optional<double> kernel_width;
    int oversample = 2;
    std::string extension = "ray";  // ray or projection
    int max_iter = 20000;
    double gtol = 1e-8;
    bool anneal = false;
    std::uint64_t seed = 1;
    double length = 2.0;  // chain length for minimize with ny = 1
    double a = -20.0;     // profile1d interval
    double b = 20.0;
};

const std::vector<std::string>& command_names();

json to_json(const RunConfig& c);
// Missing keys take their defaults; unknown keys are rejected.
RunConfig config_from_json(const json& j);

struct RunOutcome {
    int status = 0;  // 0 ok, 1 validation failure, 2 numerical failure
    json result;
    std::vector<std::string> artifacts;
};

// Runs one command and writes its artifacts under config.out. Validation and
// numerical errors are reported through the status and an "error" entry.
RunOutcome run(const std::string& command, const RunConfig& config);

// Command line entry point: parses flags and an optional --config file, runs
// the command, prints the result JSON to `out` and errors to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chiral
