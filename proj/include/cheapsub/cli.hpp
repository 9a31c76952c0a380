#pragma once

// Command-line front end. Every subcommand reads a flat JSON config (optional)
// and then applies explicitly given flags on top of it.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace cheapsub {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitEstimatorFailure = 3;

struct RunConfig {
    std::string command;

    std::uint64_t master_seed = 1;
    unsigned workers = 0;  ///< 0 = all cores
    std::string output;    ///< empty = stdout
    std::string format = "csv";

    // ci / seed-experiment input
    std::string input;
    std::string estimator = "longitudinal";
    std::string column;  ///< mean estimator: CSV column (empty = first)

    // resampling
    std::vector<std::string> methods;  ///< empty = command default
    std::size_t m = 0;                 ///< 0 = use eta
    double eta = 0.632;
    std::size_t B = 25;
    double alpha = 0.05;
    unsigned max_retries = 5;

    // longitudinal estimator
    int regime = 1;
    bool targeting = true;
    std::string q2_scope = "pooled";
    bool q2_interaction = false;

    // simulate / generate
    std::size_t n = 500;
    std::size_t n_sim = 1000;
    std::string model = "longitudinal";
    std::string raw_output;

    // truth
    std::size_t draws = 10'000'000;
    std::uint64_t truth_seed = 20240601;
    double tolerance = 5e-4;

    // seed-experiment
    std::vector<double> eta_grid = {0.5, 0.632, 0.8, 0.9};
    std::vector<std::size_t> B_grid = {5, 20, 100, 200};
    std::size_t n_seeds = 10;

    bool operator==(const RunConfig&) const = default;
};

void to_json(nlohmann::json& j, const RunConfig& cfg);
/// Starts from `cfg` defaults; unknown keys and type errors throw
/// std::invalid_argument naming the field ("config.<key>: ...").
void from_json(const nlohmann::json& j, RunConfig& cfg);

/// The config embedded in outputs: everything except the worker count and
/// output paths, which do not affect results.
nlohmann::json provenance_json(const RunConfig& cfg);

/// Throws std::invalid_argument with a "config.<field>" path.
void validate(const RunConfig& cfg);

/// Entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cheapsub
