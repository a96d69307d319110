#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcd/config.hpp"

namespace rcd {

inline constexpr std::string_view tool_name = "rcdlab";
inline constexpr std::string_view tool_version = "0.1.0";

/// Exit codes of run_experiment.
enum ExitCode : int
{
    exit_ok = 0,
    exit_invalid_config = 2,
    exit_numerical_failure = 3,
};

/// A computed quantity came out NaN or infinite.
class NumericalFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> const& subcommand_names();

struct RunOptions
{
    std::string subcommand;
    std::string config_path;
    std::uint64_t seed = 0;
    std::optional<int> threads;
    std::string out_dir = ".";
};

/// Runs one subcommand on an already-loaded config. Returns the report and
/// writes CSV files into out_dir (report.json is not written here). Throws
/// ConfigError on invalid input and NumericalFailure on NaN/inf results.
Json run_subcommand(std::string const& subcommand, YAML::Node const& config, std::uint64_t seed,
                    std::string const& out_dir);

/// Loads the config, runs, writes out_dir/report.json and returns the exit
/// code; diagnostics go to `err`.
int run_experiment(RunOptions const& opts, std::ostream& err);

/// The report without its "run" block (timestamp, thread count), dumped with
/// fixed indentation; equal strings mean reproducible runs.
std::string canonical_report(Json const& report);

}  // namespace rcd
