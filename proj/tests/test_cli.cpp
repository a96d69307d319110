#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "rcd/cli.hpp"
#include "rcd/parallel.hpp"

using namespace rcd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(std::string const& name)
{
    auto p = fs::temp_directory_path() / "rcd_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(fs::path const& dir, std::string const& text)
{
    auto p = dir / "config.yaml";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(fs::path const& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Small configs for every subcommand; all keys share one file.
std::string const small_circle = R"(
system:
  generators:
    - diagonal: 2
    - conjugate: {map: {diagonal: 2}, by: 0.29}
  weights: [0.5, 0.5]
  attractors:
    - {label: a, points: [0.5]}
lyapunov: {horizon: 500, n_paths: 4, formula_bins: 64}
stationary: {bins: 64, empirical_steps: 2000}
dichotomy: {bins: 64, lyapunov_horizon: 500, lyapunov_paths: 4, ue_starts: 3, ue_steps: 2000}
contract: {n_trajectories: 5, horizon: 300}
basin: {starts: [0.3], horizon: 100, n_paths: 50, probes: [0.2], probe_paths: 20, capture_radius: 0.05}
)";

std::string const small_leaf_stationary = R"(
leaf: {kappa: 3, dt: 0.001, T: 20, delta: 0.1}
hyperbolic: {n_paths: 6, v_paths: 20}
xi: {bins: 20, window: 5}
lln: {oracle_samples: 100}
)";

std::string const small_leaf_escape = R"(
leaf: {kappa: 0.5, dt: 0.01, T: 100, delta: 1}
xi: {n_runs: 4, window: 3}
)";

Json load_report(fs::path const& dir)
{
    std::ifstream is(dir / "report.json");
    return Json::parse(is);
}

}  // namespace

TEST_SUITE("cli_runner")
{
    TEST_CASE("weights that do not sum to one: exit 2 naming the key")
    {
        auto dir = scratch("bad_weights");
        auto cfg = write_config(dir, "system:\n  generators:\n    - rotation: 0.1\n    - rotation: -0.1\n"
                                     "  weights: [0.5, 0.4]\n");
        std::ostringstream err;
        int rc = run_experiment({"dichotomy", cfg.string(), 1, std::nullopt, dir.string()}, err);
        CHECK(rc == exit_invalid_config);
        CHECK(err.str().find("weights") != std::string::npos);
        CHECK(err.str().find("config:5:") != std::string::npos);
        CHECK_FALSE(fs::exists(dir / "report.json"));
    }

    TEST_CASE("unknown keys and malformed values are rejected")
    {
        auto dir = scratch("unknown");
        std::ostringstream err;
        auto cfg = write_config(dir, "system:\n  generators: [{rotation: 0.1}]\n  wieghts: [1]\n");
        CHECK(run_experiment({"dichotomy", cfg.string(), 1, std::nullopt, dir.string()}, err) ==
              exit_invalid_config);
        CHECK(err.str().find("system.wieghts") != std::string::npos);

        err.str("");
        cfg = write_config(dir, "system:\n  generators: [{moebius: [1, 2, 2, 4]}]\n");
        CHECK(run_experiment({"dichotomy", cfg.string(), 1, std::nullopt, dir.string()}, err) ==
              exit_invalid_config);

        err.str("");
        cfg = write_config(dir, small_circle + "\nlyapunov_typo: 1\n");
        CHECK(run_experiment({"lyapunov", cfg.string(), 1, std::nullopt, dir.string()}, err) ==
              exit_invalid_config);

        err.str("");
        cfg = write_config(dir, "leaf: {kappa: 1, dt: 0.1, T: 100, delta: 1}\n");
        CHECK(run_experiment({"hyperbolic", cfg.string(), 1, std::nullopt, dir.string()}, err) ==
              exit_invalid_config);
        CHECK(err.str().find("leaf.dt") != std::string::npos);

        err.str("");
        cfg = write_config(dir, "system: [unterminated\n");
        CHECK(run_experiment({"dichotomy", cfg.string(), 1, std::nullopt, dir.string()}, err) ==
              exit_invalid_config);
        CHECK(err.str().find("config:") != std::string::npos);
    }

    TEST_CASE("rotation pair classifies as InvariantMeasure")
    {
        auto dir = scratch("rotation");
        std::ostringstream err;
        int rc = run_experiment({"dichotomy", RCD_CONFIG_DIR "/rotation_pair.yaml", 3, 1, dir.string()}, err);
        REQUIRE(rc == exit_ok);
        auto rep = load_report(dir);
        CHECK(rep["results"]["verdict"] == "InvariantMeasure");
        CHECK(rep["tool"] == "rcdlab");
        CHECK(rep["seed"] == 3);
        CHECK(rep["run"]["threads"] == 1);
        CHECK(fs::exists(dir / "invariance_residuals.csv"));
    }

    TEST_CASE("effective configuration is echoed with defaults")
    {
        auto dir = scratch("echo");
        auto cfg = write_config(dir, small_circle);
        std::ostringstream err;
        REQUIRE(run_experiment({"lyapunov", cfg.string(), 9, std::nullopt, dir.string()}, err) == exit_ok);
        auto rep = load_report(dir);
        auto const& c = rep["config"];
        CHECK(c["lyapunov"]["horizon"] == 500);
        CHECK(c["lyapunov"]["start"] == 0.1234567);  // default
        CHECK(c["system"]["weights"].size() == 2);
        CHECK(c["system"]["generators"].size() == 2);
        for (auto const& f : rep["files"])
            CHECK(fs::exists(dir / f.get<std::string>()));
    }

    TEST_CASE("reports and CSV files are identical across reruns and thread counts")
    {
        std::vector<std::pair<std::string, std::string const*>> runs{
            {"lyapunov", &small_circle},         {"stationary", &small_circle},
            {"dichotomy", &small_circle},        {"contract", &small_circle},
            {"basin", &small_circle},            {"hyperbolic", &small_leaf_stationary},
            {"xi", &small_leaf_stationary},      {"xi", &small_leaf_escape},
            {"lln", &small_leaf_stationary},
        };
        int const before = max_threads();
        int idx = 0;
        for (auto const& [sub, text] : runs)
        {
            CAPTURE(sub);
            std::map<std::string, std::string> first;
            std::string first_report;
            for (int threads : {1, 2, 1})
            {
                auto dir = scratch("det_" + std::to_string(idx) + "_" + std::to_string(threads));
                auto cfg = write_config(dir, *text);
                std::ostringstream err;
                REQUIRE(run_experiment({sub, cfg.string(), 42, threads, dir.string()}, err) == exit_ok);
                auto rep = load_report(dir);
                CHECK(rep["run"]["threads"] == threads);
                std::map<std::string, std::string> files;
                for (auto const& f : rep["files"])
                    files[f.get<std::string>()] = slurp(dir / f.get<std::string>());
                if (first_report.empty())
                {
                    first_report = canonical_report(rep);
                    first = files;
                }
                else
                {
                    CHECK(canonical_report(rep) == first_report);
                    CHECK(files == first);
                }
            }
            ++idx;
        }
        set_thread_count(before);
    }

    TEST_CASE("different seeds give different results")
    {
        YAML::Node cfg = YAML::Load(small_circle);
        auto dir = scratch("seeds");
        auto a = run_subcommand("lyapunov", cfg, 1, dir.string());
        auto b = run_subcommand("lyapunov", cfg, 2, dir.string());
        CHECK(a["results"] != b["results"]);
        CHECK_THROWS_AS(run_subcommand("nope", cfg, 1, dir.string()), ConfigError);
        CHECK(subcommand_names().size() == 8);
    }
}
