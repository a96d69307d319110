#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "rcd/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Random conformal dynamics experiments"};
    app.require_subcommand(1);

    std::map<std::string, std::string> const help{
        {"lyapunov", "trajectory vs stationary-formula Lyapunov exponent"},
        {"stationary", "stationary measure by power iteration vs a long trajectory"},
        {"dichotomy", "invariant measure or negative exponent with unique ergodicity"},
        {"contract", "contraction certificates along random trajectories"},
        {"basin", "attraction probabilities and their harmonicity"},
        {"hyperbolic", "leafwise exponent and the v-process change-of-variables check"},
        {"xi", "xi stationarity (kappa > 1) or escape times (kappa <= 1)"},
        {"lln", "K_n / n along a delta-discretized leaf path"},
    };

    rcd::RunOptions opts;
    for (auto const& name : rcd::subcommand_names())
    {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", opts.config_path, "YAML or JSON config file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "master seed")->required();
        sub->add_option("--threads", opts.threads, "worker thread cap")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? 0 : rcd::exit_invalid_config;
    }
    opts.subcommand = app.get_subcommands().front()->get_name();
    return rcd::run_experiment(opts, std::cerr);
}
