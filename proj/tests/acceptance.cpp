// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Criteria that have a bundled config are driven through the same entry point
// as the rcdlab binary, so they exercise config parsing and report writing too.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rcd/cli.hpp"
#include "rcd/contraction.hpp"
#include "rcd/parallel.hpp"

using namespace rcd;
namespace fs = std::filesystem;

namespace {

std::string const config_dir = RCD_CONFIG_DIR;

fs::path out_dir(std::string const& name)
{
    auto p = fs::temp_directory_path() / "rcd_acceptance" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

YAML::Node bundled(std::string const& name)
{
    return load_config_file(config_dir + "/" + name);
}

Json run(std::string const& sub, YAML::Node const& cfg, std::uint64_t seed, std::string const& tag)
{
    return run_subcommand(sub, cfg, seed, out_dir(tag).string());
}

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome
{
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ------------------------------------------------------------------ criteria

Outcome leaf_lyapunov()
{
    auto t0 = Clock::now();
    bool ok = true;
    std::string d;
    for (double kappa : {0.0, 0.5, 1.0, 2.0, 3.0})
    {
        auto cfg = bundled("leaf_lyapunov.yaml");
        cfg["leaf"]["kappa"] = kappa;
        auto r = run("hyperbolic", cfg, 2024, "c1")["results"];
        double lam = r["lyapunov"]["value"], se = r["lyapunov"]["std_error"];
        double err = std::abs(lam - (kappa - 1.0));
        bool k_ok = err <= 3.0 * se && err < 0.02;
        ok = ok && k_ok;
        d += fmt("k=%g: %.4f+-%.4f%s; ", kappa, lam, se, k_ok ? "" : " (off)");
    }
    double secs = seconds_since(t0);
    ok = ok && secs < 120.0;
    return {ok, d + fmt("%.1f s (limit 120)", secs)};
}

Outcome ito_oracle()
{
    auto t0 = Clock::now();
    auto r = run("hyperbolic", bundled("leaf_v_process.yaml"), 2024, "c2")["results"]["v_terminal_ks"];
    double secs = seconds_since(t0);
    double p = r["p_value"];
    std::size_t n = r["n_paths"];
    bool ok = p > 0.01 && n == 10000 && secs < 120.0;
    return {ok, fmt("KS D=%.4f p=%.3f over %zu paths (level 0.01); %.1f s (limit 120)",
                    r["statistic"].get<double>(), p, n, secs)};
}

Outcome xi_regimes()
{
    auto s = run("xi", bundled("xi_stationary.yaml"), 2024, "c3a")["results"];
    auto e = run("xi", bundled("xi_escape.yaml"), 2024, "c3b")["results"];
    double w1 = s["w1_to_density"], frac = e["escape_fraction"];
    bool ok = w1 < 0.05 && frac >= 0.99;
    return {ok, fmt("kappa=3 W1=%.4f (limit 0.05); kappa=0.5 escaped %.0f%% (need 99%%)", w1,
                    100.0 * frac)};
}

Outcome invariant_branch()
{
    auto t0 = Clock::now();
    auto rep = run("dichotomy", bundled("rotation_pair.yaml"), 2024, "c4");
    double secs = seconds_since(t0);
    auto const& r = rep["results"];
    double worst = 0.0;
    for (double x : r["invariance_residuals"])
        worst = std::max(worst, x);
    bool bins_ok = rep["config"]["dichotomy"]["bins"] == 512;
    bool ok = r["verdict"] == "InvariantMeasure" && worst < 1e-3 && bins_ok && secs < 30.0;
    return {ok, fmt("verdict %s, max TV residual %.2e (limit 1e-3) at 512 bins; %.1f s (limit 30)",
                    r["verdict"].get<std::string>().c_str(), worst, secs)};
}

Outcome contracting_branch()
{
    auto t0 = Clock::now();
    auto rep = run("dichotomy", bundled("symmetric_proximal.yaml"), 2024, "c5");
    double secs = seconds_since(t0);
    auto const& r = rep["results"];
    double upper = r["lyapunov_upper"], spread = r["ue_spread"], sve = r["stationary_vs_empirical"];
    bool starts_ok = rep["config"]["dichotomy"]["ue_starts"] == 10;
    bool ok = upper < 0.0 && spread < 0.03 && sve < 0.02 && starts_ok && secs < 180.0 &&
              r["verdict"] == "NegativeExponentUniquelyErgodic";
    return {ok, fmt("lambda+3SE=%.4f, W1 spread %.4f (limit 0.03), stationary-vs-empirical %.4f "
                    "(limit 0.02), verdict %s; %.1f s (limit 180)",
                    upper, spread, sve, r["verdict"].get<std::string>().c_str(), secs)};
}

Outcome formula_consistency()
{
    // three bundled systems and two inline ones: a smooth perturbation mixed
    // with an irrational rotation, and point-dependent weights
    std::vector<std::pair<std::string, YAML::Node>> systems{
        {"rotation_pair", bundled("rotation_pair.yaml")},
        {"proximal_pair", bundled("proximal_pair.yaml")},
        {"symmetric_proximal", bundled("symmetric_proximal.yaml")},
        {"perturbed_rotation", YAML::Load(R"(
system:
  generators:
    - perturbed: {eps: 0.5, k: 1}
    - rotation: 0.41421356237309515
  weights: [0.5, 0.5]
lyapunov: {horizon: 10000, n_paths: 64}
)")},
        {"cosine_weighted", YAML::Load(R"(
system:
  generators:
    - diagonal: 2
    - rotation: 0.29
  weights:
    cosine: [[0.5, 0.6, 0.0], [0.5, -0.6, 0.0]]
lyapunov: {horizon: 10000, n_paths: 64}
)")},
    };
    bool ok = true;
    std::string d;
    for (auto& [name, cfg] : systems)
    {
        auto r = run("lyapunov", cfg, 2024, "c6_" + name)["results"];
        double traj = r["trajectory"]["value"], se = r["trajectory"]["std_error"];
        double f = r["formula"]["value"], q = r["formula"]["quadrature_bound"];
        double diff = std::abs(traj - f);
        bool s_ok = diff <= 3.0 * (se + q);
        ok = ok && s_ok;
        d += fmt("%s |%.4f-%.4f|=%.1e vs %.1e%s; ", name.c_str(), traj, f, diff, 3.0 * (se + q),
                 s_ok ? "" : " (off)");
    }
    d.resize(d.size() - 2);
    return {ok, d};
}

Outcome contraction_certificates()
{
    // x -> x / e at its fixed point 0: lambda = -1, so C is exactly 1
    std::vector<CircleMap> linear(10000, MoebiusMap::diagonal(std::exp(-0.5)));
    auto cert = verify_contraction_lemma(linear, 0.0, 0.5, Arc{0.0, 5e-4});
    bool lin_ok = cert.valid && cert.C <= 1.0 + 1e-6 && recheck_certificate(cert, linear);

    auto rep = run("contract", bundled("symmetric_proximal.yaml"), 2024, "c7");
    auto const& r = rep["results"];
    std::size_t certified = r["certified"], rechecked = r["rechecked"], n = r["n_trajectories"];
    bool setup_ok = n == 200 && rep["config"]["contract"]["horizon"] == 10000 &&
                    rep["config"]["contract"]["alpha_fraction"] == 0.5;
    bool prox_ok = setup_ok && rechecked * 100 >= 95 * n && rechecked == certified;
    return {lin_ok && prox_ok,
            fmt("linear: %s, C=%.9f; proximal: %zu/%zu certified, %zu re-checked "
                "(need 95%%, alpha=|lambda|/2, horizon 1e4)",
                cert.valid ? "valid" : "rejected", cert.C, certified, n, rechecked)};
}

Outcome discretization_lln()
{
    auto r = run("lln", bundled("leaf_lln.yaml"), 2024, "c8")["results"];
    double final_ratio = r["final_ratio"], dev = r["max_deviation_second_half"];
    double tail = r["max_ratio_second_half"], c = r["oracle_c"];
    bool ok = dev <= 0.1 && tail < c;
    return {ok, fmt("K_n/n -> %.4f over n=%zu, second-half deviation %.4f (band 0.1), "
                    "max %.4f < c=%.4f",
                    final_ratio, r["n"].get<std::size_t>(), dev, tail, c)};
}

Outcome attraction_probabilities()
{
    auto r = run("basin", bundled("two_attractors.yaml"), 2024, "c9")["results"];
    bool ok = r["counts_sum_to_paths"] == true;
    double worst_unresolved = 0.0, worst_sum = 0.0;
    for (auto const& row : r["starts"])
    {
        std::size_t total = row["unresolved_count"];
        double psum = row["unresolved"];
        for (auto const& [label, p] : row["probabilities"].items())
        {
            total += p["count"].get<std::size_t>();
            psum += p["probability"].get<double>();
        }
        ok = ok && total == row["n_paths"].get<std::size_t>();
        worst_sum = std::max(worst_sum, std::abs(psum - 1.0));
        worst_unresolved = std::max(worst_unresolved, row["unresolved"].get<double>());
    }
    std::size_t within = 0, probes = r["harmonicity"].size();
    for (auto const& h : r["harmonicity"])
        within += h["within_3_sigma"].get<bool>() ? 1 : 0;
    ok = ok && worst_sum <= 1e-12 && worst_unresolved < 0.05 && probes == 5 && within == probes;
    return {ok, fmt("counts exact, |sum p + unresolved - 1| <= %.1e, max unresolved %.3f "
                    "(limit 0.05), harmonicity %zu/%zu probes within 3 sigma",
                    worst_sum, worst_unresolved, within, probes)};
}

// Small configs per subcommand; the full-size runs above are too slow to
// repeat at several thread counts.
std::string const small_circle = R"(
system:
  generators:
    - diagonal: 2
    - conjugate: {map: {diagonal: 2}, by: 0.29}
  weights: [0.5, 0.5]
  attractors:
    - {label: a, points: [0.5]}
lyapunov: {horizon: 2000, n_paths: 16, formula_bins: 128}
stationary: {bins: 128, empirical_steps: 20000}
dichotomy: {bins: 128, lyapunov_horizon: 2000, lyapunov_paths: 16, ue_starts: 4, ue_steps: 20000}
contract: {n_trajectories: 20, horizon: 2000}
basin: {starts: [0.3, 0.7], horizon: 200, n_paths: 200, probes: [0.2, 0.6], probe_paths: 100}
)";
std::string const small_leaf = R"(
leaf: {kappa: 3, dt: 0.001, T: 20, delta: 0.1}
hyperbolic: {n_paths: 16, v_paths: 100}
xi: {bins: 40, window: 5}
lln: {oracle_samples: 500}
)";
std::string const small_escape = R"(
leaf: {kappa: 0.5, dt: 0.01, T: 200, delta: 1}
xi: {n_runs: 8, window: 3}
)";

std::string slurp(fs::path const& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome determinism()
{
    std::vector<std::pair<std::string, std::string const*>> runs{
        {"lyapunov", &small_circle}, {"stationary", &small_circle}, {"dichotomy", &small_circle},
        {"contract", &small_circle}, {"basin", &small_circle},      {"hyperbolic", &small_leaf},
        {"xi", &small_leaf},         {"xi", &small_escape},         {"lln", &small_leaf},
    };
    int const before = max_threads();
    std::size_t identical = 0;
    std::string bad;
    for (std::size_t i = 0; i < runs.size(); ++i)
    {
        auto const& [sub, text] = runs[i];
        std::string ref;
        bool same = true;
        for (int threads : {1, 2, 4, 1})
        {
            // rcdlab writes report.json through run_experiment; do the same
            auto dir = out_dir("c10_" + std::to_string(i) + "_" + std::to_string(threads));
            auto cfg = dir / "config.yaml";
            std::ofstream(cfg) << *text;
            std::ostringstream err;
            if (run_experiment({sub, cfg.string(), 7, threads, dir.string()}, err) != exit_ok)
            {
                same = false;
                break;
            }
            std::ifstream is(dir / "report.json");
            auto rep = Json::parse(is);
            std::string canon = canonical_report(rep);
            for (auto const& f : rep["files"])
                canon += slurp(dir / f.get<std::string>());
            if (ref.empty())
                ref = canon;
            else
                same = same && canon == ref;
        }
        identical += same ? 1 : 0;
        if (!same)
            bad += " " + sub;
    }
    set_thread_count(before);
    bool ok = identical == runs.size();
    return {ok, fmt("%zu/%zu runs (all 8 subcommands) identical at 1, 2, 4 threads and rerun%s%s",
                    identical, runs.size(), ok ? "" : "; differs:", bad.c_str())};
}

}  // namespace

int main()
{
    std::vector<std::function<Outcome()>> criteria{
        leaf_lyapunov,       ito_oracle,         xi_regimes,
        invariant_branch,    contracting_branch, formula_consistency,
        contraction_certificates, discretization_lln, attraction_probabilities,
        determinism,
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        auto t0 = Clock::now();
        Outcome o;
        try
        {
            o = criteria[i]();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("threw: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %zu: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
