#include "rcd/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "rcd/basin.hpp"
#include "rcd/contraction.hpp"
#include "rcd/dichotomy.hpp"
#include "rcd/hyperbolic.hpp"
#include "rcd/lyapunov.hpp"
#include "rcd/measure.hpp"
#include "rcd/stats.hpp"
#include "rcd/trajectory.hpp"

namespace fs = std::filesystem;

namespace rcd {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr std::size_t big_count = 1'000'000'000;

struct Context
{
    YAML::Node const& config;
    std::uint64_t seed;
    fs::path out;
    Json report;

    std::ofstream csv(std::string const& name)
    {
        std::ofstream os(out / name);
        if (!os)
            throw std::runtime_error("cannot write " + (out / name).string());
        os << std::setprecision(17);
        report["files"].push_back(name);
        return os;
    }
};

GeneratorSystem load_system(Context& ctx, std::vector<Attractor>& attractors)
{
    Json echo;
    auto sys = parse_system(ctx.config["system"], attractors, echo);
    ctx.report["config"]["system"] = echo;
    return sys;
}

GeneratorSystem load_system(Context& ctx)
{
    std::vector<Attractor> ignored;
    return load_system(ctx, ignored);
}

Json convergence_json(ConvergenceReport const& c)
{
    return {{"iterations", c.iterations},
            {"gap", c.gap},
            {"tolerance", c.tolerance},
            {"converged", c.converged}};
}

Json lyapunov_json(LyapunovEstimate const& e)
{
    return {{"value", e.value},
            {"std_error", e.std_error},
            {"n_paths", e.n_paths},
            {"horizon", e.horizon},
            {"method", std::string(to_string(e.method))}};
}

// ---------------------------------------------------------------- lyapunov

void run_lyapunov(Context& ctx, NodeReader& r)
{
    auto sys = load_system(ctx);
    double start = r.number("start", 0.1234567, 0.0, 1.0);
    auto horizon = r.count("horizon", 10000, 100, big_count);
    auto n_paths = r.count("n_paths", 32, 2, 1'000'000);
    auto bins = r.count("formula_bins", default_bins, 2, 1 << 20);
    double stol = r.number("stationary_tol", default_stationary_tol, 1e-15, 1.0);
    auto max_iter = r.count("max_iter", default_max_iter, 1, big_count);
    r.finish();

    auto samples = lyapunov_samples(sys, CirclePoint(start), horizon, n_paths, ctx.seed);
    auto ms = stats::mean_and_se(samples);
    LyapunovEstimate traj{ms.mean, ms.std_error, n_paths, horizon,
                          LyapunovEstimate::Method::trajectory};

    auto stat = stationary_measure(sys, bins, stol, max_iter);
    auto formula = lyapunov_from_formula(sys, stat.measure);
    double diff = std::abs(traj.value - formula.value);
    double allowed = 3.0 * (traj.std_error + formula.quadrature_bound);

    ctx.report["results"] = {
        {"trajectory", lyapunov_json(traj)},
        {"formula",
         {{"value", formula.value},
          {"quadrature_bound", formula.quadrature_bound},
          {"stationary", convergence_json(stat.report)}}},
        {"difference", diff},
        {"consistent", diff <= allowed},
    };
    ctx.report["thresholds"] = {{"consistency", "|trajectory - formula| <= 3 (SE + bound)"},
                                {"allowed_difference", allowed}};

    auto os = ctx.csv("lyapunov_samples.csv");
    os << "path,lambda\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
        os << i << ',' << samples[i] << '\n';
    auto ts = ctx.csv("trajectory.csv");
    write_trajectory_csv(ts, simulate_trajectory(sys, CirclePoint(start), horizon,
                                                 derive_seed(ctx.seed, 0)));
}

// -------------------------------------------------------------- stationary

void run_stationary(Context& ctx, NodeReader& r)
{
    auto sys = load_system(ctx);
    auto bins = r.count("bins", default_bins, 2, 1 << 20);
    double tol = r.number("tol", default_stationary_tol, 1e-15, 1.0);
    auto max_iter = r.count("max_iter", default_max_iter, 1, big_count);
    double start = r.number("start", 0.1234567, 0.0, 1.0);
    auto steps = r.count("empirical_steps", 100000, 1, big_count);
    r.finish();

    auto stat = stationary_measure(sys, bins, tol, max_iter);
    auto traj = simulate_trajectory(sys, CirclePoint(start), steps, ctx.seed);
    auto emp = empirical_measure(traj, bins);
    ctx.report["results"] = {
        {"convergence", convergence_json(stat.report)},
        {"w1_empirical_to_stationary",
         measure_distance(emp, stat.measure, DistanceKind::wasserstein1_circle)},
        {"tv_empirical_to_stationary",
         measure_distance(emp, stat.measure, DistanceKind::total_variation)},
    };
    ctx.report["thresholds"] = {{"stationary_tol", tol}};
    auto os = ctx.csv("stationary.csv");
    write_measure_csv(os, stat.measure);
    auto es = ctx.csv("empirical.csv");
    write_measure_csv(es, emp);
}

// -------------------------------------------------------------- dichotomy

void run_dichotomy(Context& ctx, NodeReader& r)
{
    auto sys = load_system(ctx);
    DichotomyParams p;
    p.bins = r.count("bins", p.bins, 2, 1 << 20);
    p.symmetry_tol = r.number("symmetry_tol", p.symmetry_tol, 0.0, 1.0);
    p.invariance_tol = r.number("invariance_tol", p.invariance_tol, 0.0, 2.0);
    p.stationary_tol = r.number("stationary_tol", p.stationary_tol, 1e-15, 1.0);
    p.max_iter = r.count("max_iter", p.max_iter, 1, big_count);
    p.lyapunov_start = r.number("lyapunov_start", p.lyapunov_start, 0.0, 1.0);
    p.lyapunov_horizon = r.count("lyapunov_horizon", p.lyapunov_horizon, 100, big_count);
    p.lyapunov_paths = r.count("lyapunov_paths", p.lyapunov_paths, 2, 1'000'000);
    p.ue_starts = r.count("ue_starts", p.ue_starts, 2, 100000);
    p.ue_steps = r.count("ue_steps", p.ue_steps, 1, big_count);
    p.ue_spread_threshold = r.number("ue_spread_threshold", p.ue_spread_threshold, 0.0, 1.0);
    p.ue_stationary_threshold =
        r.number("ue_stationary_threshold", p.ue_stationary_threshold, 0.0, 1.0);
    r.finish();
    p.seed = ctx.seed;

    auto v = classify_dichotomy(sys, p);
    Json res;
    res["verdict"] = std::string(to_string(v.verdict));
    res["symmetric"] = v.symmetric;
    if (v.symmetry)
        res["symmetry"] = {{"reason", v.symmetry->reason},
                           {"witness", v.symmetry->witness ? Json(*v.symmetry->witness)
                                                           : Json(nullptr)}};
    res["invariant_measure_found"] = v.invariant_measure_found;
    res["invariance_residuals"] = v.invariance_residuals;
    res["stationary"] = convergence_json(v.stationary_convergence);
    if (v.lyapunov.n_paths > 0)
    {
        res["lyapunov"] = lyapunov_json(v.lyapunov);
        res["lyapunov_upper"] = v.lyapunov.value + 3.0 * v.lyapunov.std_error;
        res["ue_spread"] = v.ue_spread;
        res["stationary_vs_empirical"] = v.stationary_vs_empirical;
    }
    ctx.report["results"] = res;
    ctx.report["thresholds"] = {{"invariance_tol", p.invariance_tol},
                                {"ue_spread", p.ue_spread_threshold},
                                {"stationary_vs_empirical", p.ue_stationary_threshold},
                                {"lyapunov", "value + 3 SE < 0"}};
    auto os = ctx.csv("invariance_residuals.csv");
    os << "generator,tv_residual\n";
    for (std::size_t i = 0; i < v.invariance_residuals.size(); ++i)
        os << i << ',' << v.invariance_residuals[i] << '\n';
}

// -------------------------------------------------------------- contract

void run_contract(Context& ctx, NodeReader& r)
{
    auto sys = load_system(ctx);
    double x0 = r.number("start", 0.1234567, 0.0, 1.0);
    double half = r.number("half_width", 5e-4, 1e-12, 0.2499);
    auto n_traj = r.count("n_trajectories", 200, 1, 1'000'000);
    auto horizon = r.count("horizon", 10000, 10, big_count);
    std::optional<double> alpha_fixed;
    double alpha_fraction = 0.5;
    if (r.has("alpha_target"))
        alpha_fixed = r.number("alpha_target", 0.0, 1e-12, 1e6);
    else
        alpha_fraction = r.number("alpha_fraction", 0.5, 1e-6, 1.0);
    double required = r.number("required_fraction", 0.95, 0.0, 1.0);
    r.finish();

    Arc J{wrap_unit(x0), half};
    std::vector<ContractionCertificate> certs(n_traj);
    std::vector<char> rechecked(n_traj, 0);
    std::vector<double> slopes(n_traj, 0.0);
    for_each_index(n_traj, Execution::parallel, [&](std::size_t i) {
        auto traj = simulate_trajectory(sys, CirclePoint(x0), horizon, derive_seed(ctx.seed, i, 3));
        auto maps = map_sequence(sys, traj);
        double lam = traj.cocycle.back() / static_cast<double>(horizon);
        double alpha = alpha_fixed ? *alpha_fixed : (lam < 0.0 ? alpha_fraction * -lam : 1.0);
        auto cert = verify_contraction_lemma(maps, x0, alpha, J);
        rechecked[i] = recheck_certificate(cert, maps) ? 1 : 0;
        slopes[i] = -fit_contraction_log(cert.log_diameters).alpha;
        if (i != 0)
            cert.log_diameters.clear();
        certs[i] = std::move(cert);
    });

    std::size_t valid = 0, confirmed = 0;
    for (std::size_t i = 0; i < n_traj; ++i)
    {
        valid += certs[i].valid ? 1 : 0;
        confirmed += (certs[i].valid && rechecked[i]) ? 1 : 0;
    }
    auto ci = stats::wilson_interval(valid, n_traj);
    double fraction = static_cast<double>(valid) / static_cast<double>(n_traj);

    auto const& c0 = certs[0];
    Json first = {{"x0", c0.x0},
                  {"interval", {{"center", c0.interval.center}, {"half_width", c0.interval.half_width}}},
                  {"alpha", c0.alpha},
                  {"beta", c0.beta},
                  {"lambda_hat", c0.lambda_hat},
                  {"log_C", c0.log_C},
                  {"C", std::isfinite(c0.C) ? Json(c0.C) : Json("inf")},
                  {"horizon", c0.horizon},
                  {"valid", c0.valid},
                  {"reason", c0.reason},
                  {"log_diameters", c0.log_diameters}};
    ctx.report["results"] = {{"certified", valid},
                             {"rechecked", confirmed},
                             {"n_trajectories", n_traj},
                             {"certified_fraction", fraction},
                             {"wilson_low", ci.low},
                             {"wilson_high", ci.high},
                             {"passes", fraction >= required},
                             {"first_certificate", first}};
    ctx.report["thresholds"] = {{"required_fraction", required}};

    auto os = ctx.csv("certificates.csv");
    os << "trajectory,lambda_hat,alpha,beta,log_C,valid,rechecked,log_diameter_slope,reason\n";
    for (std::size_t i = 0; i < n_traj; ++i)
    {
        auto const& c = certs[i];
        os << i << ',' << c.lambda_hat << ',' << c.alpha << ',' << c.beta << ',' << c.log_C << ','
           << c.valid << ',' << static_cast<int>(rechecked[i]) << ',' << slopes[i] << ",\""
           << c.reason << "\"\n";
    }
    auto ds = ctx.csv("diameters.csv");
    ds << "step,log_diameter\n";
    for (std::size_t n = 0; n < c0.log_diameters.size(); ++n)
        ds << n << ',' << c0.log_diameters[n] << '\n';
}

// -------------------------------------------------------------- basin

void run_basin(Context& ctx, NodeReader& r)
{
    std::vector<Attractor> attractors;
    auto sys = load_system(ctx, attractors);
    if (attractors.empty())
        throw ConfigError(location(ctx.config["system"])
                          + "key 'system.attractors': basin needs at least one attractor");
    auto starts = r.numbers("starts", {0.25});
    auto horizon = r.count("horizon", 2000, 10, big_count);
    auto n_paths = r.count("n_paths", 2000, 1, 100'000'000);
    double radius = r.number("capture_radius", 0.01, 1e-12, 0.5);
    auto probes = r.numbers("probes", {0.1, 0.3, 0.5, 0.7, 0.9});
    auto target = r.count("harmonic_attractor", 0, 0, attractors.size() - 1);
    auto probe_paths = r.count("probe_paths", 4000, 2, 100'000'000);
    double max_unresolved = r.number("max_unresolved", 0.05, 0.0, 1.0);
    r.finish();

    Json rows = Json::array();
    auto os = ctx.csv("basin.csv");
    os << "start,label,count,probability,std_error,ci_low,ci_high\n";
    bool unresolved_ok = true;
    bool sums_ok = true;
    for (std::size_t s = 0; s < starts.size(); ++s)
    {
        auto est = estimate_basin_probabilities(sys, attractors, CirclePoint(starts[s]), horizon,
                                                n_paths, radius, derive_seed(ctx.seed, s, 4));
        std::size_t total = est.unresolved_count;
        Json probs = Json::object();
        for (std::size_t j = 0; j < est.labels.size(); ++j)
        {
            total += est.counts[j];
            probs[est.labels[j]] = {{"count", est.counts[j]},
                                    {"probability", est.probabilities[j]},
                                    {"std_error", est.std_errors[j]},
                                    {"ci", Json::array({est.ci_low[j], est.ci_high[j]})}};
            os << starts[s] << ',' << est.labels[j] << ',' << est.counts[j] << ','
               << est.probabilities[j] << ',' << est.std_errors[j] << ',' << est.ci_low[j] << ','
               << est.ci_high[j] << '\n';
        }
        os << starts[s] << ",unresolved," << est.unresolved_count << ',' << est.unresolved
           << ",,,\n";
        sums_ok = sums_ok && total == est.n_paths;
        unresolved_ok = unresolved_ok && est.unresolved < max_unresolved;
        rows.push_back({{"start", wrap_unit(starts[s])},
                        {"n_paths", est.n_paths},
                        {"probabilities", probs},
                        {"unresolved_count", est.unresolved_count},
                        {"unresolved", est.unresolved}});
    }

    auto harm = harmonicity_residuals(sys, attractors, target, probes, horizon, probe_paths,
                                      radius, derive_seed(ctx.seed, 1, 4));
    Json hj = Json::array();
    bool harm_ok = true;
    auto hs = ctx.csv("harmonicity.csv");
    hs << "theta,direct,averaged,sigma,within_3_sigma\n";
    for (auto const& h : harm)
    {
        harm_ok = harm_ok && h.within_3_sigma;
        hj.push_back({{"theta", h.theta},
                      {"direct", h.direct},
                      {"averaged", h.averaged},
                      {"sigma", h.sigma},
                      {"within_3_sigma", h.within_3_sigma}});
        hs << h.theta << ',' << h.direct << ',' << h.averaged << ',' << h.sigma << ','
           << h.within_3_sigma << '\n';
    }
    ctx.report["results"] = {{"starts", rows},
                             {"counts_sum_to_paths", sums_ok},
                             {"unresolved_below_threshold", unresolved_ok},
                             {"harmonicity_attractor", attractors[target].label},
                             {"harmonicity", hj},
                             {"harmonicity_within_3_sigma", harm_ok}};
    ctx.report["thresholds"] = {{"max_unresolved", max_unresolved}, {"harmonicity_sigmas", 3}};
}

// -------------------------------------------------------------- hyperbolic

HyperbolicParams load_hyperbolic(Context& ctx)
{
    Json echo;
    auto p = parse_hyperbolic(ctx.config["leaf"], echo);
    ctx.report["config"]["leaf"] = echo;
    return p;
}

void run_hyperbolic(Context& ctx, NodeReader& r)
{
    auto p = load_hyperbolic(ctx);
    double x0 = r.number("x0", 0.0, -1e300, 1e300);
    double y0 = r.number("y0", 1.0, 1e-300, 1e300);
    auto n_paths = r.count("n_paths", 100, 2, 100'000'000);
    auto v_paths = r.count("v_paths", 0, 0, 100'000'000);
    double v0 = r.number("v0", 0.0, -1e300, 1e300);
    double ks_level = r.number("ks_level", 0.01, 0.0, 1.0);
    r.finish();

    auto samples = leaf_lyapunov_samples(p, x0, y0, n_paths, ctx.seed);
    auto ms = stats::mean_and_se(samples);
    double expected = p.kappa - 1.0;
    Json res = {{"lyapunov",
                 lyapunov_json({ms.mean, ms.std_error, n_paths, p.steps(),
                                LyapunovEstimate::Method::trajectory})},
                {"expected", expected},
                {"abs_error", std::abs(ms.mean - expected)},
                {"within_3_se", std::abs(ms.mean - expected) <= 3.0 * ms.std_error}};
    ctx.report["thresholds"] = {{"lyapunov_sigmas", 3}};

    if (v_paths > 0)
    {
        auto direct = v_terminal_samples(p, v0, v_paths, derive_seed(ctx.seed, 1, 5), VMode::direct);
        auto via_xy =
            v_terminal_samples(p, v0, v_paths, derive_seed(ctx.seed, 2, 5), VMode::from_xy);
        auto ks = stats::ks_two_sample(direct, via_xy);
        res["v_terminal_ks"] = {{"n_paths", v_paths},
                                {"statistic", ks.statistic},
                                {"p_value", ks.p_value},
                                {"passes", ks.p_value > ks_level}};
        ctx.report["thresholds"]["ks_level"] = ks_level;
        auto vs = ctx.csv("v_terminal.csv");
        vs << "path,direct,from_xy\n";
        for (std::size_t i = 0; i < v_paths; ++i)
            vs << i << ',' << direct[i] << ',' << via_xy[i] << '\n';
    }
    ctx.report["results"] = res;

    auto ls = ctx.csv("leaf_lyapunov.csv");
    ls << "path,lambda\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
        ls << i << ',' << samples[i] << '\n';
    auto path = simulate_hyperbolic_path(p, x0, y0, derive_seed(ctx.seed, 0), p.steps_per_block());
    auto ps = ctx.csv("path.csv");
    write_path_csv(ps, path);
}

// -------------------------------------------------------------- xi

void run_xi(Context& ctx, NodeReader& r)
{
    auto p = load_hyperbolic(ctx);
    double xi0 = r.number("xi0", 0.0, -1e6, 1e6);
    auto bins = r.count("bins", 200, 2, 1 << 20);
    double window = r.number("window", 10.0, 1e-6, 700.0);
    auto n_runs = r.count("n_runs", 100, 1, 100'000'000);
    double w1_max = r.number("w1_threshold", 0.05, 0.0, 1e6);
    double escape_min = r.number("escape_fraction", 0.99, 0.0, 1.0);
    r.finish();

    if (p.kappa > 1.0)
    {
        auto rep = xi_stationarity_test(p, ctx.seed, xi0, bins, window);
        ctx.report["results"] = {{"regime", "stationary"},
                                 {"w1_to_density", rep.w1_to_density},
                                 {"w1_halves", rep.w1_halves},
                                 {"passes", rep.w1_to_density < w1_max && rep.w1_halves < w1_max}};
        ctx.report["thresholds"] = {{"w1", w1_max}};
        auto os = ctx.csv("xi_histogram.csv");
        os << "xi,empirical_second_half,empirical_first_half,density\n";
        double const h = 2.0 * window / static_cast<double>(bins);
        for (std::size_t b = 0; b < bins; ++b)
            os << -window + (static_cast<double>(b) + 0.5) * h << ',' << rep.empirical[b] << ','
               << rep.empirical_first[b] << ',' << rep.density[b] << '\n';
        return;
    }
    auto exits = xi_exit_times(p, n_runs, ctx.seed, xi0, window);
    std::size_t escaped = 0;
    std::vector<double> times;
    auto os = ctx.csv("xi_exit_times.csv");
    os << "run,exit_time\n";
    for (std::size_t i = 0; i < exits.size(); ++i)
    {
        os << i << ',';
        if (exits[i])
        {
            ++escaped;
            times.push_back(*exits[i]);
            os << *exits[i];
        }
        os << '\n';
    }
    double fraction = static_cast<double>(escaped) / static_cast<double>(n_runs);
    Json res = {{"regime", "escape"},
                {"n_runs", n_runs},
                {"escaped", escaped},
                {"escape_fraction", fraction},
                {"passes", fraction >= escape_min}};
    if (!times.empty())
    {
        std::sort(times.begin(), times.end());
        res["median_exit_time"] = times[times.size() / 2];
    }
    ctx.report["results"] = res;
    ctx.report["thresholds"] = {{"escape_fraction", escape_min}};
}

// -------------------------------------------------------------- lln

void run_lln(Context& ctx, NodeReader& r)
{
    auto p = load_hyperbolic(ctx);
    double x0 = r.number("x0", 0.0, -1e300, 1e300);
    double y0 = r.number("y0", 1.0, 1e-300, 1e300);
    auto n_samples = r.count("oracle_samples", 100000, 1, 100'000'000);
    double band = r.number("band", 0.1, 0.0, 1e6);
    r.finish();

    auto path = simulate_hyperbolic_path(p, x0, y0, ctx.seed, p.steps_per_block());
    auto rec = discretize_path(path, p.delta);
    auto ratios = rec.ratios();
    double const final_ratio = ratios.back();
    double dev = 0.0;
    double tail_max = 0.0;
    for (std::size_t n = ratios.size() / 2; n < ratios.size(); ++n)
    {
        dev = std::max(dev, std::abs(ratios[n] - final_ratio));
        tail_max = std::max(tail_max, ratios[n]);
    }
    double c = lln_constant(p, n_samples, derive_seed(ctx.seed, 1, 6));
    ctx.report["results"] = {{"n", ratios.size()},
                             {"final_ratio", final_ratio},
                             {"max_deviation_second_half", dev},
                             {"max_ratio_second_half", tail_max},
                             {"oracle_c", c},
                             {"within_band", dev <= band},
                             {"below_c", tail_max < c}};
    ctx.report["thresholds"] = {{"band", band}};
    auto os = ctx.csv("lln.csv");
    os << "n,distance,k,K,ratio\n";
    for (std::size_t n = 0; n < ratios.size(); ++n)
        os << n + 1 << ',' << rec.distance[n] << ',' << rec.k[n] << ',' << rec.K[n] << ','
           << ratios[n] << '\n';
}

using Runner = void (*)(Context&, NodeReader&);

std::map<std::string, Runner> const& runners()
{
    static std::map<std::string, Runner> const table = {
        {"basin", run_basin},         {"contract", run_contract}, {"dichotomy", run_dichotomy},
        {"hyperbolic", run_hyperbolic}, {"lln", run_lln},         {"lyapunov", run_lyapunov},
        {"stationary", run_stationary}, {"xi", run_xi},
    };
    return table;
}

void require_finite(Json const& j, std::string const& path)
{
    if (j.is_number_float() && !std::isfinite(j.get<double>()))
        throw NumericalFailure("non-finite value at " + path);
    if (j.is_object())
        for (auto it = j.begin(); it != j.end(); ++it)
            require_finite(it.value(), path + "." + it.key());
    if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i)
            require_finite(j[i], path + "[" + std::to_string(i) + "]");
}

std::string utc_timestamp()
{
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

std::vector<std::string> const& subcommand_names()
{
    static std::vector<std::string> const names = [] {
        std::vector<std::string> n;
        for (auto const& [k, _] : runners())
            n.push_back(k);
        return n;
    }();
    return names;
}

Json run_subcommand(std::string const& subcommand, YAML::Node const& config, std::uint64_t seed,
                    std::string const& out_dir)
{
    auto it = runners().find(subcommand);
    if (it == runners().end())
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    if (!config.IsMap())
        throw ConfigError(location(config) + "top level: expected a mapping");
    for (auto const& kv : config)
    {
        auto key = kv.first.as<std::string>();
        if (key != "system" && key != "leaf" && !runners().count(key))
            throw ConfigError(location(kv.first) + "unknown key '" + key + "'");
    }

    fs::create_directories(out_dir);
    Context ctx{config, seed, fs::path(out_dir), Json::object()};
    ctx.report["tool"] = tool_name;
    ctx.report["version"] = tool_version;
    ctx.report["subcommand"] = subcommand;
    ctx.report["seed"] = seed;
    ctx.report["config"] = Json::object();
    ctx.report["files"] = Json::array();

    Json params;
    NodeReader reader(config[subcommand], subcommand, params);
    try
    {
        it->second(ctx, reader);
    }
    catch (std::invalid_argument const& e)
    {
        // argument checks inside the library that the config schema lets through
        throw ConfigError(std::string("key '") + subcommand + "': " + e.what());
    }
    ctx.report["config"][subcommand] = params;
    require_finite(ctx.report["results"], "results");

    // fixed key order regardless of which block was filled first
    Json ordered;
    for (auto const* k : {"tool", "version", "subcommand", "seed", "config", "results",
                          "thresholds", "files"})
        ordered[k] = ctx.report[k];
    return ordered;
}

std::string canonical_report(Json const& report)
{
    Json copy = report;
    copy.erase("run");
    return copy.dump(2);
}

int run_experiment(RunOptions const& opts, std::ostream& err)
{
    try
    {
        if (opts.threads)
            set_thread_count(*opts.threads);
        auto config = load_config_file(opts.config_path);
        auto report = run_subcommand(opts.subcommand, config, opts.seed, opts.out_dir);
        report["run"] = {{"timestamp", utc_timestamp()}, {"threads", max_threads()}};
        std::ofstream os(fs::path(opts.out_dir) / "report.json");
        os << report.dump(2) << '\n';
        if (!os)
        {
            err << "error: cannot write report.json\n";
            return exit_numerical_failure;
        }
        return exit_ok;
    }
    catch (ConfigError const& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_invalid_config;
    }
    catch (NumericalFailure const& e)
    {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical_failure;
    }
    catch (std::exception const& e)
    {
        err << "internal error: " << e.what() << '\n';
        return exit_numerical_failure;
    }
}

}  // namespace rcd
