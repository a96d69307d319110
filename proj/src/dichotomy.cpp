#include "rcd/dichotomy.hpp"

#include <algorithm>

namespace rcd {

std::string_view to_string(Verdict v) noexcept
{
    switch (v)
    {
    case Verdict::invariant_measure:
        return "InvariantMeasure";
    case Verdict::negative_exponent_uniquely_ergodic:
        return "NegativeExponentUniquelyErgodic";
    case Verdict::non_symmetric_inconclusive:
        return "NonSymmetricInconclusive";
    case Verdict::inconclusive:
        return "Inconclusive";
    }
    return "Inconclusive";
}

std::vector<GridMeasure> empirical_from_starts(GeneratorSystem const& sys, std::size_t starts,
                                               std::size_t steps, std::size_t bins,
                                               std::uint64_t seed, Execution exec)
{
    std::vector<std::vector<double>> counts(starts, std::vector<double>(bins, 0.0));
    GridMeasure const grid = GridMeasure::uniform(bins);
    for_each_index(starts, exec, [&](std::size_t k) {
        Engine rng = make_engine(derive_seed(seed, k, 1));
        CirclePoint p((static_cast<double>(k) + 0.5) / static_cast<double>(starts));
        auto& c = counts[k];
        for (std::size_t j = 0; j < steps; ++j)
        {
            p = sample_step(sys, p, rng).next;
            c[grid.bin_of(p.theta())] += 1.0;
        }
    });
    std::vector<GridMeasure> out;
    out.reserve(starts);
    for (auto& c : counts)
        out.emplace_back(std::move(c));
    return out;
}

DichotomyVerdict classify_dichotomy(GeneratorSystem const& sys, DichotomyParams const& params)
{
    DichotomyVerdict v;
    v.params = params;
    std::optional<GridMeasure> stationary;

    if (sys.has_constant_weights())
    {
        v.symmetry = check_symmetry(sys, params.symmetry_tol);
        v.symmetric = v.symmetry->is_symmetric;
        auto inv = detect_invariant_measure(sys, params.bins, params.invariance_tol,
                                            params.stationary_tol, params.max_iter);
        v.invariance_residuals = inv.residuals;
        v.invariant_measure_found = inv.measure.has_value();
        v.stationary_convergence = inv.convergence;
        stationary = inv.averaged_fixed_point;
    }

    v.lyapunov = estimate_lyapunov_trajectory(sys, CirclePoint(params.lyapunov_start),
                                              params.lyapunov_horizon, params.lyapunov_paths,
                                              params.seed);

    if (!stationary)
    {
        auto st = stationary_measure(sys, params.bins, params.stationary_tol, params.max_iter);
        v.stationary_convergence = st.report;
        stationary = st.measure;
    }
    auto empirical = empirical_from_starts(sys, params.ue_starts, params.ue_steps, params.bins,
                                           params.seed);
    for (std::size_t i = 0; i < empirical.size(); ++i)
    {
        v.stationary_vs_empirical = std::max(
            v.stationary_vs_empirical,
            measure_distance(*stationary, empirical[i], DistanceKind::wasserstein1_circle));
        for (std::size_t j = i + 1; j < empirical.size(); ++j)
            v.ue_spread = std::max(v.ue_spread,
                                   measure_distance(empirical[i], empirical[j],
                                                    DistanceKind::wasserstein1_circle));
    }

    bool const negative = v.lyapunov.value + 3.0 * v.lyapunov.std_error < 0.0;
    bool const uniquely_ergodic = v.ue_spread < params.ue_spread_threshold
                                  && v.stationary_vs_empirical < params.ue_stationary_threshold;

    if (v.symmetric && v.invariant_measure_found)
        v.verdict = Verdict::invariant_measure;
    else if (negative && uniquely_ergodic)
        v.verdict = Verdict::negative_exponent_uniquely_ergodic;
    else if (v.symmetric)
        v.verdict = Verdict::inconclusive;
    else
        v.verdict = Verdict::non_symmetric_inconclusive;
    return v;
}

}  // namespace rcd
