#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rcd/grid_measure.hpp"
#include "rcd/lyapunov.hpp"
#include "rcd/measure.hpp"
#include "rcd/random_system.hpp"

namespace rcd {

struct DichotomyParams
{
    std::size_t bins = default_bins;
    double symmetry_tol = 1e-12;
    double invariance_tol = default_invariance_tol;
    double stationary_tol = default_stationary_tol;
    std::size_t max_iter = default_max_iter;

    double lyapunov_start = 0.1234567;
    std::size_t lyapunov_horizon = 10000;
    std::size_t lyapunov_paths = 32;

    std::size_t ue_starts = 10;
    std::size_t ue_steps = 1000000;
    double ue_spread_threshold = 0.03;
    double ue_stationary_threshold = 0.02;

    std::uint64_t seed = 0;
};

enum class Verdict
{
    invariant_measure,
    negative_exponent_uniquely_ergodic,
    non_symmetric_inconclusive,
    inconclusive
};

std::string_view to_string(Verdict v) noexcept;

struct DichotomyVerdict
{
    Verdict verdict = Verdict::inconclusive;

    /// Empty when the weighting does not support the symmetry check.
    std::optional<SymmetryReport> symmetry;
    bool symmetric = false;

    /// Per-generator TV residuals; empty for point-dependent weights.
    std::vector<double> invariance_residuals;
    bool invariant_measure_found = false;
    ConvergenceReport stationary_convergence;

    LyapunovEstimate lyapunov;

    /// Max pairwise W1 among empirical measures from equispaced starts.
    double ue_spread = 0.0;
    /// Max W1 between the stationary measure and those empirical measures.
    double stationary_vs_empirical = 0.0;

    DichotomyParams params;
};

/// Empirical occupation measures of `steps`-long paths from the starting
/// points (k + 1/2) / starts, k = 0..starts-1. Path k uses
/// derive_seed(seed, k, 1).
std::vector<GridMeasure> empirical_from_starts(GeneratorSystem const& sys, std::size_t starts,
                                               std::size_t steps, std::size_t bins,
                                               std::uint64_t seed,
                                               Execution exec = Execution::parallel);

/// Symmetry check, per-generator invariance, Lyapunov sign and a
/// unique-ergodicity probe combined into one verdict:
///  - symmetric and a common invariant measure: InvariantMeasure;
///  - lambda + 3 SE < 0 and both W1 probes below threshold:
///    NegativeExponentUniquelyErgodic;
///  - otherwise Inconclusive (symmetric) or NonSymmetricInconclusive.
DichotomyVerdict classify_dichotomy(GeneratorSystem const& sys, DichotomyParams const& params);

}  // namespace rcd
