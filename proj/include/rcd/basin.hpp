#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcd/parallel.hpp"
#include "rcd/random_system.hpp"

namespace rcd {

/// A declared attractor: a finite set of circle points (fixed or periodic).
struct Attractor
{
    std::string label;
    std::vector<double> points;
};

struct BasinEstimate
{
    std::vector<std::string> labels;
    std::vector<std::size_t> counts;
    std::vector<double> probabilities;
    std::vector<double> std_errors;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::size_t unresolved_count = 0;
    double unresolved = 0.0;
    std::size_t n_paths = 0;
};

/// Attractor index of one path of `horizon` steps, judged on its last 10% of
/// points: captured if every tail point lies within capture_radius of the
/// attractor, or failing that if the distance to the attractor decreases
/// monotonically over the tail and ends within capture_radius.
std::optional<std::size_t> label_path(GeneratorSystem const& sys,
                                      std::span<Attractor const> attractors, CirclePoint start,
                                      std::size_t horizon, double capture_radius, Engine& rng);

/// Monte Carlo attraction probabilities from `start`; path i uses
/// derive_seed(seed, i). Throws std::invalid_argument if the attractor list
/// is empty or capture_radius <= 0.
BasinEstimate estimate_basin_probabilities(GeneratorSystem const& sys,
                                           std::span<Attractor const> attractors,
                                           CirclePoint start, std::size_t horizon,
                                           std::size_t n_paths, double capture_radius,
                                           std::uint64_t seed,
                                           Execution exec = Execution::parallel);

struct HarmonicityProbe
{
    double theta = 0.0;
    double direct = 0.0;    // p_j(x)
    double averaged = 0.0;  // sum_i weight_i(x) p_j(g_i x)
    double sigma = 0.0;     // combined Monte Carlo standard error
    bool within_3_sigma = false;
};

/// Checks the discrete harmonicity p_j = D p_j at each probe point by
/// estimating both sides with independent ensembles.
std::vector<HarmonicityProbe> harmonicity_residuals(GeneratorSystem const& sys,
                                                    std::span<Attractor const> attractors,
                                                    std::size_t attractor,
                                                    std::span<double const> probes,
                                                    std::size_t horizon, std::size_t n_paths,
                                                    double capture_radius, std::uint64_t seed,
                                                    Execution exec = Execution::parallel);

}  // namespace rcd
