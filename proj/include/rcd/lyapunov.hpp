#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rcd/grid_measure.hpp"
#include "rcd/parallel.hpp"
#include "rcd/random_system.hpp"

namespace rcd {

struct LyapunovEstimate
{
    enum class Method
    {
        trajectory,
        formula
    };

    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t horizon = 0;
    Method method = Method::trajectory;
};

std::string_view to_string(LyapunovEstimate::Method m) noexcept;

/// L_horizon / horizon for each path; path i uses seed derive_seed(seed, i).
/// Only the cocycle is accumulated, no trajectory is stored.
std::vector<double> lyapunov_samples(GeneratorSystem const& sys, CirclePoint start,
                                     std::size_t horizon, std::size_t n_paths,
                                     std::uint64_t seed, Execution exec = Execution::parallel);

/// Mean and standard error of L_horizon / horizon over the ensemble. Throws
/// std::invalid_argument unless horizon >= 100 and n_paths >= 2.
LyapunovEstimate estimate_lyapunov_trajectory(GeneratorSystem const& sys, CirclePoint start,
                                              std::size_t horizon, std::size_t n_paths,
                                              std::uint64_t seed,
                                              Execution exec = Execution::parallel);

struct FormulaEstimate
{
    double value = 0.0;
    /// sum_b m_b (max - min) of the integrand over the subsamples of bin b.
    double quadrature_bound = 0.0;
};

/// Integral of sum_i weight_i(theta) log g_i'(theta) against m, evaluated with
/// the Ulam subsamples inside every bin.
FormulaEstimate lyapunov_from_formula(GeneratorSystem const& sys, GridMeasure const& m);

}  // namespace rcd
