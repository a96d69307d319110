#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rcd/grid_measure.hpp"
#include "rcd/parallel.hpp"
#include "rcd/random_system.hpp"

namespace rcd {

/// Stratified subsamples per bin used by the Ulam discretization and by the
/// Lyapunov quadrature.
inline constexpr int ulam_subsamples = 16;

/// Midpoint of stratum s of bin i on a grid with `bins` bins.
inline double subsample_point(std::size_t i, int s, std::size_t bins) noexcept
{
    return (static_cast<double>(i) + (s + 0.5) / ulam_subsamples) / static_cast<double>(bins);
}

/// Ulam discretization of a pushforward: a row-stochastic sparse matrix stored
/// by source bin.
class TransferOperator
{
  public:
    struct Entry
    {
        std::uint32_t target;
        double weight;
    };

    TransferOperator(std::size_t bins, std::vector<std::vector<Entry>> rows);

    std::size_t bins() const noexcept { return bins_; }
    std::size_t nonzeros() const noexcept { return entries_.size(); }
    std::span<Entry const> row(std::size_t source) const noexcept
    {
        return {entries_.data() + offsets_[source], offsets_[source + 1] - offsets_[source]};
    }

    /// out = pushforward of in (unnormalized; total mass is preserved up to
    /// rounding).
    void apply(std::span<double const> in, std::span<double> out) const;
    GridMeasure apply(GridMeasure const& m) const;

  private:
    std::size_t bins_;
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
};

/// Averaged pushforward D_* m = sum_i weight_i (g_i)_* m. Assembly is
/// parallel over source bins.
TransferOperator assemble_diffusion(GeneratorSystem const& sys, std::size_t bins,
                                    Execution exec = Execution::parallel);
/// Pushforward by a single map.
TransferOperator assemble_pushforward(CircleMap const& g, std::size_t bins,
                                      Execution exec = Execution::parallel);

GridMeasure apply_diffusion(GeneratorSystem const& sys, GridMeasure const& m);

struct ConvergenceReport
{
    std::size_t iterations = 0;
    double gap = 0.0;
    double tolerance = 0.0;
    bool converged = false;
};

struct StationaryResult
{
    GridMeasure measure;
    ConvergenceReport report;
};

inline constexpr std::size_t default_bins = 512;
inline constexpr double default_stationary_tol = 1e-8;
inline constexpr std::size_t default_max_iter = 100000;
inline constexpr double default_invariance_tol = 1e-2;

/// Power iteration of the averaged pushforward from the uniform measure
/// until the total-variation gap between successive iterates is <= tol.
StationaryResult stationary_measure(TransferOperator const& op, double tol, std::size_t max_iter);
StationaryResult stationary_measure(GeneratorSystem const& sys, std::size_t bins, double tol,
                                    std::size_t max_iter);

struct InvariantMeasureResult
{
    /// Present iff every per-generator residual is within tolerance.
    std::optional<GridMeasure> measure;
    GridMeasure averaged_fixed_point;
    ConvergenceReport convergence;
    /// ||(g_i)_* m - m||_TV for each generator.
    std::vector<double> residuals;
    double tolerance = 0.0;

    double max_residual() const noexcept;
};

/// Looks for a measure invariant under every generator separately. Requires
/// constant weights (throws std::invalid_argument otherwise).
InvariantMeasureResult detect_invariant_measure(GeneratorSystem const& sys, std::size_t bins,
                                                double tol,
                                                double stationary_tol = default_stationary_tol,
                                                std::size_t max_iter = default_max_iter);

}  // namespace rcd
