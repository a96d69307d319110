#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace rcd {

/// Probability measure on R/Z discretized on `bins` uniform bins; bin i covers
/// [i/bins, (i+1)/bins).
class GridMeasure
{
  public:
    /// Normalizes `mass` to total one; throws std::invalid_argument on an
    /// empty grid, fewer than two bins, negative or non-finite entries, or
    /// zero total mass.
    explicit GridMeasure(std::vector<double> mass);

    static GridMeasure uniform(std::size_t bins);
    static GridMeasure dirac(std::size_t bins, double theta);

    std::size_t bins() const noexcept { return mass_.size(); }
    std::span<double const> mass() const noexcept { return mass_; }
    double operator[](std::size_t i) const { return mass_[i]; }

    double bin_width() const noexcept { return 1.0 / static_cast<double>(bins()); }
    double bin_center(std::size_t i) const noexcept
    {
        return (static_cast<double>(i) + 0.5) * bin_width();
    }
    std::size_t bin_of(double theta) const noexcept;

    /// Sum of masses (one up to rounding).
    double total() const noexcept;

  private:
    std::vector<double> mass_;
};

enum class DistanceKind
{
    wasserstein1_circle,
    total_variation
};

/// Total variation (1/2) sum |m1 - m2|, or the circular Wasserstein-1
/// distance min_s sum_k |F1(k) - F2(k) - s| / bins. Throws on bin mismatch.
double measure_distance(GridMeasure const& m1, GridMeasure const& m2, DistanceKind kind);

/// CSV with header bin_center,mass.
void write_measure_csv(std::ostream& os, GridMeasure const& m);

}  // namespace rcd
