#include "rcd/grid_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rcd/circle_map.hpp"

namespace rcd {

GridMeasure::GridMeasure(std::vector<double> mass) : mass_(std::move(mass))
{
    if (mass_.size() < 2)
        throw std::invalid_argument("grid measure needs at least 2 bins");
    double sum = 0.0;
    for (double m : mass_)
    {
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument("grid measure masses must be finite and non-negative");
        sum += m;
    }
    if (!(sum > 0.0))
        throw std::invalid_argument("grid measure has zero total mass");
    for (double& m : mass_)
        m /= sum;
}

GridMeasure GridMeasure::uniform(std::size_t bins)
{
    return GridMeasure(std::vector<double>(bins, 1.0));
}

GridMeasure GridMeasure::dirac(std::size_t bins, double theta)
{
    std::vector<double> mass(bins, 0.0);
    if (bins < 2)
        throw std::invalid_argument("grid measure needs at least 2 bins");
    auto i = static_cast<std::size_t>(wrap_unit(theta) * static_cast<double>(bins));
    mass[std::min(i, bins - 1)] = 1.0;
    return GridMeasure(std::move(mass));
}

std::size_t GridMeasure::bin_of(double theta) const noexcept
{
    auto i = static_cast<std::size_t>(wrap_unit(theta) * static_cast<double>(bins()));
    return std::min(i, bins() - 1);
}

double GridMeasure::total() const noexcept
{
    return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

double measure_distance(GridMeasure const& m1, GridMeasure const& m2, DistanceKind kind)
{
    if (m1.bins() != m2.bins())
        throw std::invalid_argument("measure_distance: bin count mismatch ("
                                    + std::to_string(m1.bins()) + " vs "
                                    + std::to_string(m2.bins()) + ")");
    std::size_t const n = m1.bins();
    if (kind == DistanceKind::total_variation)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += std::abs(m1[i] - m2[i]);
        return 0.5 * s;
    }
    // The optimal shift is a median of the cumulative differences.
    std::vector<double> diff(n);
    double f1 = 0.0;
    double f2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        f1 += m1[i];
        f2 += m2[i];
        diff[i] = f1 - f2;
    }
    std::vector<double> sorted = diff;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     sorted.end());
    double shift = sorted[n / 2];
    double w = 0.0;
    for (double d : diff)
        w += std::abs(d - shift);
    return w / static_cast<double>(n);
}

void write_measure_csv(std::ostream& os, GridMeasure const& m)
{
    os << "bin_center,mass\n";
    os.precision(17);
    for (std::size_t i = 0; i < m.bins(); ++i)
        os << m.bin_center(i) << ',' << m[i] << '\n';
}

}  // namespace rcd
