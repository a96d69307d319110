#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rcd/grid_measure.hpp"
#include "rcd/random_system.hpp"

namespace rcd {

/// One sampled random composition. points has steps()+1 entries and
/// cocycle[j] is the log-derivative of the first j maps at start.
struct TrajectoryRecord
{
    std::uint64_t seed = 0;
    CirclePoint start;
    std::vector<std::size_t> indices;
    std::vector<CirclePoint> points;
    std::vector<double> cocycle;

    std::size_t steps() const noexcept { return indices.size(); }
};

TrajectoryRecord simulate_trajectory(GeneratorSystem const& sys, CirclePoint start,
                                     std::size_t steps, std::uint64_t seed);

/// The shifted path sigma^m: same generator choices from points[m] on, with
/// the cocycle re-accumulated from zero by evaluating the maps again.
TrajectoryRecord shift(TrajectoryRecord const& traj, GeneratorSystem const& sys, std::size_t m);

/// Built-in observables on the circle.
struct Observable
{
    enum class Kind
    {
        constant,
        cosine,       // cos(2 pi k theta)
        sine,         // sin(2 pi k theta)
        arc,          // indicator of the forward arc [lo, hi)
        distance_to,  // circle distance to a point
    };

    Kind kind = Kind::constant;
    double a = 1.0;
    double b = 0.0;
    int k = 1;

    static Observable constant(double c) { return {Kind::constant, c, 0.0, 0}; }
    static Observable cosine(int k) { return {Kind::cosine, 0.0, 0.0, k}; }
    static Observable sine(int k) { return {Kind::sine, 0.0, 0.0, k}; }
    static Observable arc(double lo, double hi) { return {Kind::arc, lo, hi, 0}; }
    static Observable distance_to(double p) { return {Kind::distance_to, p, 0.0, 0}; }

    double operator()(CirclePoint p) const noexcept;
};

/// (1/n) sum_{j=1..n} f(points[j]). Throws if the trajectory has no steps.
double birkhoff_average(TrajectoryRecord const& traj, Observable const& f);

/// Occupation histogram of points[1..n].
GridMeasure empirical_measure(TrajectoryRecord const& traj, std::size_t bins);

/// CSV with header step,index,theta,cocycle; step 0 has an empty index.
void write_trajectory_csv(std::ostream& os, TrajectoryRecord const& traj);

}  // namespace rcd
