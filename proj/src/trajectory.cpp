#include "rcd/trajectory.hpp"

#include <ostream>
#include <stdexcept>

namespace rcd {

TrajectoryRecord simulate_trajectory(GeneratorSystem const& sys, CirclePoint start,
                                     std::size_t steps, std::uint64_t seed)
{
    TrajectoryRecord rec;
    rec.seed = seed;
    rec.start = start;
    rec.indices.reserve(steps);
    rec.points.reserve(steps + 1);
    rec.cocycle.reserve(steps + 1);
    rec.points.push_back(start);
    rec.cocycle.push_back(0.0);

    Engine rng = make_engine(seed);
    CirclePoint p = start;
    double L = 0.0;
    for (std::size_t j = 0; j < steps; ++j)
    {
        Step s = sample_step(sys, p, rng);
        L += s.log_derivative;
        p = s.next;
        rec.indices.push_back(s.index);
        rec.points.push_back(p);
        rec.cocycle.push_back(L);
    }
    return rec;
}

TrajectoryRecord shift(TrajectoryRecord const& traj, GeneratorSystem const& sys, std::size_t m)
{
    if (m > traj.steps())
        throw std::out_of_range("shift beyond trajectory length");
    TrajectoryRecord out;
    out.seed = traj.seed;
    out.start = traj.points[m];
    out.indices.assign(traj.indices.begin() + static_cast<std::ptrdiff_t>(m), traj.indices.end());
    out.points.assign(traj.points.begin() + static_cast<std::ptrdiff_t>(m), traj.points.end());
    out.cocycle.reserve(out.points.size());
    double L = 0.0;
    out.cocycle.push_back(L);
    for (std::size_t j = 0; j < out.indices.size(); ++j)
    {
        L += log_derivative(sys.generator(out.indices[j]), out.points[j]);
        out.cocycle.push_back(L);
    }
    return out;
}

double Observable::operator()(CirclePoint p) const noexcept
{
    double t = p.theta();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (kind)
    {
    case Kind::constant:
        return a;
    case Kind::cosine:
        return std::cos(two_pi * k * t);
    case Kind::sine:
        return std::sin(two_pi * k * t);
    case Kind::arc:
        return wrap_unit(t - a) < wrap_unit(b - a) ? 1.0 : 0.0;
    case Kind::distance_to:
        return circle_distance(t, a);
    }
    return 0.0;
}

double birkhoff_average(TrajectoryRecord const& traj, Observable const& f)
{
    std::size_t const n = traj.steps();
    if (n == 0)
        throw std::invalid_argument("birkhoff_average needs at least one step");
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
        s += f(traj.points[j]);
    return s / static_cast<double>(n);
}

GridMeasure empirical_measure(TrajectoryRecord const& traj, std::size_t bins)
{
    if (bins < 2)
        throw std::invalid_argument("empirical_measure needs at least 2 bins");
    if (traj.steps() == 0)
        throw std::invalid_argument("empirical_measure needs at least one step");
    std::vector<double> counts(bins, 0.0);
    GridMeasure const grid = GridMeasure::uniform(bins);
    for (std::size_t j = 1; j < traj.points.size(); ++j)
        counts[grid.bin_of(traj.points[j].theta())] += 1.0;
    return GridMeasure(std::move(counts));
}

void write_trajectory_csv(std::ostream& os, TrajectoryRecord const& traj)
{
    os << "step,index,theta,cocycle\n";
    os.precision(17);
    for (std::size_t j = 0; j < traj.points.size(); ++j)
    {
        os << j << ',';
        if (j > 0)
            os << traj.indices[j - 1];
        os << ',' << traj.points[j].theta() << ',' << traj.cocycle[j] << '\n';
    }
}

}  // namespace rcd
