#include "rcd/basin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcd/stats.hpp"

namespace rcd {

namespace {

double distance_to_set(double theta, Attractor const& a)
{
    double d = std::numeric_limits<double>::infinity();
    for (double p : a.points)
        d = std::min(d, circle_distance(theta, p));
    return d;
}

void validate(std::span<Attractor const> attractors, double capture_radius)
{
    if (attractors.empty())
        throw std::invalid_argument("attractors: list is empty");
    for (auto const& a : attractors)
        if (a.points.empty())
            throw std::invalid_argument("attractors: attractor '" + a.label + "' has no points");
    if (!(capture_radius > 0.0))
        throw std::invalid_argument("capture_radius must be positive");
}

}  // namespace

std::optional<std::size_t> label_path(GeneratorSystem const& sys,
                                      std::span<Attractor const> attractors, CirclePoint start,
                                      std::size_t horizon, double capture_radius, Engine& rng)
{
    std::size_t const na = attractors.size();
    std::size_t const tail_start = horizon - horizon / 10;
    std::vector<char> inside(na, 1);
    std::vector<char> monotone(na, 1);
    std::vector<double> last(na, std::numeric_limits<double>::infinity());

    CirclePoint p = start;
    for (std::size_t j = 1; j <= horizon; ++j)
    {
        p = sample_step(sys, p, rng).next;
        if (j < tail_start)
            continue;
        for (std::size_t a = 0; a < na; ++a)
        {
            double d = distance_to_set(p.theta(), attractors[a]);
            inside[a] = inside[a] && d <= capture_radius;
            monotone[a] = monotone[a] && d <= last[a];
            last[a] = d;
        }
    }

    auto closest = [&](std::vector<char> const& ok) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t a = 0; a < na; ++a)
            if (ok[a] && last[a] <= capture_radius && (!best || last[a] < last[*best]))
                best = a;
        return best;
    };
    if (auto a = closest(inside))
        return a;
    return closest(monotone);
}

BasinEstimate estimate_basin_probabilities(GeneratorSystem const& sys,
                                           std::span<Attractor const> attractors,
                                           CirclePoint start, std::size_t horizon,
                                           std::size_t n_paths, double capture_radius,
                                           std::uint64_t seed, Execution exec)
{
    validate(attractors, capture_radius);
    if (n_paths == 0 || horizon == 0)
        throw std::invalid_argument("basin estimate needs positive horizon and n_paths");

    constexpr std::size_t unresolved_tag = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> labels(n_paths);
    for_each_index(n_paths, exec, [&](std::size_t i) {
        Engine rng = make_engine(derive_seed(seed, i));
        labels[i] = label_path(sys, attractors, start, horizon, capture_radius, rng)
                        .value_or(unresolved_tag);
    });

    BasinEstimate est;
    est.n_paths = n_paths;
    est.counts.assign(attractors.size(), 0);
    for (std::size_t l : labels)
    {
        if (l == unresolved_tag)
            ++est.unresolved_count;
        else
            ++est.counts[l];
    }
    double const n = static_cast<double>(n_paths);
    for (std::size_t a = 0; a < attractors.size(); ++a)
    {
        double p = static_cast<double>(est.counts[a]) / n;
        auto ci = stats::wilson_interval(est.counts[a], n_paths);
        est.labels.push_back(attractors[a].label);
        est.probabilities.push_back(p);
        est.std_errors.push_back(std::sqrt(p * (1.0 - p) / n));
        est.ci_low.push_back(ci.low);
        est.ci_high.push_back(ci.high);
    }
    est.unresolved = static_cast<double>(est.unresolved_count) / n;
    return est;
}

std::vector<HarmonicityProbe> harmonicity_residuals(GeneratorSystem const& sys,
                                                    std::span<Attractor const> attractors,
                                                    std::size_t attractor,
                                                    std::span<double const> probes,
                                                    std::size_t horizon, std::size_t n_paths,
                                                    double capture_radius, std::uint64_t seed,
                                                    Execution exec)
{
    if (attractor >= attractors.size())
        throw std::invalid_argument("harmonicity: attractor index out of range");
    std::vector<HarmonicityProbe> out;
    std::vector<double> w(sys.size());
    std::uint64_t stream = 0;
    auto next_seed = [&] { return derive_seed(seed, stream++, 2); };
    for (double x : probes)
    {
        HarmonicityProbe h;
        h.theta = wrap_unit(x);
        auto direct = estimate_basin_probabilities(sys, attractors, CirclePoint(x), horizon,
                                                   n_paths, capture_radius, next_seed(), exec);
        h.direct = direct.probabilities[attractor];
        double var = direct.std_errors[attractor] * direct.std_errors[attractor];
        sys.weights_at(h.theta, w);
        for (std::size_t i = 0; i < sys.size(); ++i)
        {
            CirclePoint image = apply(sys.generator(i), CirclePoint(x));
            auto e = estimate_basin_probabilities(sys, attractors, image, horizon, n_paths,
                                                  capture_radius, next_seed(), exec);
            h.averaged += w[i] * e.probabilities[attractor];
            var += w[i] * w[i] * e.std_errors[attractor] * e.std_errors[attractor];
        }
        h.sigma = std::sqrt(var);
        h.within_3_sigma = std::abs(h.direct - h.averaged) <= 3.0 * h.sigma;
        out.push_back(h);
    }
    return out;
}

}  // namespace rcd
