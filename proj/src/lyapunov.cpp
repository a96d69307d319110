#include "rcd/lyapunov.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "rcd/measure.hpp"
#include "rcd/stats.hpp"

namespace rcd {

std::string_view to_string(LyapunovEstimate::Method m) noexcept
{
    return m == LyapunovEstimate::Method::trajectory ? "trajectory" : "formula";
}

std::vector<double> lyapunov_samples(GeneratorSystem const& sys, CirclePoint start,
                                     std::size_t horizon, std::size_t n_paths,
                                     std::uint64_t seed, Execution exec)
{
    std::vector<double> out(n_paths);
    for_each_index(n_paths, exec, [&](std::size_t i) {
        Engine rng = make_engine(derive_seed(seed, i));
        CirclePoint p = start;
        double L = 0.0;
        for (std::size_t j = 0; j < horizon; ++j)
        {
            Step s = sample_step(sys, p, rng);
            L += s.log_derivative;
            p = s.next;
        }
        out[i] = L / static_cast<double>(horizon);
    });
    return out;
}

LyapunovEstimate estimate_lyapunov_trajectory(GeneratorSystem const& sys, CirclePoint start,
                                              std::size_t horizon, std::size_t n_paths,
                                              std::uint64_t seed, Execution exec)
{
    if (horizon < 100)
        throw std::invalid_argument("lyapunov horizon must be at least 100");
    if (n_paths < 2)
        throw std::invalid_argument("lyapunov estimate needs at least 2 paths");
    auto samples = lyapunov_samples(sys, start, horizon, n_paths, seed, exec);
    auto ms = stats::mean_and_se(samples);
    return {ms.mean, ms.std_error, n_paths, horizon, LyapunovEstimate::Method::trajectory};
}

FormulaEstimate lyapunov_from_formula(GeneratorSystem const& sys, GridMeasure const& m)
{
    std::size_t const bins = m.bins();
    std::vector<double> w(sys.size());
    FormulaEstimate est;
    for (std::size_t b = 0; b < bins; ++b)
    {
        if (m[b] == 0.0)
            continue;
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int s = 0; s < ulam_subsamples; ++s)
        {
            double theta = subsample_point(b, s, bins);
            sys.weights_at(theta, w);
            double f = 0.0;
            for (std::size_t i = 0; i < sys.size(); ++i)
                f += w[i] * log_derivative(sys.generator(i), CirclePoint(theta));
            sum += f;
            lo = std::min(lo, f);
            hi = std::max(hi, f);
        }
        est.value += m[b] * sum / ulam_subsamples;
        est.quadrature_bound += m[b] * (hi - lo);
    }
    return est;
}

}  // namespace rcd
