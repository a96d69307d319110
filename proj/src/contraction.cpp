#include "rcd/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcd/stats.hpp"

namespace rcd {

namespace {

constexpr double pi = std::numbers::pi;
// log of the largest finite double; a larger log C is reported as infinite.
constexpr double max_log_finite = 709.0;

void validate_arc(Arc const& J)
{
    if (!(J.half_width > 0.0) || !(J.length() < 0.5))
        throw std::invalid_argument("interval length must lie in (0, 1/2)");
}

// Forward arc length from `from` to `to`.
double forward_gap(double from, double to)
{
    return wrap_unit(to - from);
}

// Left end and log length of an arc, advanced one map at a time.
struct TrackedArc
{
    double left;
    double log_length;

    void advance(CircleMap const& g)
    {
        double len = std::exp(log_length);
        log_length += std::log(arc_ratio(g, left, len));
        left = apply(g, CirclePoint(left)).theta();
    }
};

std::vector<double> fit_xs(std::size_t n)
{
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = static_cast<double>(i);
    return xs;
}

}  // namespace

std::vector<double> IntervalTrace::diameters() const
{
    std::vector<double> d(log_diameters.size());
    std::transform(log_diameters.begin(), log_diameters.end(), d.begin(),
                   [](double l) { return std::exp(l); });
    return d;
}

IntervalTrace track_interval(std::span<CircleMap const> maps, Arc const& interval,
                             std::optional<double> tracked_point)
{
    validate_arc(interval);
    IntervalTrace trace;
    trace.log_diameters.reserve(maps.size() + 1);
    TrackedArc whole{interval.left(), std::log(interval.length())};
    trace.log_diameters.push_back(whole.log_length);

    std::optional<TrackedArc> sub;
    double point = 0.0;
    if (tracked_point)
    {
        point = wrap_unit(*tracked_point);
        double offset = forward_gap(whole.left, point);
        if (offset > interval.length() * (1.0 + 1e-12))
            throw std::invalid_argument("tracked point is not inside the interval");
        sub = TrackedArc{whole.left, std::log(offset)};
        trace.log_point_offsets.push_back(sub->log_length);
        trace.point_orbit.push_back(point);
    }

    for (auto const& g : maps)
    {
        whole.advance(g);
        trace.log_diameters.push_back(whole.log_length);
        if (sub)
        {
            // log(0) = -inf stays -inf: the point is the left end itself.
            if (std::isfinite(sub->log_length))
                sub->advance(g);
            point = apply(g, CirclePoint(point)).theta();
            trace.log_point_offsets.push_back(sub->log_length);
            trace.point_orbit.push_back(point);
        }
    }
    return trace;
}

std::vector<CircleMap> map_sequence(GeneratorSystem const& sys, TrajectoryRecord const& traj)
{
    std::vector<CircleMap> maps;
    maps.reserve(traj.steps());
    for (std::size_t i : traj.indices)
        maps.push_back(sys.generator(i));
    return maps;
}

ContractionFit fit_contraction_log(std::span<double const> log_diameters)
{
    if (log_diameters.size() < 10)
        throw std::invalid_argument("fit_contraction needs at least 10 diameters");
    for (double l : log_diameters)
        if (!std::isfinite(l))
            throw std::invalid_argument("fit_contraction: diameters must be positive and finite");
    auto xs = fit_xs(log_diameters.size());
    auto line = stats::fit_line(xs, log_diameters);
    return {-line.slope, std::exp(line.intercept - log_diameters[0])};
}

ContractionFit fit_contraction(std::span<double const> diameters)
{
    std::vector<double> logs(diameters.size());
    for (std::size_t i = 0; i < diameters.size(); ++i)
    {
        if (!(diameters[i] > 0.0) || !std::isfinite(diameters[i]))
            throw std::invalid_argument("fit_contraction: diameter " + std::to_string(i)
                                        + " is not positive");
        logs[i] = std::log(diameters[i]);
    }
    return fit_contraction_log(logs);
}

ContractionCertificate verify_contraction_lemma(std::span<CircleMap const> maps, double x0,
                                                double alpha_target, Arc const& interval)
{
    if (!(alpha_target > 0.0))
        throw std::invalid_argument("alpha_target must be positive");
    if (maps.empty())
        throw std::invalid_argument("contraction check needs a non-empty map sequence");

    ContractionCertificate cert;
    cert.x0 = wrap_unit(x0);
    cert.interval = interval;
    cert.alpha = alpha_target;
    cert.horizon = maps.size();

    // log F_n'(x0) by the chain rule
    std::vector<double> log_deriv(maps.size() + 1, 0.0);
    CirclePoint p(x0);
    for (std::size_t n = 0; n < maps.size(); ++n)
    {
        log_deriv[n + 1] = log_deriv[n] + log_derivative(maps[n], p);
        p = apply(maps[n], p);
    }
    double const N = static_cast<double>(maps.size());
    cert.lambda_hat = log_deriv.back() / N;

    auto trace = track_interval(maps, interval, x0);
    cert.log_diameters = std::move(trace.log_diameters);

    if (!(cert.lambda_hat < 0.0))
    {
        cert.reason = "nonnegative exponent";
        return cert;
    }
    if (!(alpha_target < -cert.lambda_hat))
    {
        cert.reason = "alpha_target is not below |lambda|";
        return cert;
    }
    cert.beta = 0.5 * (alpha_target - cert.lambda_hat);
    cert.log_C = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < log_deriv.size(); ++n)
        cert.log_C = std::max(cert.log_C, cert.beta * static_cast<double>(n) + log_deriv[n]);
    if (!(cert.log_C < max_log_finite))
    {
        cert.C = std::numeric_limits<double>::infinity();
        cert.reason = "constant C is not finite over the horizon";
        return cert;
    }
    cert.C = std::exp(cert.log_C);

    double const log_J = std::log(interval.length());
    for (std::size_t n = 0; n < cert.log_diameters.size(); ++n)
    {
        double bound = cert.log_C - alpha_target * static_cast<double>(n) + log_J;
        if (cert.log_diameters[n] > bound)
        {
            cert.first_violation = n;
            cert.reason = "diameter bound violated at step " + std::to_string(n);
            return cert;
        }
    }
    cert.valid = true;
    cert.reason = "certified to horizon " + std::to_string(cert.horizon);
    return cert;
}

std::vector<double> log_diameters_by_products(std::span<CircleMap const> maps,
                                              Arc const& interval)
{
    validate_arc(interval);
    double const l = interval.left();
    double const r = l + interval.length();
    double const ul[2] = {std::sin(pi * l), std::cos(pi * l)};
    double const ur[2] = {std::sin(pi * r), std::cos(pi * r)};
    double const cross = std::sin(pi * interval.length());

    std::vector<double> out;
    out.reserve(maps.size() + 1);
    out.push_back(std::log(interval.length()));
    // F_n = exp(scale) * N with N normalized to unit max entry
    double N[4] = {1.0, 0.0, 0.0, 1.0};
    double scale = 0.0;
    for (auto const& g : maps)
    {
        auto const* m = std::get_if<MoebiusMap>(&g);
        if (!m)
            throw std::invalid_argument("matrix-product route needs Moebius maps");
        double P[4] = {m->a() * N[0] + m->b() * N[2], m->a() * N[1] + m->b() * N[3],
                       m->c() * N[0] + m->d() * N[2], m->c() * N[1] + m->d() * N[3]};
        double norm = std::max({std::abs(P[0]), std::abs(P[1]), std::abs(P[2]), std::abs(P[3])});
        for (int i = 0; i < 4; ++i)
            N[i] = P[i] / norm;
        scale += std::log(norm);

        double pl[2] = {N[0] * ul[0] + N[1] * ul[1], N[2] * ul[0] + N[3] * ul[1]};
        double pr[2] = {N[0] * ur[0] + N[1] * ur[1], N[2] * ur[0] + N[3] * ur[1]};
        double dot = pl[0] * pr[0] + pl[1] * pr[1];
        // image angle = atan2(cross, exp(2 scale) dot)
        double log_ratio = std::log(cross) - 2.0 * scale - std::log(std::abs(dot));
        if (dot > 0.0 && log_ratio < -30.0)
            out.push_back(log_ratio - std::log(pi));
        else
            out.push_back(std::log(std::atan2(cross * std::exp(-2.0 * scale), dot) / pi));
    }
    return out;
}

bool recheck_certificate(ContractionCertificate const& cert, std::span<CircleMap const> maps)
{
    if (!cert.valid || maps.size() != cert.horizon)
        return false;
    double const J = cert.interval.length();
    auto bound = [&](std::size_t n) {
        return cert.C * std::exp(-cert.alpha * static_cast<double>(n)) * J;
    };
    bool const all_moebius = std::all_of(maps.begin(), maps.end(), [](CircleMap const& g) {
        return std::holds_alternative<MoebiusMap>(g);
    });
    if (all_moebius)
    {
        auto logs = log_diameters_by_products(maps, cert.interval);
        for (std::size_t n = 0; n < logs.size(); ++n)
        {
            double slack = 1e-9 * (1.0 + static_cast<double>(n));
            if (logs[n] > cert.log_C - cert.alpha * static_cast<double>(n) + std::log(J) + slack)
                return false;
        }
        return true;
    }
    // Direct endpoint evaluation while the image is resolvable in absolute
    // coordinates; beyond that only the stored trace can be compared.
    double l = cert.interval.left();
    double r = wrap_unit(l + J);
    for (std::size_t n = 0; n <= maps.size(); ++n)
    {
        double d = forward_gap(l, r);
        if (d < 1e-9)
            break;
        if (d > bound(n) * (1.0 + 1e-6))
            return false;
        if (n < maps.size())
        {
            l = apply(maps[n], CirclePoint(l)).theta();
            r = apply(maps[n], CirclePoint(r)).theta();
        }
    }
    for (std::size_t n = 0; n < cert.log_diameters.size(); ++n)
        if (std::exp(cert.log_diameters[n]) > bound(n) * (1.0 + 1e-9))
            return false;
    return true;
}

}  // namespace rcd
