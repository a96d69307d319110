#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcd/circle_map.hpp"
#include "rcd/random_system.hpp"
#include "rcd/trajectory.hpp"

namespace rcd {

/// Closed arc [center - half_width, center + half_width] of R/Z.
struct Arc
{
    double center = 0.0;
    double half_width = 0.0;

    double length() const noexcept { return 2.0 * half_width; }
    double left() const noexcept { return wrap_unit(center - half_width); }
};

/// Image lengths of an arc under F_n = h_n o ... o h_1, kept in log scale so
/// that exponentially small images stay representable.
struct IntervalTrace
{
    /// log |F_n(J)| for n = 0..N; entry 0 is log |J|.
    std::vector<double> log_diameters;
    /// log of the arc length from the image of J's left end to the image of
    /// the tracked point; empty when no point is tracked.
    std::vector<double> log_point_offsets;
    /// Image of the tracked point after each step (n = 0..N).
    std::vector<double> point_orbit;

    std::vector<double> diameters() const;
};

/// Throws std::invalid_argument unless 0 < |J| < 1/2 and, when given, the
/// tracked point lies in J.
IntervalTrace track_interval(std::span<CircleMap const> maps, Arc const& interval,
                             std::optional<double> tracked_point = std::nullopt);

/// The generator sequence applied along a trajectory.
std::vector<CircleMap> map_sequence(GeneratorSystem const& sys, TrajectoryRecord const& traj);

struct ContractionFit
{
    double alpha = 0.0;
    double C = 0.0;
};

/// Least-squares line through (n, log diameters[n]); alpha = -slope,
/// C = exp(intercept) / diameters[0]. Throws std::invalid_argument on fewer
/// than 10 entries or any non-positive diameter.
ContractionFit fit_contraction(std::span<double const> diameters);
/// Same fit on log diameters.
ContractionFit fit_contraction_log(std::span<double const> log_diameters);

struct ContractionCertificate
{
    double x0 = 0.0;
    Arc interval;
    double alpha = 0.0;
    double beta = 0.0;
    double lambda_hat = 0.0;
    double log_C = 0.0;
    double C = 1.0;
    std::size_t horizon = 0;
    std::vector<double> log_diameters;
    bool valid = false;
    std::optional<std::size_t> first_violation;
    std::string reason;
};

/// Horizon-bounded check of |F_n(J)| <= C exp(-alpha n) |J| along `maps`:
/// lambda_hat = log F_N'(x0) / N, beta the midpoint of (alpha, |lambda_hat|),
/// C = max_n exp(beta n) F_n'(x0); then every tracked diameter is compared
/// with the bound. Rejected certificates carry a reason.
ContractionCertificate verify_contraction_lemma(std::span<CircleMap const> maps, double x0,
                                                double alpha_target, Arc const& interval);

/// log |F_n(J)| recomputed from normalized cumulative matrix products; only
/// defined for Moebius sequences (throws std::invalid_argument otherwise).
std::vector<double> log_diameters_by_products(std::span<CircleMap const> maps,
                                              Arc const& interval);

/// Independent re-check of a valid certificate: recomputes the diameters by
/// a different route (matrix products for Moebius sequences, direct endpoint
/// evaluation while the image is resolvable otherwise) and tests the bound.
bool recheck_certificate(ContractionCertificate const& cert, std::span<CircleMap const> maps);

}  // namespace rcd
