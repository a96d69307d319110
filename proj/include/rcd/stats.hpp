#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rcd::stats {

struct MeanSe
{
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and standard error (sample std / sqrt(n)), summed in index
/// order. n must be at least 2.
MeanSe mean_and_se(std::span<double const> xs);

struct LineFit
{
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares through (x_i, y_i).
LineFit fit_line(std::span<double const> x, std::span<double const> y);

struct Interval
{
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for k successes out of n at normal quantile z.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

double normal_cdf(double x) noexcept;

/// Kolmogorov survival function Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2).
double kolmogorov_q(double t) noexcept;

struct KsResult
{
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample test against a continuous CDF.
KsResult ks_one_sample(std::vector<double> sample, std::function<double(double)> const& cdf);
/// Two-sample test.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace rcd::stats
