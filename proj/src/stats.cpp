#include "rcd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcd::stats {

MeanSe mean_and_se(std::span<double const> xs)
{
    if (xs.size() < 2)
        throw std::invalid_argument("mean_and_se needs at least two samples");
    auto const n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    double mean = sum / n;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

LineFit fit_line(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line needs two equally sized series of length >= 2");
    auto const n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_line: x values are all equal");
    double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

Interval wilson_interval(std::size_t k, std::size_t n, double z)
{
    if (n == 0)
        return {0.0, 1.0};
    double const nn = static_cast<double>(n);
    double const p = static_cast<double>(k) / nn;
    double const z2 = z * z;
    double const denom = 1.0 + z2 / nn;
    double const center = (p + z2 / (2.0 * nn)) / denom;
    double const half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double normal_cdf(double x) noexcept
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double kolmogorov_q(double t) noexcept
{
    if (t < 0.2)
        return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j)
    {
        double term = sign * std::exp(-2.0 * j * j * t * t);
        sum += term;
        if (std::abs(term) < 1e-16)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {
// Stephens' small-sample correction of the asymptotic distribution.
double ks_p_value(double d, double effective_n)
{
    double sn = std::sqrt(effective_n);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}
}  // namespace

KsResult ks_one_sample(std::vector<double> sample, std::function<double(double)> const& cdf)
{
    if (sample.empty())
        throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    double const n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i)
    {
        double f = cdf(sample[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return {d, ks_p_value(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double const na = static_cast<double>(a.size());
    double const nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size())
    {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, ks_p_value(d, na * nb / (na + nb))};
}

}  // namespace rcd::stats
