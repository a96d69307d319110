#include "rcd/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcd {

namespace {

using Entry = TransferOperator::Entry;

void merge_row(std::vector<Entry>& row)
{
    std::sort(row.begin(), row.end(),
              [](Entry const& x, Entry const& y) { return x.target < y.target; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < row.size(); ++i)
    {
        if (out > 0 && row[out - 1].target == row[i].target)
            row[out - 1].weight += row[i].weight;
        else
            row[out++] = row[i];
    }
    row.resize(out);
}

template <class RowFn>
TransferOperator assemble(std::size_t bins, Execution exec, RowFn&& fill_row)
{
    if (bins < 2)
        throw std::invalid_argument("bins must be at least 2");
    std::vector<std::vector<Entry>> rows(bins);
    for_each_index(bins, exec, [&](std::size_t src) {
        auto& row = rows[src];
        fill_row(src, row);
        merge_row(row);
    });
    return TransferOperator(bins, std::move(rows));
}

std::uint32_t target_bin(CirclePoint p, std::size_t bins)
{
    auto i = static_cast<std::size_t>(p.theta() * static_cast<double>(bins));
    return static_cast<std::uint32_t>(std::min(i, bins - 1));
}

double tv(std::span<double const> x, std::span<double const> y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += std::abs(x[i] - y[i]);
    return 0.5 * s;
}

void normalize(std::span<double> m)
{
    double s = 0.0;
    for (double v : m)
        s += v;
    for (double& v : m)
        v /= s;
}

}  // namespace

TransferOperator::TransferOperator(std::size_t bins, std::vector<std::vector<Entry>> rows)
    : bins_(bins)
{
    if (rows.size() != bins)
        throw std::invalid_argument("transfer operator: one row per bin required");
    offsets_.reserve(bins + 1);
    offsets_.push_back(0);
    for (auto const& r : rows)
    {
        for (auto const& e : r)
        {
            if (e.target >= bins)
                throw std::invalid_argument("transfer operator: target bin out of range");
            entries_.push_back(e);
        }
        offsets_.push_back(entries_.size());
    }
}

void TransferOperator::apply(std::span<double const> in, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t src = 0; src < bins_; ++src)
    {
        double m = in[src];
        if (m == 0.0)
            continue;
        for (auto const& e : row(src))
            out[e.target] += m * e.weight;
    }
}

GridMeasure TransferOperator::apply(GridMeasure const& m) const
{
    if (m.bins() != bins_)
        throw std::invalid_argument("transfer operator: bin count mismatch");
    std::vector<double> out(bins_);
    apply(m.mass(), out);
    return GridMeasure(std::move(out));
}

TransferOperator assemble_diffusion(GeneratorSystem const& sys, std::size_t bins, Execution exec)
{
    return assemble(bins, exec, [&](std::size_t src, std::vector<Entry>& row) {
        std::vector<double> w(sys.size());
        row.reserve(static_cast<std::size_t>(ulam_subsamples) * sys.size());
        for (int s = 0; s < ulam_subsamples; ++s)
        {
            double theta = subsample_point(src, s, bins);
            sys.weights_at(theta, w);
            for (std::size_t i = 0; i < sys.size(); ++i)
            {
                CirclePoint image = apply(sys.generator(i), CirclePoint(theta));
                row.push_back({target_bin(image, bins), w[i] / ulam_subsamples});
            }
        }
    });
}

TransferOperator assemble_pushforward(CircleMap const& g, std::size_t bins, Execution exec)
{
    return assemble(bins, exec, [&](std::size_t src, std::vector<Entry>& row) {
        row.reserve(ulam_subsamples);
        for (int s = 0; s < ulam_subsamples; ++s)
        {
            CirclePoint image = apply(g, CirclePoint(subsample_point(src, s, bins)));
            row.push_back({target_bin(image, bins), 1.0 / ulam_subsamples});
        }
    });
}

GridMeasure apply_diffusion(GeneratorSystem const& sys, GridMeasure const& m)
{
    return assemble_diffusion(sys, m.bins()).apply(m);
}

StationaryResult stationary_measure(TransferOperator const& op, double tol, std::size_t max_iter)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("stationary_measure: tol must be positive");
    std::size_t const n = op.bins();
    std::vector<double> cur(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    ConvergenceReport report;
    report.tolerance = tol;
    report.gap = 1.0;
    for (std::size_t k = 1; k <= max_iter; ++k)
    {
        op.apply(cur, next);
        normalize(next);
        report.gap = tv(cur, next);
        report.iterations = k;
        cur.swap(next);
        if (report.gap <= tol)
        {
            report.converged = true;
            break;
        }
    }
    return {GridMeasure(std::move(cur)), report};
}

StationaryResult stationary_measure(GeneratorSystem const& sys, std::size_t bins, double tol,
                                    std::size_t max_iter)
{
    return stationary_measure(assemble_diffusion(sys, bins), tol, max_iter);
}

double InvariantMeasureResult::max_residual() const noexcept
{
    double r = 0.0;
    for (double x : residuals)
        r = std::max(r, x);
    return r;
}

InvariantMeasureResult detect_invariant_measure(GeneratorSystem const& sys, std::size_t bins,
                                                double tol, double stationary_tol,
                                                std::size_t max_iter)
{
    if (!sys.has_constant_weights())
        throw std::invalid_argument(
            "invariant measure detection requires constant weights");
    auto fixed = stationary_measure(sys, bins, stationary_tol, max_iter);
    InvariantMeasureResult result{std::nullopt, fixed.measure, fixed.report, {}, tol};
    bool all_pass = true;
    for (auto const& g : sys.generators())
    {
        GridMeasure pushed = assemble_pushforward(g, bins).apply(fixed.measure);
        double r = measure_distance(pushed, fixed.measure, DistanceKind::total_variation);
        result.residuals.push_back(r);
        all_pass = all_pass && r <= tol;
    }
    if (all_pass)
        result.measure = fixed.measure;
    return result;
}

}  // namespace rcd
