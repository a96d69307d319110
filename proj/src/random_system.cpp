#include "rcd/random_system.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rcd {

namespace {
constexpr int positivity_grid = 10000;

std::optional<CircleMap> inverse_of(CircleMap const& g)
{
    if (auto const* m = std::get_if<MoebiusMap>(&g))
        return CircleMap{m->inverse()};
    return std::nullopt;
}

// Total weight of all generators equal to g.
double class_weight(GeneratorSystem const& sys, std::vector<double> const& p, CircleMap const& g)
{
    double total = 0.0;
    for (std::size_t j = 0; j < sys.size(); ++j)
        if (same_map(sys.generator(j), g, map_equality_tol))
            total += p[j];
    return total;
}
}  // namespace

double CosineWeight::operator()(double theta) const noexcept
{
    return scale * (1.0 + amplitude * std::cos(2.0 * std::numbers::pi * theta + phase));
}

GeneratorSystem::GeneratorSystem(std::vector<CircleMap> generators, Weighting weights)
    : generators_(std::move(generators)), weights_(std::move(weights))
{
    if (generators_.empty())
        throw std::invalid_argument("generators: at least one generator is required");
    std::size_t const n = generators_.size();
    if (auto const* cw = std::get_if<ConstantWeights>(&weights_))
    {
        if (cw->p.size() != n)
            throw std::invalid_argument("weights: expected " + std::to_string(n)
                                        + " entries, got " + std::to_string(cw->p.size()));
        double sum = 0.0;
        for (double w : cw->p)
        {
            if (!(w > 0.0) || !std::isfinite(w))
                throw std::invalid_argument("weights: every weight must be positive");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("weights: must sum to 1, got " + std::to_string(sum));
        cumulative_.resize(n);
        std::partial_sum(cw->p.begin(), cw->p.end(), cumulative_.begin());
        cumulative_.back() = 1.0;
    }
    else
    {
        auto const& terms = std::get<CosineWeights>(weights_).terms;
        if (terms.size() != n)
            throw std::invalid_argument("weights: expected " + std::to_string(n)
                                        + " cosine terms, got " + std::to_string(terms.size()));
        for (auto const& t : terms)
            for (int k = 0; k < positivity_grid; ++k)
            {
                double w = t(static_cast<double>(k) / positivity_grid);
                if (!(w > 0.0) || !std::isfinite(w))
                    throw std::invalid_argument(
                        "weights: cosine weight is not positive on the whole circle");
            }
    }
}

void GeneratorSystem::weights_at(double theta, std::span<double> out) const
{
    if (out.size() != size())
        throw std::invalid_argument("weights_at: output size mismatch");
    if (auto const* cw = std::get_if<ConstantWeights>(&weights_))
    {
        std::copy(cw->p.begin(), cw->p.end(), out.begin());
        return;
    }
    auto const& terms = std::get<CosineWeights>(weights_).terms;
    double total = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i)
    {
        out[i] = terms[i](theta);
        total += out[i];
    }
    for (double& w : out)
        w /= total;
}

double GeneratorSystem::weight_at(std::size_t i, double theta) const
{
    if (auto const* cw = std::get_if<ConstantWeights>(&weights_))
        return cw->p.at(i);
    auto const& terms = std::get<CosineWeights>(weights_).terms;
    double total = 0.0;
    for (auto const& t : terms)
        total += t(theta);
    return terms.at(i)(theta) / total;
}

std::size_t GeneratorSystem::select(double theta, double u) const noexcept
{
    std::size_t const n = size();
    if (!cumulative_.empty())
    {
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (u < cumulative_[i])
                return i;
        return n - 1;
    }
    auto const& terms = std::get<CosineWeights>(weights_).terms;
    double total = 0.0;
    for (auto const& t : terms)
        total += t(theta);
    double target = u * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
        acc += terms[i](theta);
        if (target < acc)
            return i;
    }
    return n - 1;
}

Step sample_step(GeneratorSystem const& sys, CirclePoint p, Engine& rng)
{
    std::size_t i = sys.select(p.theta(), uniform01(rng));
    auto const& g = sys.generator(i);
    return {i, apply(g, p), log_derivative(g, p)};
}

SymmetryReport check_symmetry(GeneratorSystem const& sys, double tol)
{
    auto const* cw = std::get_if<ConstantWeights>(&sys.weighting());
    if (!cw)
        throw std::invalid_argument("symmetry check unsupported for this weighting");

    SymmetryReport report;
    report.tolerance = tol;
    for (std::size_t i = 0; i < sys.size(); ++i)
    {
        auto inv = inverse_of(sys.generator(i));
        if (!inv)
        {
            report.witness = i;
            report.reason = "generator has no inverse of its own family";
            return report;
        }
        double w_inv = class_weight(sys, cw->p, *inv);
        if (w_inv == 0.0)
        {
            report.witness = i;
            report.reason = "inverse of generator is not in the set";
            return report;
        }
        double w = class_weight(sys, cw->p, sys.generator(i));
        if (std::abs(w - w_inv) > tol)
        {
            report.witness = i;
            report.reason = "generator and its inverse carry different weights";
            return report;
        }
    }
    report.is_symmetric = true;
    return report;
}

}  // namespace rcd
