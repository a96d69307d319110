#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rcd/circle_map.hpp"
#include "rcd/rng.hpp"

namespace rcd {

/// Probability vector over generators, independent of the point.
struct ConstantWeights
{
    std::vector<double> p;
};

/// Unnormalized weight c (1 + a cos(2 pi theta + phase)); positive when
/// c > 0 and |a| < 1.
struct CosineWeight
{
    double scale = 1.0;
    double amplitude = 0.0;
    double phase = 0.0;

    double operator()(double theta) const noexcept;
};

struct CosineWeights
{
    std::vector<CosineWeight> terms;
};

using Weighting = std::variant<ConstantWeights, CosineWeights>;

/// A finite random dynamical system: at each step generator i is applied with
/// probability weight_i(theta).
class GeneratorSystem
{
  public:
    /// Validates the weighting against the generator list; throws
    /// std::invalid_argument with a message naming the weights otherwise.
    GeneratorSystem(std::vector<CircleMap> generators, Weighting weights);

    std::size_t size() const noexcept { return generators_.size(); }
    std::vector<CircleMap> const& generators() const noexcept { return generators_; }
    CircleMap const& generator(std::size_t i) const { return generators_.at(i); }
    Weighting const& weighting() const noexcept { return weights_; }
    bool has_constant_weights() const noexcept
    {
        return std::holds_alternative<ConstantWeights>(weights_);
    }

    /// Pointwise-normalized weights at theta; out.size() must equal size().
    void weights_at(double theta, std::span<double> out) const;
    double weight_at(std::size_t i, double theta) const;

    /// Chooses a generator index from a uniform draw u in [0, 1).
    std::size_t select(double theta, double u) const noexcept;

  private:
    std::vector<CircleMap> generators_;
    Weighting weights_;
    std::vector<double> cumulative_;
};

struct Step
{
    std::size_t index;
    CirclePoint next;
    double log_derivative;
};

/// One Markov step from p. Consumes exactly one uniform draw.
Step sample_step(GeneratorSystem const& sys, CirclePoint p, Engine& rng);

struct SymmetryReport
{
    bool is_symmetric = false;
    std::optional<std::size_t> witness;
    double tolerance = 0.0;
    std::string reason;
};

/// Tolerance for deciding that two generators are the same map.
inline constexpr double map_equality_tol = 1e-10;

/// Detailed balance with constant potential: the generator set is closed under
/// inversion and each map carries the same total weight as its inverse.
/// Throws std::invalid_argument for point-dependent weights.
SymmetryReport check_symmetry(GeneratorSystem const& sys, double tol);

}  // namespace rcd
