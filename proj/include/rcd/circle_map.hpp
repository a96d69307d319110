#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <variant>

namespace rcd {

/// Reduce a real number to the fundamental domain [0, 1) of R/Z.
inline double wrap_unit(double t) noexcept
{
    double r = t - std::floor(t);
    return r >= 1.0 ? 0.0 : r;
}

/// Length of the shorter arc between two points of R/Z.
inline double circle_distance(double a, double b) noexcept
{
    double d = wrap_unit(a - b);
    return std::min(d, 1.0 - d);
}

/// A point of the circle R/Z. For Moebius maps the chart x = tan(pi theta)
/// identifies the circle with the projective line.
class CirclePoint
{
  public:
    constexpr CirclePoint() = default;
    explicit CirclePoint(double theta) noexcept : theta_(wrap_unit(theta)) {}

    double theta() const noexcept { return theta_; }

    friend bool operator==(CirclePoint, CirclePoint) = default;

  private:
    double theta_ = 0.0;
};

/// Projective action of an SL(2,R) matrix on the circle.
///
/// Points are handled in homogeneous coordinates (sin pi theta, cos pi theta),
/// so the chart pole theta = 1/2 needs no special case. The matrix is
/// normalized to determinant one and a canonical sign on construction; maps
/// whose matrix is a rotation are flagged and report a unit derivative
/// exactly.
class MoebiusMap
{
  public:
    /// Throws std::invalid_argument unless ad - bc > 0 and all entries are
    /// finite (orientation reversing matrices are not circle diffeomorphisms
    /// of the required kind).
    MoebiusMap(double a, double b, double c, double d);

    static MoebiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }
    /// Rotation of R/Z by `turn` (matrix of angle pi * turn).
    static MoebiusMap rotation(double turn);
    /// diag(s, 1/s): chart map x -> s^2 x.
    static MoebiusMap diagonal(double s) { return {s, 0.0, 0.0, 1.0 / s}; }

    double a() const noexcept { return m_[0]; }
    double b() const noexcept { return m_[1]; }
    double c() const noexcept { return m_[2]; }
    double d() const noexcept { return m_[3]; }
    std::array<double, 4> const& entries() const noexcept { return m_; }
    bool is_rotation() const noexcept { return rotation_; }

    CirclePoint apply(CirclePoint p) const noexcept;
    double derivative(CirclePoint p) const noexcept;
    double log_derivative(CirclePoint p) const noexcept;

    /// Ratio |g(I)| / |I| for the arc I = [left, left + length], evaluated
    /// without cancellation. length may be tiny or zero (the ratio then tends
    /// to the derivative at left).
    double arc_ratio(double left, double length) const noexcept;

    MoebiusMap inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }

  private:
    std::array<double, 2> image(double theta) const noexcept;

    std::array<double, 4> m_;
    bool rotation_ = false;
};

/// g o h as a matrix product.
MoebiusMap compose(MoebiusMap const& g, MoebiusMap const& h);
MoebiusMap invert(MoebiusMap const& g);

/// Sup-distance of matrix entries, minimized over the sign ambiguity.
double matrix_distance(MoebiusMap const& g, MoebiusMap const& h) noexcept;

/// theta -> theta + eps sin(2 pi k theta) / (2 pi k); a C^1 diffeomorphism
/// for |eps| < 1.
class PerturbedMap
{
  public:
    /// Throws std::invalid_argument unless |eps| < 1 and k >= 1.
    PerturbedMap(double eps, int k);

    double eps() const noexcept { return eps_; }
    int frequency() const noexcept { return k_; }

    CirclePoint apply(CirclePoint p) const noexcept;
    double derivative(CirclePoint p) const noexcept;
    double log_derivative(CirclePoint p) const noexcept { return std::log(derivative(p)); }
    double arc_ratio(double left, double length) const noexcept;

  private:
    double eps_;
    int k_;
};

using CircleMap = std::variant<MoebiusMap, PerturbedMap>;

inline CirclePoint apply(CircleMap const& g, CirclePoint p) noexcept
{
    return std::visit([p](auto const& m) { return m.apply(p); }, g);
}

inline double derivative(CircleMap const& g, CirclePoint p) noexcept
{
    return std::visit([p](auto const& m) { return m.derivative(p); }, g);
}

inline double log_derivative(CircleMap const& g, CirclePoint p) noexcept
{
    return std::visit([p](auto const& m) { return m.log_derivative(p); }, g);
}

inline double arc_ratio(CircleMap const& g, double left, double length) noexcept
{
    return std::visit([=](auto const& m) { return m.arc_ratio(left, length); }, g);
}

/// Maps are equal when both are Moebius and their matrices agree within tol
/// up to sign. Perturbed maps compare by parameters.
bool same_map(CircleMap const& g, CircleMap const& h, double tol);

}  // namespace rcd
