#include "rcd/circle_map.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rcd {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double rotation_tol = 1e-14;
// Below this arc length the image ratio is the derivative to full precision.
constexpr double tiny_arc = 1e-150;
}  // namespace

MoebiusMap::MoebiusMap(double a, double b, double c, double d)
{
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d)))
        throw std::invalid_argument("moebius matrix has non-finite entries");
    double det = a * d - b * c;
    if (!(det > 0.0))
        throw std::invalid_argument("moebius matrix must have positive determinant, got "
                                    + std::to_string(det));
    double s = std::sqrt(det);
    m_ = {a / s, b / s, c / s, d / s};
    if (m_[0] < 0.0 || (m_[0] == 0.0 && m_[2] < 0.0))
        for (auto& e : m_)
            e = -e;
    rotation_ = std::abs(m_[0] - m_[3]) <= rotation_tol && std::abs(m_[1] + m_[2]) <= rotation_tol;
}

MoebiusMap MoebiusMap::rotation(double turn)
{
    double ang = pi * turn;
    double cs = std::cos(ang);
    double sn = std::sin(ang);
    return {cs, sn, -sn, cs};
}

std::array<double, 2> MoebiusMap::image(double theta) const noexcept
{
    double s = std::sin(pi * theta);
    double c = std::cos(pi * theta);
    return {m_[0] * s + m_[1] * c, m_[2] * s + m_[3] * c};
}

CirclePoint MoebiusMap::apply(CirclePoint p) const noexcept
{
    auto [num, den] = image(p.theta());
    return CirclePoint(std::atan2(num, den) / pi);
}

double MoebiusMap::derivative(CirclePoint p) const noexcept
{
    if (rotation_)
        return 1.0;
    auto [num, den] = image(p.theta());
    return 1.0 / (num * num + den * den);
}

double MoebiusMap::log_derivative(CirclePoint p) const noexcept
{
    if (rotation_)
        return 0.0;
    auto [num, den] = image(p.theta());
    return -std::log(num * num + den * den);
}

double MoebiusMap::arc_ratio(double left, double length) const noexcept
{
    if (rotation_)
        return 1.0;
    auto pl = image(left);
    if (length < tiny_arc)
        return 1.0 / (pl[0] * pl[0] + pl[1] * pl[1]);
    auto pr = image(left + length);
    // cross(P, Q) = det * sin(pi length) and det = 1
    double dot = pl[0] * pr[0] + pl[1] * pr[1];
    return std::atan2(std::sin(pi * length), dot) / (pi * length);
}

MoebiusMap compose(MoebiusMap const& g, MoebiusMap const& h)
{
    return {g.a() * h.a() + g.b() * h.c(),
            g.a() * h.b() + g.b() * h.d(),
            g.c() * h.a() + g.d() * h.c(),
            g.c() * h.b() + g.d() * h.d()};
}

MoebiusMap invert(MoebiusMap const& g)
{
    return g.inverse();
}

double matrix_distance(MoebiusMap const& g, MoebiusMap const& h) noexcept
{
    double same = 0.0;
    double flipped = 0.0;
    for (int i = 0; i < 4; ++i)
    {
        same = std::max(same, std::abs(g.entries()[i] - h.entries()[i]));
        flipped = std::max(flipped, std::abs(g.entries()[i] + h.entries()[i]));
    }
    return std::min(same, flipped);
}

PerturbedMap::PerturbedMap(double eps, int k) : eps_(eps), k_(k)
{
    if (!(std::abs(eps) < 1.0))
        throw std::invalid_argument("perturbed map needs |eps| < 1, got " + std::to_string(eps));
    if (k < 1)
        throw std::invalid_argument("perturbed map needs frequency k >= 1, got "
                                    + std::to_string(k));
}

CirclePoint PerturbedMap::apply(CirclePoint p) const noexcept
{
    double w = 2.0 * pi * k_;
    double t = p.theta();
    return CirclePoint(t + eps_ * std::sin(w * t) / w);
}

double PerturbedMap::derivative(CirclePoint p) const noexcept
{
    return 1.0 + eps_ * std::cos(2.0 * pi * k_ * p.theta());
}

double PerturbedMap::arc_ratio(double left, double length) const noexcept
{
    double z = pi * k_ * length;
    double sinc = length < tiny_arc ? 1.0 : std::sin(z) / z;
    return 1.0 + eps_ * std::cos(pi * k_ * (2.0 * left + length)) * sinc;
}

bool same_map(CircleMap const& g, CircleMap const& h, double tol)
{
    if (auto const* mg = std::get_if<MoebiusMap>(&g))
    {
        auto const* mh = std::get_if<MoebiusMap>(&h);
        return mh && matrix_distance(*mg, *mh) <= tol;
    }
    auto const* pg = std::get_if<PerturbedMap>(&g);
    auto const* ph = std::get_if<PerturbedMap>(&h);
    return pg && ph && pg->frequency() == ph->frequency()
           && std::abs(pg->eps() - ph->eps()) <= tol;
}

}  // namespace rcd
