#include "rcd/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rcd/stats.hpp"

namespace rcd {

namespace {

// Integer ratio a / b, or nullopt when a is not a multiple of b.
std::optional<std::size_t> integer_ratio(double a, double b)
{
    double r = a / b;
    double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r))
        return std::nullopt;
    return static_cast<std::size_t>(n);
}

std::size_t window_bin(double xi, double window, std::size_t bins)
{
    double f = (xi + window) / (2.0 * window);
    return static_cast<std::size_t>(f * static_cast<double>(bins));
}

void normalize(std::vector<double>& h)
{
    double s = 0.0;
    for (double v : h)
        s += v;
    if (s > 0.0)
        for (double& v : h)
            v /= s;
}

}  // namespace

void HyperbolicParams::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("dt: must be positive");
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("delta: must be positive");
    if (!(dt <= delta / 100.0 * (1.0 + 1e-12)))
        throw std::invalid_argument("dt: must not exceed delta / 100");
    if (!(horizon >= 100.0 * delta * (1.0 - 1e-12)))
        throw std::invalid_argument("T: must be at least 100 * delta");
    if (!integer_ratio(delta, dt))
        throw std::invalid_argument("delta: must be an integer multiple of dt");
    if (!integer_ratio(horizon, delta))
        throw std::invalid_argument("T: must be an integer multiple of delta");
    if (!std::isfinite(kappa))
        throw std::invalid_argument("kappa: must be finite");
    if (!(cylinder_period > 0.0))
        throw std::invalid_argument("A: cylinder period must be positive");
}

std::size_t HyperbolicParams::steps() const
{
    return *integer_ratio(horizon, delta) * steps_per_block();
}

std::size_t HyperbolicParams::steps_per_block() const
{
    return *integer_ratio(delta, dt);
}

LeafStepper::LeafStepper(HyperbolicParams const& params, double u0, double v0,
                         std::uint64_t seed)
    : kappa_(params.kappa),
      dt_(params.dt),
      delta_(params.delta),
      per_block_(params.steps_per_block()),
      block_rng_(make_engine(derive_seed(seed, 0, 1))),
      bridge_rng_(make_engine(derive_seed(seed, 0, 3))),
      x_rng_(make_engine(derive_seed(seed, 0, 2))),
      u_(u0),
      v_(v0),
      u_ref_(u0)
{
}

void LeafStepper::step()
{
    if (block_pos_ == 0)
        block_remaining_ = (kappa_ - 1.0) * delta_
                           + std::sqrt(2.0 * delta_) * block_normal_(block_rng_);
    auto const left = static_cast<double>(per_block_ - block_pos_);
    double du = block_remaining_;
    if (per_block_ - block_pos_ > 1)
        du = block_remaining_ / left
             + std::sqrt(2.0 * dt_ * (left - 1.0) / left) * bridge_normal_(bridge_rng_);
    block_remaining_ -= du;
    block_pos_ = (block_pos_ + 1) % per_block_;

    double const dw = std::sqrt(2.0 * dt_) * x_normal_(x_rng_);
    v_ = (v_ + dw) * std::exp(-du);
    displacement_ += dw * std::exp(u_ - u_ref_);
    u_ += du;
    ++count_;
}

double LeafStepper::take_displacement() noexcept
{
    double d = displacement_;
    displacement_ = 0.0;
    u_ref_ = u_;
    return d;
}

HyperbolicPath simulate_hyperbolic_path(HyperbolicParams const& params, double x0, double y0,
                                        std::uint64_t seed, std::size_t stride)
{
    params.validate();
    if (!(y0 > 0.0))
        throw std::invalid_argument("start: y0 must be positive");
    std::size_t const n = params.steps();
    if (stride == 0 || n % stride != 0)
        throw std::invalid_argument("stride must divide the number of steps");

    HyperbolicPath path;
    path.params = params;
    path.seed = seed;
    path.stride = stride;
    std::size_t const records = n / stride + 1;
    for (auto* a : {&path.t, &path.u, &path.v, &path.x, &path.y, &path.xi, &path.dx})
        a->reserve(records);

    LeafStepper st(params, std::log(y0), x0 / y0, seed);
    auto record = [&] {
        path.t.push_back(static_cast<double>(st.steps_taken()) * params.dt);
        path.u.push_back(st.u());
        path.v.push_back(st.v());
        path.y.push_back(std::exp(st.u()));
        path.x.push_back(st.v() * path.y.back());
        path.xi.push_back(std::asinh(st.v()));
        path.dx.push_back(st.take_displacement());
    };
    record();
    for (std::size_t j = 1; j <= n; ++j)
    {
        st.step();
        if (j % stride == 0)
            record();
    }
    return path;
}

LyapunovEstimate leafwise_lyapunov(std::span<HyperbolicPath const> paths)
{
    if (paths.size() < 2)
        throw std::invalid_argument("leafwise_lyapunov needs at least 2 paths");
    double const T = paths.front().params.horizon;
    std::vector<double> samples;
    samples.reserve(paths.size());
    for (auto const& p : paths)
    {
        if (p.params.horizon != T || p.u.empty())
            throw std::invalid_argument("leafwise_lyapunov: paths must share a horizon");
        samples.push_back((p.u.back() - p.u.front()) / T);
    }
    auto ms = stats::mean_and_se(samples);
    return {ms.mean, ms.std_error, paths.size(), paths.front().params.steps(),
            LyapunovEstimate::Method::trajectory};
}

std::vector<double> leaf_lyapunov_samples(HyperbolicParams const& params, double x0, double y0,
                                          std::size_t n_paths, std::uint64_t seed,
                                          Execution exec)
{
    params.validate();
    if (!(y0 > 0.0))
        throw std::invalid_argument("start: y0 must be positive");
    std::size_t const n = params.steps();
    double const u0 = std::log(y0);
    std::vector<double> out(n_paths);
    for_each_index(n_paths, exec, [&](std::size_t i) {
        LeafStepper st(params, u0, x0 / y0, derive_seed(seed, i));
        for (std::size_t j = 0; j < n; ++j)
            st.step();
        out[i] = (st.u() - u0) / params.horizon;
    });
    return out;
}

namespace {

class DirectV
{
  public:
    DirectV(HyperbolicParams const& p, double v0, std::uint64_t seed)
        : drift_(2.0 - p.kappa), dt_(p.dt), rng_(make_engine(derive_seed(seed, 0, 4))), v_(v0)
    {
    }

    void step()
    {
        double noise = std::sqrt(2.0 * (1.0 + v_ * v_) * dt_) * normal_(rng_);
        v_ += drift_ * v_ * dt_ + noise;
    }

    double v() const noexcept { return v_; }

  private:
    double drift_;
    double dt_;
    Engine rng_;
    std::normal_distribution<double> normal_;
    double v_;
};

}  // namespace

std::vector<double> simulate_v_process(HyperbolicParams const& params, double v0,
                                       std::uint64_t seed, VMode mode, std::size_t stride)
{
    if (mode == VMode::from_xy)
        return simulate_hyperbolic_path(params, v0, 1.0, seed, stride).v;

    params.validate();
    std::size_t const n = params.steps();
    if (stride == 0 || n % stride != 0)
        throw std::invalid_argument("stride must divide the number of steps");
    std::vector<double> out;
    out.reserve(n / stride + 1);
    DirectV proc(params, v0, seed);
    out.push_back(proc.v());
    for (std::size_t j = 1; j <= n; ++j)
    {
        proc.step();
        if (j % stride == 0)
            out.push_back(proc.v());
    }
    return out;
}

std::vector<double> v_terminal_samples(HyperbolicParams const& params, double v0,
                                       std::size_t n_paths, std::uint64_t seed, VMode mode,
                                       Execution exec)
{
    params.validate();
    std::size_t const n = params.steps();
    std::vector<double> out(n_paths);
    for_each_index(n_paths, exec, [&](std::size_t i) {
        std::uint64_t s = derive_seed(seed, i);
        if (mode == VMode::direct)
        {
            DirectV proc(params, v0, s);
            for (std::size_t j = 0; j < n; ++j)
                proc.step();
            out[i] = proc.v();
        }
        else
        {
            LeafStepper st(params, 0.0, v0, s);
            for (std::size_t j = 0; j < n; ++j)
                st.step();
            out[i] = st.v();
        }
    });
    return out;
}

std::vector<double> xi_stationary_density(double kappa, double window, std::size_t bins)
{
    constexpr int panels = 16;  // even, per bin
    double const width = 2.0 * window / static_cast<double>(bins);
    auto f = [kappa](double x) { return std::exp((1.0 - kappa) * std::log(std::cosh(x))); };
    std::vector<double> mass(bins);
    for (std::size_t b = 0; b < bins; ++b)
    {
        double lo = -window + static_cast<double>(b) * width;
        double h = width / panels;
        double s = f(lo) + f(lo + width);
        for (int k = 1; k < panels; ++k)
            s += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
        mass[b] = s * h / 3.0;
    }
    normalize(mass);
    return mass;
}

double line_wasserstein1(std::span<double const> a, std::span<double const> b, double bin_width)
{
    if (a.size() != b.size())
        throw std::invalid_argument("line_wasserstein1: bin count mismatch");
    double fa = 0.0;
    double fb = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        fa += a[i];
        fb += b[i];
        w += std::abs(fa - fb);
    }
    return w * bin_width;
}

namespace {

class XiProcess
{
  public:
    XiProcess(HyperbolicParams const& p, double xi0, std::uint64_t seed)
        : drift_(1.0 - p.kappa), dt_(p.dt), sd_(std::sqrt(2.0 * p.dt)),
          rng_(make_engine(derive_seed(seed, 0, 5))), xi_(xi0)
    {
    }

    void step() { xi_ += drift_ * std::tanh(xi_) * dt_ + sd_ * normal_(rng_); }
    double xi() const noexcept { return xi_; }

  private:
    double drift_;
    double dt_;
    double sd_;
    Engine rng_;
    std::normal_distribution<double> normal_;
    double xi_;
};

std::optional<double> first_exit(HyperbolicParams const& params, double xi0, double window,
                                 std::uint64_t seed)
{
    std::size_t const n = params.steps();
    XiProcess proc(params, xi0, seed);
    for (std::size_t j = 1; j <= n; ++j)
    {
        proc.step();
        if (std::abs(proc.xi()) > window)
            return static_cast<double>(j) * params.dt;
    }
    return std::nullopt;
}

}  // namespace

XiReport xi_stationarity_test(HyperbolicParams const& params, std::uint64_t seed, double xi0,
                              std::size_t bins, double window)
{
    params.validate();
    if (bins < 2 || !(window > 0.0))
        throw std::invalid_argument("xi histogram needs bins >= 2 and a positive window");
    XiReport rep;
    rep.kappa = params.kappa;
    rep.window = window;
    rep.bins = bins;
    rep.stationary_regime = params.kappa > 1.0;

    if (!rep.stationary_regime)
    {
        rep.exit_time = first_exit(params, xi0, window, seed);
        rep.escaped = rep.exit_time.has_value();
        return rep;
    }

    std::size_t const n = params.steps();
    rep.empirical.assign(bins, 0.0);
    rep.empirical_first.assign(bins, 0.0);
    XiProcess proc(params, xi0, seed);
    for (std::size_t j = 1; j <= n; ++j)
    {
        proc.step();
        double xi = proc.xi();
        if (std::abs(xi) >= window)
            continue;
        std::size_t b = std::min(window_bin(xi, window, bins), bins - 1);
        (2 * j <= n ? rep.empirical_first : rep.empirical)[b] += 1.0;
    }
    normalize(rep.empirical);
    normalize(rep.empirical_first);
    rep.density = xi_stationary_density(params.kappa, window, bins);
    double const width = 2.0 * window / static_cast<double>(bins);
    rep.w1_to_density = line_wasserstein1(rep.empirical, rep.density, width);
    rep.w1_halves = line_wasserstein1(rep.empirical, rep.empirical_first, width);
    return rep;
}

std::vector<std::optional<double>> xi_exit_times(HyperbolicParams const& params,
                                                 std::size_t n_runs, std::uint64_t seed,
                                                 double xi0, double window, Execution exec)
{
    params.validate();
    std::vector<std::optional<double>> out(n_runs);
    for_each_index(n_runs, exec, [&](std::size_t i) {
        out[i] = first_exit(params, xi0, window, derive_seed(seed, i));
    });
    return out;
}

double leaf_distance(double u1, double v1, double u2, double v2) noexcept
{
    double h = 0.5 * (u2 - u1);
    double e = std::exp(h);
    double a = v2 * e - v1 / e;
    double s = std::sinh(h);
    return 2.0 * std::asinh(0.5 * std::sqrt(a * a + 4.0 * s * s));
}

double displacement_distance(double du, double rel) noexcept
{
    double h = 0.5 * du;
    double log_a = std::log(std::abs(rel)) - h;
    if (std::abs(h) < 300.0 && log_a < 300.0)
    {
        double a = rel * std::exp(-h);
        double s = std::sinh(h);
        return 2.0 * std::asinh(0.5 * std::hypot(a, 2.0 * s));
    }
    // far apart: 2 asinh(s / 2) = 2 log s to double precision, s taken in logs
    double log_b = std::abs(h) + std::log1p(-std::exp(-2.0 * std::abs(h)));
    double m = std::max(log_a, log_b);
    return 2.0 * (m + 0.5 * std::log(std::exp(2.0 * (log_a - m)) + std::exp(2.0 * (log_b - m))));
}

double hyperbolic_distance(double x1, double y1, double x2, double y2) noexcept
{
    return leaf_distance(std::log(y1), x1 / y1, std::log(y2), x2 / y2);
}

std::vector<double> DiscretizationRecord::ratios() const
{
    std::vector<double> r(K.size());
    for (std::size_t n = 0; n < K.size(); ++n)
        r[n] = static_cast<double>(K[n]) / static_cast<double>(n + 1);
    return r;
}

DiscretizationRecord discretize_path(HyperbolicPath const& path, double delta)
{
    double const h = path.params.dt * static_cast<double>(path.stride);
    auto q = integer_ratio(delta, h);
    if (!q)
        throw std::invalid_argument("delta must be a multiple of the recorded time step");
    DiscretizationRecord rec;
    rec.delta = delta;
    std::size_t total = 0;
    for (std::size_t i = 0; i < path.size(); i += *q)
    {
        rec.x.push_back(path.x[i]);
        rec.y.push_back(path.y[i]);
        if (i == 0)
            continue;
        std::size_t p = i - *q;
        // (x_i - x_p) / y_p from the recorded increments; differencing x or v
        // directly cancels catastrophically once v is large
        double rel = 0.0;
        for (std::size_t j = p + 1; j <= i; ++j)
            rel += path.dx[j] * std::exp(path.u[j - 1] - path.u[p]);
        double d = displacement_distance(path.u[i] - path.u[p], rel);
        auto k = static_cast<std::size_t>(std::floor(d)) + 1;
        total += k;
        rec.distance.push_back(d);
        rec.k.push_back(k);
        rec.K.push_back(total);
    }
    return rec;
}

double lln_constant(HyperbolicParams const& params, std::size_t n_samples, std::uint64_t seed,
                    Execution exec)
{
    params.validate();
    if (n_samples == 0)
        throw std::invalid_argument("lln_constant needs samples");
    std::size_t const m = params.steps_per_block();
    std::vector<double> k(n_samples);
    for_each_index(n_samples, exec, [&](std::size_t i) {
        LeafStepper st(params, 0.0, 0.0, derive_seed(seed, i, 7));
        for (std::size_t j = 0; j < m; ++j)
            st.step();
        k[i] = std::floor(leaf_distance(0.0, 0.0, st.u(), st.v())) + 1.0;
    });
    double s = 0.0;
    for (double v : k)
        s += v;
    return s / static_cast<double>(n_samples) + 1.0;
}

void write_path_csv(std::ostream& os, HyperbolicPath const& path)
{
    os << "t,x,y,u,v,xi\n";
    os.precision(17);
    for (std::size_t i = 0; i < path.size(); ++i)
        os << path.t[i] << ',' << path.x[i] << ',' << path.y[i] << ',' << path.u[i] << ','
           << path.v[i] << ',' << path.xi[i] << '\n';
}

}  // namespace rcd
