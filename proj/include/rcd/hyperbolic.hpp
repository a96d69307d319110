#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rcd/lyapunov.hpp"
#include "rcd/parallel.hpp"
#include "rcd/rng.hpp"

namespace rcd {

/// Drifted Brownian motion on the upper half-plane, generator
/// y^2 (d_xx + d_yy) + kappa y d_y (Brownian intensity 2).
struct HyperbolicParams
{
    double kappa = 0.0;
    double dt = 1e-3;
    double horizon = 100.0;
    /// Discretization time of the path LLN; also the block length on which
    /// the log-height u is sampled exactly.
    double delta = 0.1;
    /// Cylinder period A in the identification z ~ exp(A) z.
    double cylinder_period = 1.0;

    /// Throws std::invalid_argument naming the offending field unless
    /// dt > 0, dt <= delta / 100, horizon >= 100 delta, and delta / dt and
    /// horizon / delta are integers.
    void validate() const;

    std::size_t steps() const;
    std::size_t steps_per_block() const;
};

/// Integrates the state (u, v) = (log y, x / y).
///
/// u is advanced exactly: each delta-block increment is drawn as
/// N((kappa - 1) delta, 2 delta) from its own stream and refined to the dt
/// grid by a Brownian bridge, so u on the delta grid does not depend on dt.
/// The x channel is the Euler-Maruyama step
/// x += sqrt(2 dt) exp(u) N1, written in the scale-free variable v.
class LeafStepper
{
  public:
    LeafStepper(HyperbolicParams const& params, double u0, double v0, std::uint64_t seed);

    void step();

    double u() const noexcept { return u_; }
    double v() const noexcept { return v_; }
    std::size_t steps_taken() const noexcept { return count_; }
    /// (x - x_ref) / y_ref accumulated since the previous call (or the start),
    /// then moves the reference to the current point.
    double take_displacement() noexcept;

  private:
    double kappa_;
    double dt_;
    double delta_;
    std::size_t per_block_;
    Engine block_rng_;
    Engine bridge_rng_;
    Engine x_rng_;
    std::normal_distribution<double> block_normal_;
    std::normal_distribution<double> bridge_normal_;
    std::normal_distribution<double> x_normal_;
    double u_;
    double v_;
    double u_ref_;
    double displacement_ = 0.0;
    double block_remaining_ = 0.0;
    std::size_t block_pos_ = 0;
    std::size_t count_ = 0;
};

struct HyperbolicPath
{
    HyperbolicParams params;
    std::uint64_t seed = 0;
    /// Recorded every `stride` integrator steps, including t = 0 and t = T.
    std::size_t stride = 1;
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> xi;
    /// (x_i - x_{i-1}) / y_{i-1}; zero at the first record.
    std::vector<double> dx;

    std::size_t size() const noexcept { return t.size(); }
};

/// Simulates one path from (x0, y0), y0 > 0. stride must divide the step
/// count. x and y are derived as v exp(u) and exp(u); for kappa < 1, v grows
/// like exp((1 - kappa) t) and overflows past t ~ 700 / (1 - kappa). Use dx
/// for distances along the path.
HyperbolicPath simulate_hyperbolic_path(HyperbolicParams const& params, double x0, double y0,
                                        std::uint64_t seed, std::size_t stride = 1);

/// Mean and standard error of (u_T - u_0) / T over an ensemble with a common
/// horizon.
LyapunovEstimate leafwise_lyapunov(std::span<HyperbolicPath const> paths);

/// (u_T - u_0) / T for n_paths full simulations; path i uses
/// derive_seed(seed, i). Nothing but the endpoint is kept.
std::vector<double> leaf_lyapunov_samples(HyperbolicParams const& params, double x0, double y0,
                                          std::size_t n_paths, std::uint64_t seed,
                                          Execution exec = Execution::parallel);

enum class VMode
{
    direct,
    from_xy
};

/// Path of v on the recorded grid: direct mode integrates
/// dv = (2 - kappa) v dt + sqrt(2 (1 + v^2)) dW by Euler-Maruyama, from_xy
/// mode simulates the plane path from (v0, 1) and returns x / y.
std::vector<double> simulate_v_process(HyperbolicParams const& params, double v0,
                                       std::uint64_t seed, VMode mode, std::size_t stride = 1);

/// v_T for n_paths paths; path i uses derive_seed(seed, i).
std::vector<double> v_terminal_samples(HyperbolicParams const& params, double v0,
                                       std::size_t n_paths, std::uint64_t seed, VMode mode,
                                       Execution exec = Execution::parallel);

struct XiReport
{
    double kappa = 0.0;
    bool stationary_regime = false;  // kappa > 1

    // kappa > 1
    double window = 10.0;
    std::size_t bins = 200;
    std::vector<double> empirical;         // second half [T/2, T]
    std::vector<double> empirical_first;   // first half [0, T/2]
    std::vector<double> density;           // bin masses of cosh^(1-kappa)
    double w1_to_density = 0.0;
    double w1_halves = 0.0;

    // kappa <= 1
    bool escaped = false;
    std::optional<double> exit_time;
};

/// Bin masses of the density proportional to cosh(xi)^(1-kappa) on
/// [-window, window], integrated by composite Simpson and normalized.
std::vector<double> xi_stationary_density(double kappa, double window, std::size_t bins);

/// W1 between two histograms on a common uniform grid of the real line.
double line_wasserstein1(std::span<double const> a, std::span<double const> b, double bin_width);

/// Simulates d xi = (1 - kappa) tanh(xi) dt + sqrt(2 dt) N from xi0. For
/// kappa > 1 compares occupation histograms with the stationary density; for
/// kappa <= 1 records the first time |xi| exceeds the window.
XiReport xi_stationarity_test(HyperbolicParams const& params, std::uint64_t seed,
                              double xi0 = 0.0, std::size_t bins = 200, double window = 10.0);

/// First time |xi| > window for n_runs independent runs (empty if no exit
/// before the horizon); run i uses derive_seed(seed, i).
std::vector<std::optional<double>> xi_exit_times(HyperbolicParams const& params,
                                                 std::size_t n_runs, std::uint64_t seed,
                                                 double xi0 = 0.0, double window = 10.0,
                                                 Execution exec = Execution::parallel);

/// Hyperbolic distance between (u1, v1) and (u2, v2), computed as
/// 2 asinh(sqrt(A) / 2) with A = (v2 e^h - v1 e^-h)^2 + 4 sinh^2 h,
/// h = (u2 - u1) / 2; equivalent to the half-plane formula
/// cosh d = 1 + |z1 - z2|^2 / (2 y1 y2) without overflow.
double leaf_distance(double u1, double v1, double u2, double v2) noexcept;
/// Distance from z1 to z2 given du = u2 - u1 and rel = (x2 - x1) / y1.
double displacement_distance(double du, double rel) noexcept;
/// Same distance from half-plane coordinates.
double hyperbolic_distance(double x1, double y1, double x2, double y2) noexcept;

struct DiscretizationRecord
{
    double delta = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> distance;   // dist(z_{n-1}, z_n), n = 1..
    std::vector<std::size_t> k;     // floor(distance) + 1
    std::vector<std::size_t> K;     // cumulative sums of k

    /// K_n / n for n = 1..
    std::vector<double> ratios() const;
};

/// Samples the path at multiples of delta. Throws std::invalid_argument
/// unless delta is a multiple of the recorded time step.
DiscretizationRecord discretize_path(HyperbolicPath const& path, double delta);

/// Monte Carlo c = E[k_1] + 1 from n_samples independent delta-steps
/// started at (0, 1); the step law is the same from every start because the
/// generator is invariant under the affine group.
double lln_constant(HyperbolicParams const& params, std::size_t n_samples, std::uint64_t seed,
                    Execution exec = Execution::parallel);

/// CSV with header t,x,y,u,v,xi.
void write_path_csv(std::ostream& os, HyperbolicPath const& path);

}  // namespace rcd
