#include "doctest.h"

#include <cmath>
#include <numeric>

#include "rcd/basin.hpp"
#include "rcd/dichotomy.hpp"
#include "rcd/lyapunov.hpp"
#include "rcd/measure.hpp"

using namespace rcd;

namespace {

double const golden = std::sqrt(2.0) - 1.0;

MoebiusMap conj(MoebiusMap const& g, double t)
{
    return compose(compose(MoebiusMap::rotation(t), g), MoebiusMap::rotation(-t));
}

GeneratorSystem proximal_pair()
{
    auto g = MoebiusMap::diagonal(2.0);
    return {{g, conj(g, 0.29)}, ConstantWeights{{0.5, 0.5}}};
}

GeneratorSystem symmetric_proximal()
{
    auto g = MoebiusMap::diagonal(2.0);
    auto h = conj(g, 0.29);
    return {{g, invert(g), h, invert(h)}, ConstantWeights{{0.25, 0.25, 0.25, 0.25}}};
}

GeneratorSystem two_attractors()
{
    return {{MoebiusMap::diagonal(0.5), MoebiusMap::diagonal(2.0)},
            CosineWeights{{{0.5, 0.8, 0.0}, {0.5, -0.8, 0.0}}}};
}

}  // namespace

TEST_SUITE("lyapunov_dichotomy")
{
    TEST_CASE("trajectory estimator: rotations give exactly zero")
    {
        GeneratorSystem sys({MoebiusMap::rotation(golden), MoebiusMap::rotation(0.2)},
                            ConstantWeights{{0.5, 0.5}});
        auto e = estimate_lyapunov_trajectory(sys, CirclePoint(0.3), 1000, 8, 1);
        CHECK(e.value == 0.0);
        CHECK(e.std_error == 0.0);
        CHECK(e.method == LyapunovEstimate::Method::trajectory);
        CHECK(e.n_paths == 8);
        CHECK(e.horizon == 1000);
    }

    TEST_CASE("trajectory estimator: attracting fixed point gives -log 2")
    {
        GeneratorSystem sys({MoebiusMap::diagonal(std::sqrt(2.0))}, ConstantWeights{{1.0}});
        auto e = estimate_lyapunov_trajectory(sys, CirclePoint(0.5), 1000, 4, 1);
        CHECK(e.value == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
        // from a generic start the orbit settles on the attractor
        auto f = estimate_lyapunov_trajectory(sys, CirclePoint(0.2), 100000, 4, 1);
        CHECK(std::abs(f.value + std::log(2.0)) < 1e-3);
    }

    TEST_CASE("trajectory estimator preconditions")
    {
        auto sys = proximal_pair();
        CHECK_THROWS(estimate_lyapunov_trajectory(sys, CirclePoint(0.1), 99, 4, 1));
        CHECK_THROWS(estimate_lyapunov_trajectory(sys, CirclePoint(0.1), 100, 1, 1));
    }

    TEST_CASE("formula estimator: examples")
    {
        GeneratorSystem rot({MoebiusMap::rotation(golden), MoebiusMap::rotation(-golden)},
                            ConstantWeights{{0.5, 0.5}});
        auto r = lyapunov_from_formula(rot, GridMeasure::uniform(512));
        CHECK(std::abs(r.value) <= 1e-12);
        CHECK(r.quadrature_bound == 0.0);

        // north-south map with its Dirac stationary measure
        GeneratorSystem ns({MoebiusMap::diagonal(2.0)}, ConstantWeights{{1.0}});
        auto st = stationary_measure(ns, 512, 1e-12, 100000);
        auto f = lyapunov_from_formula(ns, st.measure);
        double at_attractor = MoebiusMap::diagonal(2.0).log_derivative(CirclePoint(0.5));
        CHECK(at_attractor == doctest::Approx(std::log(0.25)).epsilon(1e-14));
        CHECK(std::abs(f.value - at_attractor) <= f.quadrature_bound + 1e-12);
    }

    TEST_CASE("trajectory and formula estimators agree on the proximal pair")
    {
        auto sys = proximal_pair();
        auto traj = estimate_lyapunov_trajectory(sys, CirclePoint(0.1234567), 10000, 64, 3);
        auto st = stationary_measure(sys, 512, 1e-10, 100000);
        REQUIRE(st.report.converged);
        auto f = lyapunov_from_formula(sys, st.measure);
        CHECK(traj.value < 0.0);
        CHECK(std::abs(traj.value - f.value) <= 3.0 * (traj.std_error + f.quadrature_bound));
    }

    TEST_CASE("conjugation by a rotation leaves the exponent unchanged")
    {
        auto sys = symmetric_proximal();
        std::vector<CircleMap> rotated;
        for (auto const& g : sys.generators())
            rotated.push_back(conj(std::get<MoebiusMap>(g), 0.137));
        GeneratorSystem conjugated(rotated, sys.weighting());
        auto a = estimate_lyapunov_trajectory(sys, CirclePoint(0.3), 5000, 32, 10);
        auto b = estimate_lyapunov_trajectory(conjugated, CirclePoint(0.3 + 0.137), 5000, 32, 11);
        double combined = std::hypot(a.std_error, b.std_error);
        CHECK(std::abs(a.value - b.value) <= 3.0 * combined);
    }

    TEST_CASE("ensembles are identical serial and parallel")
    {
        auto sys = symmetric_proximal();
        auto s = lyapunov_samples(sys, CirclePoint(0.3), 2000, 16, 99, Execution::serial);
        auto p = lyapunov_samples(sys, CirclePoint(0.3), 2000, 16, 99, Execution::parallel);
        CHECK(s == p);
    }

    TEST_CASE("dichotomy: rotation pair has an invariant measure")
    {
        GeneratorSystem sys({MoebiusMap::rotation(golden), MoebiusMap::rotation(-golden)},
                            ConstantWeights{{0.5, 0.5}});
        DichotomyParams p;
        p.invariance_tol = 1e-3;
        p.ue_steps = 100000;
        auto v = classify_dichotomy(sys, p);
        CHECK(v.verdict == Verdict::invariant_measure);
        CHECK(to_string(v.verdict) == "InvariantMeasure");
        for (double r : v.invariance_residuals)
            CHECK(r < 1e-3);
    }

    TEST_CASE("dichotomy: symmetric proximal system contracts")
    {
        DichotomyParams p;
        p.seed = 5;
        auto v = classify_dichotomy(symmetric_proximal(), p);
        CHECK(v.symmetric);
        CHECK_FALSE(v.invariant_measure_found);
        CHECK(v.verdict == Verdict::negative_exponent_uniquely_ergodic);
        CHECK(v.lyapunov.value + 3.0 * v.lyapunov.std_error < 0.0);
        CHECK(v.ue_spread < 0.03);
        CHECK(v.stationary_vs_empirical < 0.02);
    }

    TEST_CASE("dichotomy: non-symmetric expanding start is inconclusive")
    {
        GeneratorSystem sys({MoebiusMap::diagonal(2.0)}, ConstantWeights{{1.0}});
        DichotomyParams p;
        p.lyapunov_start = 0.0;  // the repelling fixed point
        p.ue_steps = 10000;
        auto v = classify_dichotomy(sys, p);
        CHECK_FALSE(v.symmetric);
        CHECK(v.lyapunov.value >= 0.0);
        CHECK(v.verdict == Verdict::non_symmetric_inconclusive);
        CHECK(to_string(v.verdict) == "NonSymmetricInconclusive");
    }

    TEST_CASE("dichotomy verdicts are mutually exclusive")
    {
        // the two affirmative verdicts can never both hold: check the evidence
        // on systems from both branches
        for (auto const& sys : {symmetric_proximal(),
                                GeneratorSystem({MoebiusMap::rotation(0.1), MoebiusMap::rotation(-0.1)},
                                                ConstantWeights{{0.5, 0.5}})})
        {
            DichotomyParams p;
            p.ue_steps = 100000;
            auto v = classify_dichotomy(sys, p);
            bool inv = v.verdict == Verdict::invariant_measure;
            bool neg = v.verdict == Verdict::negative_exponent_uniquely_ergodic;
            CHECK_FALSE((inv && neg));
            if (neg)
                CHECK(v.lyapunov.value + 3.0 * v.lyapunov.std_error < 0.0);
            if (inv)
                CHECK(v.invariant_measure_found);
        }
    }

    TEST_CASE("dichotomy on point-dependent weights skips the symmetric branch")
    {
        DichotomyParams p;
        p.ue_steps = 20000;
        auto v = classify_dichotomy(two_attractors(), p);
        CHECK_FALSE(v.symmetry.has_value());
        CHECK(v.verdict != Verdict::invariant_measure);
    }

    TEST_CASE("basin: start on a common fixed point")
    {
        std::vector<Attractor> att{{"0", {0.0}}, {"1/2", {0.5}}};
        auto est = estimate_basin_probabilities(two_attractors(), att, CirclePoint(0.0), 500, 200, 0.01, 1);
        CHECK(est.probabilities[0] == 1.0);
        CHECK(est.counts[0] == 200);
        CHECK(est.unresolved_count == 0);
    }

    TEST_CASE("basin: proximity ordering and exact accounting")
    {
        std::vector<Attractor> att{{"0", {0.0}}, {"1/2", {0.5}}};
        auto est = estimate_basin_probabilities(two_attractors(), att, CirclePoint(0.01), 2000, 1000, 0.01, 2);
        CHECK(est.probabilities[0] > est.probabilities[1]);
        std::size_t total = std::accumulate(est.counts.begin(), est.counts.end(), est.unresolved_count);
        CHECK(total == est.n_paths);
        double sum = est.unresolved;
        for (double p : est.probabilities)
            sum += p;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        for (std::size_t j = 0; j < 2; ++j)
        {
            CHECK(est.ci_low[j] <= est.probabilities[j]);
            CHECK(est.probabilities[j] <= est.ci_high[j]);
        }
    }

    TEST_CASE("basin: argument checks")
    {
        std::vector<Attractor> none;
        CHECK_THROWS(estimate_basin_probabilities(two_attractors(), none, CirclePoint(0.1), 100, 10, 0.01, 1));
        std::vector<Attractor> att{{"0", {0.0}}};
        CHECK_THROWS(estimate_basin_probabilities(two_attractors(), att, CirclePoint(0.1), 100, 10, 0.0, 1));
    }

    TEST_CASE("basin: paths that never settle stay unresolved")
    {
        GeneratorSystem rot({MoebiusMap::rotation(golden)}, ConstantWeights{{1.0}});
        std::vector<Attractor> att{{"0", {0.0}}};
        auto est = estimate_basin_probabilities(rot, att, CirclePoint(0.3), 1000, 50, 0.01, 1);
        CHECK(est.unresolved_count == 50);
        CHECK(est.unresolved == 1.0);
    }
}
