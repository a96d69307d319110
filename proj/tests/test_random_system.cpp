#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rcd/random_system.hpp"

using namespace rcd;

namespace {

// 99% two-sided binomial half-width for a frequency over n draws.
double binomial_halfwidth(double p, double n)
{
    return 2.5758293035489 * std::sqrt(p * (1.0 - p) / n);
}

GeneratorSystem rotation_pair(double a)
{
    return {{MoebiusMap::rotation(a), MoebiusMap::rotation(-a)}, ConstantWeights{{0.5, 0.5}}};
}

}  // namespace

TEST_SUITE("random_system")
{
    TEST_CASE("weights are validated")
    {
        std::vector<CircleMap> two{MoebiusMap::identity(), MoebiusMap::rotation(0.1)};
        try
        {
            GeneratorSystem sys(two, ConstantWeights{{0.5, 0.4}});
            FAIL("accepted weights summing to 0.9");
        }
        catch (std::invalid_argument const& e)
        {
            CHECK(std::string(e.what()).find("weights") != std::string::npos);
        }
        CHECK_THROWS_AS(GeneratorSystem(two, ConstantWeights{{1.0, 0.0}}), std::invalid_argument);
        CHECK_THROWS_AS(GeneratorSystem(two, ConstantWeights{{1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(GeneratorSystem(two, CosineWeights{{{1.0, 1.5, 0.0}, {1.0, 0.0, 0.0}}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(GeneratorSystem({}, ConstantWeights{{}}), std::invalid_argument);
        CHECK_NOTHROW(GeneratorSystem(two, ConstantWeights{{0.3, 0.7}}));
    }

    TEST_CASE("single generator always selects index 0")
    {
        GeneratorSystem sys({MoebiusMap::diagonal(2.0)}, ConstantWeights{{1.0}});
        Engine rng = make_engine(1);
        CirclePoint p(0.3);
        for (int i = 0; i < 1000; ++i)
        {
            auto s = sample_step(sys, p, rng);
            CHECK(s.index == 0);
            CHECK(s.next == MoebiusMap::diagonal(2.0).apply(p));
            CHECK(s.log_derivative == MoebiusMap::diagonal(2.0).log_derivative(p));
            p = s.next;
        }
    }

    TEST_CASE("constant weights: empirical frequency within the binomial bound")
    {
        GeneratorSystem sys({MoebiusMap::identity(), MoebiusMap::rotation(0.1)},
                            ConstantWeights{{0.3, 0.7}});
        Engine rng = make_engine(42);
        int const n = 100000;
        int zero = 0;
        for (int i = 0; i < n; ++i)
            zero += sample_step(sys, CirclePoint(0.2), rng).index == 0 ? 1 : 0;
        double f = static_cast<double>(zero) / n;
        CHECK(binomial_halfwidth(0.3, n) < 0.01);
        CHECK(std::abs(f - 0.3) < binomial_halfwidth(0.3, n));
    }

    TEST_CASE("point-dependent weights: frequency at a fixed point matches w_i(theta)")
    {
        GeneratorSystem sys({MoebiusMap::diagonal(0.5), MoebiusMap::diagonal(2.0)},
                            CosineWeights{{{0.5, 0.8, 0.0}, {0.5, -0.8, 0.0}}});
        for (double theta : {0.0, 0.15, 0.4})
        {
            // unnormalized weights written out independently
            double w0 = 0.5 * (1.0 + 0.8 * std::cos(2.0 * std::numbers::pi * theta));
            double w1 = 0.5 * (1.0 - 0.8 * std::cos(2.0 * std::numbers::pi * theta));
            double p0 = w0 / (w0 + w1);
            CHECK(sys.weight_at(0, theta) == doctest::Approx(p0).epsilon(1e-14));

            Engine rng = make_engine(derive_seed(9, static_cast<std::uint64_t>(theta * 100)));
            int const n = 100000;
            int zero = 0;
            for (int i = 0; i < n; ++i)
                zero += sample_step(sys, CirclePoint(theta), rng).index == 0 ? 1 : 0;
            double f = static_cast<double>(zero) / n;
            CHECK(std::abs(f - p0) < std::max(binomial_halfwidth(p0, n), 1e-12));
            CHECK(std::abs(f - p0) < 0.01);
        }
    }

    TEST_CASE("pointwise weights sum to one")
    {
        GeneratorSystem sys({MoebiusMap::diagonal(0.5), MoebiusMap::diagonal(2.0),
                             MoebiusMap::rotation(0.2)},
                            CosineWeights{{{0.3, 0.8, 0.1}, {0.7, -0.5, 2.0}, {1.1, 0.9, -1.0}}});
        std::vector<double> w(3);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i)
        {
            sys.weights_at(i / 10000.0, w);
            worst = std::max(worst, std::abs(w[0] + w[1] + w[2] - 1.0));
            CHECK(std::all_of(w.begin(), w.end(), [](double x) { return x > 0.0; }));
        }
        CHECK(worst <= 1e-12);
    }

    TEST_CASE("sample_step is reproducible from the seed")
    {
        GeneratorSystem sys({MoebiusMap::diagonal(2.0), MoebiusMap::rotation(0.29),
                             PerturbedMap(0.4, 2)},
                            ConstantWeights{{0.2, 0.5, 0.3}});
        Engine r1 = make_engine(77), r2 = make_engine(77);
        CirclePoint p1(0.1), p2(0.1);
        for (int i = 0; i < 5000; ++i)
        {
            auto a = sample_step(sys, p1, r1);
            auto b = sample_step(sys, p2, r2);
            REQUIRE(a.index == b.index);
            REQUIRE(a.next == b.next);
            REQUIRE(a.log_derivative == b.log_derivative);
            p1 = a.next;
            p2 = b.next;
        }
    }

    TEST_CASE("check_symmetry: examples")
    {
        auto r = check_symmetry(rotation_pair(0.17), 1e-12);
        CHECK(r.is_symmetric);

        GeneratorSystem ns({MoebiusMap::diagonal(2.0), MoebiusMap::diagonal(0.5)},
                           ConstantWeights{{0.6, 0.4}});
        auto n = check_symmetry(ns, 1e-12);
        CHECK_FALSE(n.is_symmetric);
        REQUIRE(n.witness.has_value());
        CHECK(*n.witness == 0);

        GeneratorSystem four({MoebiusMap::diagonal(2.0), MoebiusMap::diagonal(0.5),
                              MoebiusMap::rotation(0.3), MoebiusMap::rotation(-0.3)},
                             ConstantWeights{{0.25, 0.25, 0.25, 0.25}});
        CHECK(check_symmetry(four, 1e-12).is_symmetric);

        GeneratorSystem missing({MoebiusMap::diagonal(2.0), MoebiusMap::rotation(0.3)},
                                ConstantWeights{{0.5, 0.5}});
        CHECK_FALSE(check_symmetry(missing, 1e-12).is_symmetric);

        // a perturbed map has no inverse in the family
        GeneratorSystem pert({PerturbedMap(0.2, 1), MoebiusMap::identity()},
                             ConstantWeights{{0.5, 0.5}});
        CHECK_FALSE(check_symmetry(pert, 1e-12).is_symmetric);
    }

    TEST_CASE("check_symmetry is invariant under permutation")
    {
        std::vector<CircleMap> maps{MoebiusMap::diagonal(2.0), MoebiusMap::diagonal(0.5),
                                    MoebiusMap::rotation(0.3), MoebiusMap::rotation(-0.3),
                                    MoebiusMap::rotation(0.5)};
        std::vector<double> w{0.1, 0.1, 0.3, 0.3, 0.2};
        std::vector<int> order{0, 1, 2, 3, 4};
        auto const ref = check_symmetry(GeneratorSystem(maps, ConstantWeights{w}), 1e-12);
        CHECK(ref.is_symmetric);  // rotation by 1/2 is an involution
        do
        {
            std::vector<CircleMap> m;
            std::vector<double> p;
            for (int i : order)
            {
                m.push_back(maps[i]);
                p.push_back(w[i]);
            }
            CHECK(check_symmetry(GeneratorSystem(m, ConstantWeights{p}), 1e-12).is_symmetric ==
                  ref.is_symmetric);
        } while (std::next_permutation(order.begin(), order.end()));
    }

    TEST_CASE("check_symmetry rejects point-dependent weights")
    {
        GeneratorSystem sys({MoebiusMap::diagonal(0.5), MoebiusMap::diagonal(2.0)},
                            CosineWeights{{{0.5, 0.8, 0.0}, {0.5, -0.8, 0.0}}});
        CHECK_THROWS_WITH_AS(check_symmetry(sys, 1e-12),
                             "symmetry check unsupported for this weighting",
                             std::invalid_argument);
    }
}
