#include <doctest.h>

#include <cmath>
#include <random>

#include "mml/gallery.hpp"
#include "mml/invariants.hpp"
#include "oracles.hpp"

using namespace mml;

namespace {

OdOptions exact() {
    OdOptions o;
    o.mode = OdMode::ExactTiny;
    return o;
}

OdOptions heuristic(std::size_t budget = 4000) {
    OdOptions o;
    o.mode = OdMode::HeuristicLb;
    o.budget = budget;
    return o;
}

}  // namespace

TEST_CASE("partial diameter") {
    auto u = make_distribution({0, 1, 2, 3}, {0.25, 0.25, 0.25, 0.25});
    CHECK(partial_diameter(u, 0.5) == doctest::Approx(1));
    CHECK(partial_diameter(u, 0.5) == doctest::Approx(oracle::pd_subsets({0, 1, 2, 3}, {0.25, 0.25, 0.25, 0.25}, 0.5)));
    CHECK(partial_diameter(u, 0.25) == 0);
    CHECK(partial_diameter(u, 1) == doctest::Approx(3));
    CHECK_THROWS_AS(partial_diameter(u, 0), Error);
    CHECK_THROWS_AS(partial_diameter(u, 1.5), Error);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> pos(-3, 3);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + t % 12;
        std::vector<double> v(n);
        for (auto& p : v) p = pos(rng);
        auto w = oracle::random_measure(rng, n);
        double prev = 0;
        for (double a : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
            double pd = pd_of_values(v, w, a);
            CHECK(pd == doctest::Approx(oracle::pd_subsets(v, w, a)).epsilon(1e-12));
            CHECK(pd >= prev - 1e-12);
            prev = pd;
        }
    }
}

TEST_CASE("observable diameter: small cases") {
    auto x = two_point(2);
    CHECK(observable_diameter(x, 0.3, exact()).value == doctest::Approx(2));
    CHECK(observable_diameter(x, 0.6, exact()).value == doctest::Approx(0));
    auto one = line_space({0}, {1});
    CHECK(observable_diameter(one, 0.2, exact()).value == 0);
    CHECK(observable_diameter(one, 0.2, heuristic()).value == 0);
    CHECK_THROWS_AS(observable_diameter(x, 0, exact()), Error);
    CHECK_THROWS_AS(observable_diameter(x, 1, exact()), Error);
}

TEST_CASE("observable diameter: oracle, monotonicity, lower bounds") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 25; ++t) {
        auto x = oracle::random_space(rng, 2 + t % 4);
        double prev = 1e300;
        for (double k : {0.05, 0.2, 0.4}) {
            auto e = observable_diameter(x, k, exact());
            CHECK(e.mode == OdMode::ExactTiny);
            CHECK(is_1lipschitz(x, e.witness));
            CHECK(pd_of_values(e.witness, x.weights(), 1 - k) == doctest::Approx(e.value));
            double delta = x.diameter() / 32;
            double o = oracle::od_mcshane_grid(x, k, delta);
            CHECK(std::abs(e.value - o) <= 2 * delta);
            CHECK(e.value <= prev + 1e-12);
            prev = e.value;
            CHECK(observable_diameter(x, k, heuristic()).value <= e.value + 1e-9);
        }
    }
}

TEST_CASE("heuristic observable diameter is reproducible") {
    auto s = sample_sphere(4, 1, 300, SphereMetric::Chordal, 3).space;
    auto a = observable_diameter(s, 0.1, heuristic(2000));
    auto b = observable_diameter(s, 0.1, heuristic(2000));
    CHECK(a.value == b.value);
    CHECK(a.witness == b.witness);
    CHECK(is_1lipschitz(s, a.witness));
    CHECK(pd_of_values(a.witness, s.weights(), 0.9) == doctest::Approx(a.value));
    CHECK(a.value > 0);
    CHECK(observable_family(s, 40, 3).size() >= 40);
}

TEST_CASE("concentration function") {
    CHECK(concentration_function(two_point(2), 1).upper == doctest::Approx(0.5));
    CHECK(concentration_function(two_point(2), 3).upper == 0);
    CHECK(concentration_function(line_space({0}, {1}), 0.5).upper == 0);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        auto x = oracle::random_space(rng, 2 + t % 7);
        for (double r : {0.3, 1.0, 2.0}) {
            auto c = concentration_function(x, r);
            CHECK(c.exact);
            CHECK(c.upper == doctest::Approx(oracle::conc_enum(x, r)));
        }
    }
}

TEST_CASE("levy mean") {
    auto a = make_distribution({0, 2}, {0.5, 0.5});
    auto mi = median_interval(a);
    CHECK(mi.lo == 0);
    CHECK(mi.hi == 2);
    CHECK(levy_mean(a) == doctest::Approx(1));
    CHECK(levy_mean(make_distribution({3.5}, {1})) == 3.5);
    CHECK(levy_mean(make_distribution({0, 1, 5}, {0.25, 0.5, 0.25})) == doctest::Approx(1));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> pos(-3, 3);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + t % 9;
        std::vector<double> v(n);
        for (auto& p : v) p = pos(rng);
        auto w = oracle::random_measure(rng, n);
        auto m = oracle::median_scan(v, w);
        CHECK(levy_mean_of(v, w) == doctest::Approx((m.lo + m.hi) / 2));
    }
}

TEST_CASE("levy radius") {
    CHECK(levy_radius(line_space({0}, {1}), 0.3, exact()).value == 0);
    CHECK(levy_radius(two_point(2), 0.3, exact()).value == doctest::Approx(1));
    std::mt19937_64 rng(6);
    for (int t = 0; t < 15; ++t) {
        auto x = oracle::random_space(rng, 2 + t % 4);
        for (double k : {0.1, 0.3, 0.45}) {
            auto lr = levy_radius(x, k, exact());
            CHECK(lr.value <= observable_diameter(x, k, exact()).value + 1e-6);
            CHECK(levy_deviation(lr.witness, x.weights(), k) == doctest::Approx(lr.value));
        }
    }
}

TEST_CASE("kappa distance") {
    auto x = line_space({0, 0.1, 5, 5.1}, {0.25, 0.25, 0.25, 0.25});
    CHECK(kappa_distance(x, {0}, {2}, 0.3).value == 0);
    CHECK(kappa_distance(line_space({0, 3}, {0.5, 0.5}), {0}, {1}, 0.4).value == doctest::Approx(3));
    auto k = kappa_distance(x, {0, 1}, {2, 3}, 0.25);
    CHECK(k.exact);
    CHECK(k.value == doctest::Approx(oracle::kappa_distance_enum(x, {0, 1}, {2, 3}, 0.25)));
    CHECK(k.value == doctest::Approx(5.1));
    std::mt19937_64 rng(12);
    for (int t = 0; t < 30; ++t) {
        auto y = oracle::random_space(rng, 6);
        std::vector<std::size_t> a1 = {0, 1, 2}, a2 = {2, 3, 4, 5};
        double kap = 0.05 + 0.05 * (t % 5);
        CHECK(kappa_distance(y, a1, a2, kap).value == doctest::Approx(oracle::kappa_distance_enum(y, a1, a2, kap)));
    }
}
