#include <doctest.h>

#include <cmath>
#include <random>

#include "mml/gallery.hpp"
#include "mml/mpf.hpp"
#include "mml/product.hpp"
#include "oracles.hpp"

using namespace mml;

TEST_CASE("product distances") {
    auto p = product({two_point(3), two_point(4)}, fn::lp(2));
    REQUIRE(p.size() == 4);
    CHECK(p.d(0, 3) == doctest::Approx(5));
    CHECK(p.w(0) == doctest::Approx(0.25));
    CHECK(p.labels()[3].find("⊗") != std::string::npos);

    std::mt19937_64 rng(5);
    auto x = oracle::random_space(rng, 3), y = oracle::random_space(rng, 4);
    auto m = product({x, y}, fn::max());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
            auto a = product_coords({x, y}, i), b = product_coords({x, y}, j);
            CHECK(m.d(i, j) == doctest::Approx(std::max(x.d(a[0], b[0]), y.d(a[1], b[1]))));
            CHECK(m.w(i) == doctest::Approx(x.w(a[0]) * y.w(a[1])));
        }
}

TEST_CASE("cyclic product of three factors") {
    auto p = product({two_point(1), two_point(2), two_point(3)}, fn::cyclic(3));
    CHECK(p.size() == 8);
    CHECK(p.d(0, 7) == doctest::Approx(5));
    CHECK(product_index({two_point(1), two_point(2), two_point(3)}, {1, 1, 1}) == 7);
}

TEST_CASE("product errors") {
    std::vector<double> d(70 * 70, 1.0);
    for (int i = 0; i < 70; ++i) d[i * 71] = 0;
    auto big = uniform_space(d, 70);
    CHECK_THROWS_AS(product({big, big}, fn::lp(1)), Error);
    try {
        product({big, big}, fn::lp(1));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CapExceeded);
    }
    try {
        product({two_point(1), two_point(1)}, fn::compose(fn::power(2), fn::lp(2), {fn::identity(), fn::identity()}));
        FAIL("squared sum accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MetricViolation);
    }
    CHECK_THROWS_AS(product({two_point(1)}, fn::lp(2)), Error);
}

TEST_CASE("Minkowski ordering and set distances") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 5; ++t) {
        auto x = oracle::random_space(rng, 3), y = oracle::random_space(rng, 3);
        auto p1 = product({x, y}, fn::lp(1)), p2 = product({x, y}, fn::lp(2)), p3 = product({x, y}, fn::lp(3));
        for (std::size_t k = 0; k < p1.dist().size(); ++k) {
            CHECK(p2.dist()[k] <= p1.dist()[k] + 1e-12);
            CHECK(p3.dist()[k] <= p2.dist()[k] + 1e-12);
        }
        // d_F(A x B, A' x B') = F(d(A, A'), d(B, B')) for isotone F.
        for (unsigned a = 1; a < 8; ++a)
            for (unsigned a2 = 1; a2 < 8; ++a2)
                for (unsigned b = 1; b < 8; ++b)
                    for (unsigned b2 = 1; b2 < 8; b2 += 3) {
                        auto setd = [](const FiniteMMSpace& s, unsigned u, unsigned v) {
                            double m = 1e300;
                            for (std::size_t i = 0; i < 3; ++i)
                                for (std::size_t j = 0; j < 3; ++j)
                                    if ((u >> i & 1u) && (v >> j & 1u)) m = std::min(m, s.d(i, j));
                            return m;
                        };
                        double lhs = 1e300;
                        for (std::size_t i = 0; i < 9; ++i)
                            for (std::size_t j = 0; j < 9; ++j)
                                if ((a >> (i / 3) & 1u) && (b >> (i % 3) & 1u) && (a2 >> (j / 3) & 1u) &&
                                    (b2 >> (j % 3) & 1u))
                                    lhs = std::min(lhs, p2.d(i, j));
                        CHECK(lhs == doctest::Approx(fn::lp(2)(setd(x, a, a2), setd(y, b, b2))));
                    }
    }
}

TEST_CASE("product view matches the materialised product") {
    std::mt19937_64 rng(2);
    auto x = oracle::random_space(rng, 3), y = oracle::random_space(rng, 2), z = oracle::random_space(rng, 2);
    auto f = fn::exp_log(3);
    auto p = product({x, y, z}, f);
    ProductView v({x, y, z}, f);
    REQUIRE(v.size() == p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(v.w(i) == doctest::Approx(p.w(i)));
        for (std::size_t j = 0; j < p.size(); ++j) CHECK(v.d(i, j) == p.d(i, j));
    }
}

TEST_CASE("metric transform") {
    std::mt19937_64 rng(4);
    auto x = oracle::random_space(rng, 5);
    auto id = metric_transform(x, fn::identity());
    CHECK(id.dist() == x.dist());
    CHECK(metric_transform(two_point(5), fn::h1()).d(0, 1) == doctest::Approx(1));
    CHECK(metric_transform(two_point(5), fn::min_clamp(fn::identity(), 2)).d(0, 1) == doctest::Approx(2));
    auto fg = metric_transform(x, fn::compose(fn::h1(), fn::identity(), {fn::min_clamp(fn::identity(), 2.5)}));
    auto gf = metric_transform(metric_transform(x, fn::min_clamp(fn::identity(), 2.5)), fn::h1());
    for (std::size_t k = 0; k < fg.dist().size(); ++k) CHECK(fg.dist()[k] == doctest::Approx(gf.dist()[k]));
    try {
        metric_transform(line_space({0, 1, 2}, {0.3, 0.3, 0.4}), fn::power(2));
        FAIL("square accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MetricViolation);
    }
}

TEST_CASE("levy projection") {
    auto x = two_point(1.5), y = two_point(0.8);
    std::vector<double> f(4), g_const(4, 2.0);
    for (std::size_t i = 0; i < 4; ++i) f[i] = x.d(i / 2, 0);
    auto g = levy_projection(x, y, 1, f, Factor::First);
    CHECK(g[0] == doctest::Approx(0));
    CHECK(g[1] == doctest::Approx(1.5));
    auto c = levy_projection(x, y, 1, g_const, Factor::Second);
    CHECK(c[0] == doctest::Approx(2));
    CHECK(c[1] == doctest::Approx(2));

    // f = l1 distance to (x0, y0); fibre medians by direct scan.
    std::vector<double> l1(4);
    for (std::size_t i = 0; i < 4; ++i) l1[i] = x.d(i / 2, 0) + y.d(i % 2, 0);
    auto h = levy_projection(x, y, 1, l1, Factor::First);
    for (std::size_t a = 0; a < 2; ++a) {
        auto m = oracle::median_scan({l1[2 * a], l1[2 * a + 1]}, {0.5, 0.5});
        CHECK(h[a] == doctest::Approx((m.lo + m.hi) / 2));
        CHECK(h[a] == doctest::Approx(x.d(a, 0) + 0.4));
    }

    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        auto a = oracle::random_space(rng, 3), b = oracle::random_space(rng, 3);
        auto p = product({a, b}, fn::lp(2));
        std::vector<double> obs(9);
        std::size_t anchor = t % 9;
        for (std::size_t i = 0; i < 9; ++i) obs[i] = p.d(i, anchor);
        auto gx = levy_projection(a, b, 2, obs, Factor::First);
        auto gy = levy_projection(a, b, 2, obs, Factor::Second);
        CHECK(is_1lipschitz(a, gx));
        CHECK(is_1lipschitz(b, gy));
    }
    std::vector<double> bad = {0, 5, 0, 5};
    CHECK_THROWS_AS(levy_projection(x, y, 1, bad, Factor::First), Error);
}
