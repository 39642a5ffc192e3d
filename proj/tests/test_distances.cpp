#include <doctest.h>

#include <cmath>
#include <random>

#include "mml/distances.hpp"
#include "mml/gallery.hpp"
#include "mml/invariants.hpp"
#include "mml/product.hpp"
#include "oracles.hpp"

using namespace mml;

namespace {

FiniteMMSpace one_point() { return line_space({0}, {1}); }

FiniteMMSpace uniform_random(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0, 2);
    std::vector<std::vector<double>> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return validate_space(raw_from_coords(std::move(pts), CoordMetric::Euclidean, 1.0));
}

}  // namespace

TEST_CASE("ky fan") {
    std::vector<double> w(4, 0.25), f = {1, 2, 3, 4};
    CHECK(ky_fan(w, f, f) == 0);
    CHECK(ky_fan(w, f, {1, 2, 3, 4.5}) == doctest::Approx(0.25));
    for (double c : {0.1, 0.6, 1.0, 2.5}) {
        std::vector<double> g = {1 + c, 2 + c, 3 + c, 4 + c};
        CHECK(ky_fan(w, f, g) == doctest::Approx(std::min(c, 1.0)));
        CHECK(ky_fan(w, f, g) == doctest::Approx(oracle::ky_bisect(w, f, g)).epsilon(1e-9));
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1.5);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + t % 8;
        auto m = oracle::random_measure(rng, n);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        CHECK(ky_fan(m, a, b) == doctest::Approx(oracle::ky_bisect(m, a, b)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(ky_fan(two_point(1), {0, 1}, {0}), Error);
}

TEST_CASE("prokhorov examples") {
    auto x = two_point(1);
    CHECK(prokhorov(x, {0.5, 0.5}, {0.5, 0.5}).value == 0);
    auto r = prokhorov(x, {1, 0}, {0.5, 0.5});
    CHECK(r.value == doctest::Approx(0.5));
    CHECK(prokhorov(x, {1, 0}, {0.5, 0.5}, 2).value == doctest::Approx(0.25));
    CHECK(prokhorov_bruteforce(x, {1, 0}, {0.5, 0.5}, 2) == doctest::Approx(0.25));
    CHECK(oracle::prok_bisect(x.dist(), {1, 0}, {0.5, 0.5}, 2) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(r.plan.satisfies({1, 0}, {0.5, 0.5}, x.dist()));
    CHECK(r.plan.deficiency <= r.value + 1e-12);
}

TEST_CASE("prokhorov against the subset definition") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 150; ++t) {
        std::size_t n = 1 + t % 6;
        auto x = oracle::random_space(rng, n);
        auto mu = oracle::random_measure(rng, n, true), nu = oracle::random_measure(rng, n, true);
        double lambda = t % 3 == 0 ? 1.0 : t % 3 == 1 ? 0.5 : 2.0;
        auto r = prokhorov(x, mu, nu, lambda);
        CHECK(r.value == doctest::Approx(oracle::prok_bisect(x.dist(), mu, nu, lambda)).epsilon(1e-7));
        CHECK(r.value == doctest::Approx(prokhorov_bruteforce(x, mu, nu, lambda)).epsilon(1e-9));
        CHECK(r.value == doctest::Approx(prokhorov(x, nu, mu, lambda).value).epsilon(1e-9));
        CHECK(r.plan.satisfies(mu, nu, x.dist()));
        CHECK(r.plan.deficiency <= lambda * r.value + 1e-9);
    }
    std::vector<double> d(13 * 13, 1.0);
    for (int i = 0; i < 13; ++i) d[i * 14] = 0;
    std::vector<double> w(13, 1.0 / 13);
    CHECK_THROWS_AS(prokhorov_bruteforce(d, w, w), Error);
}

TEST_CASE("prokhorov is below ky fan of pushforwards") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0, 2);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 2 + t % 5;
        auto m = oracle::random_measure(rng, n);
        std::vector<double> f(n), g(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = u(rng);
            g[i] = u(rng);
        }
        // Both pushforwards live on the union of the values.
        std::vector<double> pos(f);
        pos.insert(pos.end(), g.begin(), g.end());
        std::vector<double> mf(2 * n, 0), mg(2 * n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            mf[i] = m[i];
            mg[n + i] = m[i];
        }
        std::vector<double> dist(4 * n * n);
        for (std::size_t i = 0; i < 2 * n; ++i)
            for (std::size_t j = 0; j < 2 * n; ++j) dist[i * 2 * n + j] = std::abs(pos[i] - pos[j]);
        CHECK(prokhorov(dist, mf, mg).value <= ky_fan(m, f, g) + 1e-9);
    }
}

TEST_CASE("box distance: closed forms and oracle") {
    auto x = two_point(1);
    CHECK(box_distance(x, x).upper == doctest::Approx(0));
    auto b = box_distance(one_point(), x);
    CHECK(b.exact);
    CHECK(b.upper == doctest::Approx(0.5));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 3);
    for (int t = 0; t < 40; ++t) {
        double a = u(rng), c = u(rng);
        auto r = box_distance(two_point(a), two_point(c));
        CHECK(r.exact);
        CHECK(r.upper == doctest::Approx(std::min(0.5, std::abs(a - c))));
    }
    for (int t = 0; t < 30; ++t) {
        std::size_t n = 2 + t % 3;
        auto p = uniform_random(rng, n), q = uniform_random(rng, n);
        auto r = box_distance(p, q);
        CHECK(r.exact);
        CHECK(r.upper == doctest::Approx(oracle::box_uniform_bijections(p, q)));
    }
    auto w = validate_space(raw_from_coords({{0.0}, {1.0}}, CoordMetric::Euclidean, 1, {1 / M_PI, 1 - 1 / M_PI}));
    CHECK_THROWS_AS(box_distance(w, x), Error);
}

TEST_CASE("box distance: bound mode brackets the exact value") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 15; ++t) {
        auto p = uniform_random(rng, 3), q = uniform_random(rng, 3);
        auto e = box_distance(p, q);
        auto bnd = box_distance(p, q, BoxMode::Bound);
        CHECK_FALSE(bnd.exact);
        CHECK(bnd.lower <= e.upper + 1e-9);
        CHECK(bnd.upper >= e.upper - 1e-9);
    }
}

TEST_CASE("box distance is at most twice prokhorov on a common carrier") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick(0, 4);
    for (int t = 0; t < 30; ++t) {
        auto x = uniform_random(rng, 3);
        std::vector<double> mu(3, 0), nu(3, 0);
        for (int k = 0; k < 4; ++k) {
            mu[pick(rng) % 3] += 0.25;
            nu[pick(rng) % 3] += 0.25;
        }
        auto a = reweight(x, mu), c = reweight(x, nu);
        CHECK(box_distance(a, c).upper <= 2 * prokhorov(x, mu, nu).value + 1e-9);
    }
}

TEST_CASE("epsilon mm-isomorphism") {
    std::mt19937_64 rng(23);
    auto x = uniform_random(rng, 4);
    auto id = epsilon_mm_iso_search(x, x);
    CHECK(id.eps == doctest::Approx(0).epsilon(1e-12));
    auto r = epsilon_mm_iso_search(two_point(1), two_point(1.2));
    CHECK(r.eps == doctest::Approx(0.2));
    CHECK(r.prok == doctest::Approx(0));
    CHECK(r.discrepancy == doctest::Approx(0.2));
    CHECK(r.exhaustive);
    for (int t = 0; t < 20; ++t) {
        auto p = uniform_random(rng, 2 + t % 3), q = uniform_random(rng, 2 + t % 3);
        auto iso = epsilon_mm_iso_search(p, q);
        auto s = score_iso_map(p, q, iso.map);
        CHECK(s.eps == doctest::Approx(iso.eps));
        CHECK(box_distance(p, q).upper <= 3 * iso.eps + 1e-9);
    }
}

TEST_CASE("lipschitz up to eps") {
    std::mt19937_64 rng(29);
    auto x = uniform_random(rng, 5);
    std::vector<std::size_t> idm = {0, 1, 2, 3, 4};
    CHECK(lip_up_to_eps(x, x, idm).eps == 0);
    CHECK(lip_up_to_eps(x, one_point(), {0, 0, 0, 0, 0}).eps == 0);
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(0.005 * k);
    for (int t = 0; t < 20; ++t) {
        auto p = oracle::random_space(rng, 2 + t % 5), q = oracle::random_space(rng, 3);
        std::vector<std::size_t> map(p.size());
        for (auto& m : map) m = rng() % 3;
        auto l = lip_up_to_eps(p, q, map, grid);
        CHECK(l.exact);
        CHECK(l.eps == doctest::Approx(oracle::lip_grid_enum(p, q, map, grid)));
    }
}

TEST_CASE("example glued interval: lipschitz and certificate") {
    auto e = glued_interval(16, 1000, 7);
    CHECK(lip_up_to_eps(e.xn, e.limit, e.p).eps <= 0.15);
    auto e2 = glued_interval(16, 1500, 7);
    CertificateOptions co;
    co.max_target = e2.limit.size();
    auto c = concentration_certificate(e2.xn, e2.limit, e2.p, co);
    CHECK_FALSE(c.haus_descent);
    CHECK(c.epsilon <= 0.25);
    CHECK(c.epsilon >= std::max({c.epsilon_lip, c.epsilon_prok, c.epsilon_haus}));
}

TEST_CASE("concentration certificate") {
    std::mt19937_64 rng(37);
    auto x = uniform_random(rng, 4);
    auto id = concentration_certificate(x, x, {0, 1, 2, 3});
    CHECK(id.epsilon <= 1e-6);

    auto two = two_point(2);
    auto c = concentration_certificate(two, one_point(), {0, 0});
    // Lip_1 of a point is the constants; the best constant against f = d(., x0).
    double best = 1;
    for (double k = -1; k <= 3; k += 1.0 / 256) best = std::min(best, oracle::ky_bisect({0.5, 0.5}, {0, 2}, {k, k}));
    CHECK(c.epsilon_haus == doctest::Approx(best).epsilon(1e-6));
    CHECK(c.epsilon_haus == doctest::Approx(0.5));
    CHECK(c.epsilon_prok == 0);
    CHECK(c.epsilon_lip == 0);

    std::vector<double> d(7 * 7, 1.0);
    for (int i = 0; i < 7; ++i) d[i * 8] = 0;
    auto seven = uniform_space(d, 7);
    try {
        concentration_certificate(seven, seven, {0, 1, 2, 3, 4, 5, 6});
        FAIL("large target accepted");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::TargetTooLarge);
    }
}

TEST_CASE("product inequalities") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 100; ++t) {
        auto x = oracle::random_space(rng, 3), y = oracle::random_space(rng, 3);
        auto mu = oracle::random_measure(rng, 3), mu2 = oracle::random_measure(rng, 3);
        auto nu = oracle::random_measure(rng, 3), nu2 = oracle::random_measure(rng, 3);
        auto f = t % 2 ? fn::lp(2) : fn::exp_log();
        auto r = lprok_product_check(x, mu, mu2, y, nu, nu2, f, 1.0);
        CHECK(r.pass);
        // Oracle on the factors: both sides recomputed from the subset definition.
        double a = oracle::prok_bisect(x.dist(), mu, mu2), b = oracle::prok_bisect(y.dist(), nu, nu2);
        CHECK(r.rhs == doctest::Approx(std::max(a + b, 2 * f(a, b))).epsilon(1e-6));
    }
    auto same = lprok_product_check(two_point(1), {0.5, 0.5}, {0.5, 0.5}, two_point(2), {0.3, 0.7}, {0.3, 0.7},
                                    fn::lp(2));
    CHECK(same.lhs == 0);
    CHECK(same.pass);

    auto x = two_point(1), z = two_point(2);
    auto eq = box_product_check(x, x, z, z, fn::lp(2));
    CHECK(eq.lhs == doctest::Approx(0));
    std::uniform_real_distribution<double> u(0.05, 3);
    for (int t = 0; t < 50; ++t) {
        auto p = two_point(u(rng)), q = two_point(u(rng)), r = two_point(u(rng)), s = two_point(u(rng));
        auto l2 = box_product_check(p, q, r, s, fn::lp(2));
        CHECK(l2.pass);
        CHECK(l2.lhs <= box_distance(p, q).upper + box_distance(r, s).upper + 1e-9);
        CHECK(box_product_check(p, q, r, s, fn::exp_log()).pass);
    }
}
