#include <doctest.h>

#include <cmath>
#include <random>

#include "mml/core.hpp"
#include "mml/io.hpp"
#include "oracles.hpp"

using namespace mml;

namespace {

RawSpace raw(std::vector<double> d, std::vector<double> w) {
    RawSpace r;
    r.dist = std::move(d);
    r.weight = std::move(w);
    return r;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("validate: smallest space") {
    auto x = validate_space(raw({0, 1, 1, 0}, {0.5, 0.5}));
    CHECK(x.size() == 2);
    CHECK(x.d(0, 1) == 1);
    CHECK(x.labels().size() == 2);
}

TEST_CASE("validate: errors") {
    CHECK(kind_of([] { validate_space(raw({0, 1, 5, 1, 0, 1, 5, 1, 0}, {0.3, 0.3, 0.4})); }) ==
          ErrorKind::TriangleViolation);
    CHECK(kind_of([] { validate_space(raw({0, 1, 1, 0}, {1.5, -0.5})); }) == ErrorKind::NegativeWeight);
    CHECK(kind_of([] { validate_space(raw({0, 1, 1, 0}, {0.5, 0.6})); }) == ErrorKind::NotNormalized);
    CHECK(kind_of([] { validate_space(raw({0, 1, 1}, {0.5, 0.5})); }) == ErrorKind::BadShape);
    CHECK(kind_of([] { validate_space(raw({0, 1, 2, 0}, {0.5, 0.5})); }) == ErrorKind::BadShape);
    CHECK(kind_of([] { validate_space(raw({1, 1, 1, 0}, {0.5, 0.5})); }) == ErrorKind::BadShape);
}

TEST_CASE("validate: zero weights leave the support") {
    auto x = validate_space(raw({0, 1, 2, 1, 0, 1, 2, 1, 0}, {0.5, 0.5, 0.0}));
    CHECK(x.size() == 2);
    CHECK(x.w(0) == doctest::Approx(0.5));
    CHECK(x.d(0, 1) == 1);
}

TEST_CASE("pushforward") {
    auto x = validate_space(raw({0, 2, 2, 0}, {0.5, 0.5}));
    auto d = pushforward(x, {0, 2});
    REQUIRE(d.atoms.size() == 2);
    CHECK(d.atoms[0].pos == 0);
    CHECK(d.atoms[1].mass == doctest::Approx(0.5));

    auto c = pushforward(x, {3, 3});
    REQUIRE(c.atoms.size() == 1);
    CHECK(c.atoms[0].mass == doctest::Approx(1));

    auto u = uniform_space({0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 0, 1, 1, 1, 1, 0}, 4);
    auto m = pushforward(u, {1, 0, 1, 0});
    REQUIRE(m.atoms.size() == 2);
    CHECK(m.atoms[0].pos == 0);
    CHECK(m.atoms[0].mass == doctest::Approx(0.5));
    CHECK(m.atoms[1].pos == 1);

    CHECK(kind_of([&] { pushforward(x, {1, 2, 3}); }) == ErrorKind::HostMismatch);
}

TEST_CASE("mm_isomorphic") {
    auto a = validate_space(raw({0, 1, 3, 1, 0, 2.5, 3, 2.5, 0}, {0.2, 0.3, 0.5}));
    auto b = validate_space(raw({0, 2.5, 1, 2.5, 0, 3, 1, 3, 0}, {0.3, 0.5, 0.2}));
    auto sigma = mm_isomorphic(a, b);
    REQUIRE(sigma);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.w(i) == doctest::Approx(b.w((*sigma)[i])));
        for (std::size_t j = 0; j < 3; ++j) CHECK(a.d(i, j) == doctest::Approx(b.d((*sigma)[i], (*sigma)[j])));
    }
    CHECK_FALSE(mm_isomorphic(validate_space(raw({0, 1, 1, 0}, {0.5, 0.5})),
                              validate_space(raw({0, 2, 2, 0}, {0.5, 0.5}))));
    CHECK_FALSE(mm_isomorphic(validate_space(raw({0, 1, 1, 0}, {0.5, 0.5})),
                              validate_space(raw({0, 1, 1, 0}, {0.25, 0.75}))));
    std::vector<double> big(11 * 11, 1.0);
    for (int i = 0; i < 11; ++i) big[i * 12] = 0;
    auto u = uniform_space(big, 11);
    CHECK(kind_of([&] { mm_isomorphic(u, u); }) == ErrorKind::TooLarge);
}

TEST_CASE("coordinate spaces") {
    auto r = raw_from_coords({{2, 0, 0}, {0, 2, 0}, {-2, 0, 0}}, CoordMetric::GeodesicSphere, 2.0);
    auto x = validate_space(r);
    CHECK(x.d(0, 1) == doctest::Approx(M_PI));   // quarter circle of radius 2
    CHECK(x.d(0, 2) == doctest::Approx(2 * M_PI));
    CHECK(x.w(0) == doctest::Approx(1.0 / 3));
    auto e = validate_space(raw_from_coords({{0, 0}, {3, 4}}, CoordMetric::Euclidean, 1.0));
    CHECK(e.d(0, 1) == doctest::Approx(5));
}

TEST_CASE("lipschitz helpers") {
    auto x = line_space({0, 1, 3}, {0.2, 0.3, 0.5});
    CHECK(x.d(0, 2) == 3);
    CHECK(is_1lipschitz(x, {0, 1, 3}));
    CHECK_FALSE(is_1lipschitz(x, {0, 2, 3}));
    auto c = lipschitz_excess(x, {0, 2, 3});
    CHECK(c.max_ratio_excess == doctest::Approx(1));
}

TEST_CASE("reweight drops zero mass") {
    auto x = line_space({0, 1, 3}, {0.2, 0.3, 0.5});
    auto y = reweight(x, {0.5, 0, 0.5});
    CHECK(y.size() == 2);
    CHECK(y.d(0, 1) == 3);
}

TEST_CASE("json round trip") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        auto x = oracle::random_space(rng, 1 + t % 6);
        auto y = space_from_json(json::parse(space_to_json(x).dump()));
        CHECK(y.dist() == x.dist());
        CHECK(y.weights() == x.weights());
        CHECK(y.labels() == x.labels());
    }
    auto coords = space_from_json(json::parse(R"({"coords":[[0,0],[3,4]],"metric":"euclidean"})"));
    CHECK(coords.d(0, 1) == doctest::Approx(5));
    CHECK(coords.w(1) == doctest::Approx(0.5));
}

TEST_CASE("fmt12") {
    CHECK(fmt12(0.1) == "0.1");
    CHECK(fmt12(1.0 / 3) == "0.333333333333");
    CHECK(fmt12(2) == "2");
}
