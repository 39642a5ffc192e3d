#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mml/battery.hpp"
#include "mml/experiment.hpp"
#include "mml/io.hpp"

using namespace mml;

TEST_CASE("every battery passes a short run") {
    for (const auto& name : battery_names()) {
        auto r = run_inequality_battery(name, 8, 99);
        CHECK_MESSAGE(r.pass(), name);
        CHECK(r.rows.size() == 8);
        for (const auto& row : r.rows) {
            CHECK(row.pass == (row.lhs <= row.rhs + 1e-6));
            CHECK(row.witness.empty());
        }
    }
    CHECK(battery_names().size() == 13);
}

TEST_CASE("battery determinism and errors") {
    auto a = run_inequality_battery("key_lp", 6, 5), b = run_inequality_battery("key_lp", 6, 5);
    CHECK(battery_csv(a) == battery_csv(b));
    auto c = run_inequality_battery("key_lp", 6, 6);
    CHECK(battery_csv(a) != battery_csv(c));
    CHECK(battery_csv(a).rfind("lemma,", 0) == 0);
    try {
        run_inequality_battery("no_such_lemma", 1, 1);
        FAIL("unknown lemma accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadSpec);
    }
}

TEST_CASE("forced failures carry witnesses") {
    // Negative tolerance forces failures, exercising the witness path.
    auto r = run_inequality_battery("LO", 4, 3, -1e6);
    CHECK(r.failures == 4);
    for (const auto& row : r.rows) {
        CHECK_FALSE(row.witness.empty());
        CHECK(row.witness.front() == '{');
    }
}

TEST_CASE("random tiny spaces") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        auto x = random_tiny_space(rng, 3, 6);
        for (std::size_t i = 0; i < x.size(); ++i) {
            double k = x.w(i) * 6;
            CHECK(std::abs(k - std::round(k)) < 1e-12);
        }
    }
}

TEST_CASE("experiment spec serialisation") {
    ExperimentSpec s;
    s.suite = "box_convergence";
    s.seeds = {3, 4};
    s.n_list = {1, 2};
    s.size = 12;
    s.out_dir = "x";
    s.svg = false;
    auto back = spec_from_json(spec_to_json(s));
    CHECK(back.suite == s.suite);
    CHECK(back.seeds == s.seeds);
    CHECK(back.n_list == s.n_list);
    CHECK(back.size == s.size);
    CHECK(back.out_dir == s.out_dir);
    CHECK(back.svg == s.svg);
    CHECK_THROWS_AS(spec_from_json(json{{"seeds", {1}}}), Error);
    ExperimentSpec bad;
    bad.suite = "nope";
    try {
        run_suite(bad);
        FAIL("unknown suite accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadSpec);
    }
}

TEST_CASE("experiment artifacts are reproducible") {
    auto dir = std::filesystem::temp_directory_path() / "mml_exp_test";
    std::filesystem::remove_all(dir);
    ExperimentSpec s;
    s.suite = "box_convergence";
    s.size = 10;
    s.out_dir = dir.string();
    auto r1 = run_suite(s);
    CHECK(r1.pass());
    auto read = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string first = read(dir / "box_convergence.csv");
    auto r2 = run_suite(s);
    CHECK(read(dir / "box_convergence.csv") == first);
    CHECK(first == r1.csv);
    CHECK(r2.summary().find("PASS") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("classifier suite") {
    ExperimentSpec s;
    s.suite = "classifier_demo";
    s.n_list = {1, 2, 4, 8};
    auto r = run_suite(s);
    CHECK(r.pass());
    CHECK(r.svg.find("<polyline") != std::string::npos);
}

TEST_CASE("slope and svg helpers") {
    std::vector<double> x = {1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3 / std::sqrt(v));
    CHECK(loglog_slope(x, y) == doctest::Approx(-0.5));
    auto svg = svg_polyline("t", "x", "y", x, {y}, {"a"}, true, true);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}
