#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mml {

struct ExperimentSpec {
    std::string suite;  // sphere_od_decay, cex_1dim_collapse, lemma_batteries, box_convergence, classifier_demo
    std::vector<std::uint64_t> seeds{7};
    std::vector<int> n_list;        // suite default when empty
    std::size_t size = 0;           // sample size / trial count, suite default when 0
    std::string out_dir;            // empty: nothing written
    bool svg = true;
};

nlohmann::json spec_to_json(const ExperimentSpec& s);
ExperimentSpec spec_from_json(const nlohmann::json& j);

struct SuiteCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::string csv;
    std::string svg;  // empty when the suite has no natural plot
    std::vector<SuiteCheck> checks;
    double seconds = 0;
    bool pass() const;
    std::string summary() const;
};

const std::vector<std::string>& suite_names();

// Runs one suite; writes <out_dir>/<suite>.csv (+ .svg, summary.txt) when out_dir is set.
SuiteResult run_suite(const ExperimentSpec& spec);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Minimal polyline chart.
std::string svg_polyline(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                         const std::vector<double>& x, const std::vector<std::vector<double>>& series,
                         const std::vector<std::string>& names, bool logx = false, bool logy = false);

}  // namespace mml
