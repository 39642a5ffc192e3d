#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mml/core.hpp"

namespace mml {

// Shortest closed interval carrying mass >= alpha.
double partial_diameter(const RealDistribution& d, double alpha);

// Partial diameter of f_* m for values f on x.
double pd_of_values(const std::vector<double>& f, const std::vector<double>& w, double alpha);

enum class OdMode { ExactTiny, HeuristicLb, Auto };

struct OdOptions {
    OdMode mode = OdMode::Auto;
    std::size_t budget = 20000;  // observable evaluations in heuristic mode
    std::uint64_t seed = 7;
    std::size_t exact_limit = 6;
    // Fraction of the budget spent on single-value local moves.
    double local_share = 0.5;
};

struct ODEstimate {
    double kappa = 0;
    double value = 0;
    OdMode mode = OdMode::ExactTiny;
    std::vector<double> witness;
    std::size_t evaluations = 0;
    std::string family;  // which family produced the witness
};

ODEstimate observable_diameter(const FiniteMMSpace& x, double kappa, const OdOptions& opt = {});

// Candidate 1-Lipschitz observables used by the heuristic searches: distance
// functions, Kuratowski minima of shifted distances, and coordinate
// projections when the space carries coordinates.
struct Observable {
    std::vector<double> values;
    std::string family;
};
std::vector<Observable> observable_family(const FiniteMMSpace& x, std::size_t count, std::uint64_t seed);

struct ConcentrationValue {
    double lower = 0, upper = 0;
    bool exact = false;
};
ConcentrationValue concentration_function(const FiniteMMSpace& x, double r);

struct MedianInterval {
    double lo = 0, hi = 0;
};
MedianInterval median_interval(const RealDistribution& d);
double levy_mean(const RealDistribution& d);
double levy_mean_of(const std::vector<double>& f, const std::vector<double>& w);

// Smallest eps with m(|f - lm(f)| > eps) <= kappa.
double levy_deviation(const std::vector<double>& f, const std::vector<double>& w, double kappa);

struct LREstimate {
    double kappa = 0;
    double value = 0;
    OdMode mode = OdMode::ExactTiny;
    std::vector<double> witness;
};
LREstimate levy_radius(const FiniteMMSpace& x, double kappa, const OdOptions& opt = {});

struct KappaDistance {
    double kappa = 0;
    double value = 0;
    std::vector<std::size_t> b1, b2;
    bool exact = true;
};
KappaDistance kappa_distance(const FiniteMMSpace& x, const std::vector<std::size_t>& a1,
                             const std::vector<std::size_t>& a2, double kappa);

}  // namespace mml
