#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mml/error.hpp"

namespace mml {

enum class CoordMetric { None, Euclidean, GeodesicSphere };

struct ValidateOptions {
    double triangle_tol = 1e-9;
    double mass_tol = 1e-12;
    std::size_t cap = 4096;
    // Explicit matrices up to this size get the full O(n^3) triangle check,
    // larger ones a random-triple spot check.
    std::size_t full_check_limit = 4096;
    // Matrices computed from coordinates satisfy the triangle inequality by
    // construction; above this size they get a random-triple spot check only.
    std::size_t coord_full_check_limit = 1024;
};

// Unvalidated input. `dist` is row-major n*n.
struct RawSpace {
    std::vector<std::string> labels;
    std::vector<double> dist;
    std::vector<double> weight;
    std::vector<std::vector<double>> coords;
    CoordMetric metric = CoordMetric::None;
    double radius = 1.0;
};

class FiniteMMSpace {
public:
    FiniteMMSpace() = default;

    std::size_t size() const { return n_; }
    double d(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }
    const double* row(std::size_t i) const { return dist_.data() + i * n_; }
    double w(std::size_t i) const { return weight_[i]; }
    const std::vector<double>& weights() const { return weight_; }
    const std::vector<double>& dist() const { return dist_; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool has_coords() const { return !coords_.empty(); }
    const std::vector<std::vector<double>>& coords() const { return coords_; }
    CoordMetric metric() const { return metric_; }
    double radius() const { return radius_; }

    double diameter() const;

    RawSpace to_raw() const;

private:
    friend FiniteMMSpace validate_space(RawSpace raw, const ValidateOptions& opt);

    std::size_t n_ = 0;
    std::vector<std::string> labels_;
    std::vector<double> dist_;
    std::vector<double> weight_;
    std::vector<std::vector<double>> coords_;
    CoordMetric metric_ = CoordMetric::None;
    double radius_ = 1.0;
};

// Checks metric axioms and normalisation, drops zero-weight points.
FiniteMMSpace validate_space(RawSpace raw, const ValidateOptions& opt = {});

// Distances from coordinates: Euclidean, or geodesic on the sphere of the given radius.
RawSpace raw_from_coords(std::vector<std::vector<double>> coords, CoordMetric metric,
                         double radius, std::vector<double> weights = {},
                         std::vector<std::string> labels = {});

// Points of the real line with |x-y|.
FiniteMMSpace line_space(const std::vector<double>& positions, const std::vector<double>& weights);

FiniteMMSpace uniform_space(std::vector<double> dist_rowmajor, std::size_t n);

struct Atom {
    double pos;
    double mass;
};

// Sorted atoms, positions closer than 1e-12 merged.
struct RealDistribution {
    std::vector<Atom> atoms;
    double total() const;
};

RealDistribution pushforward(const FiniteMMSpace& x, const std::vector<double>& f);
RealDistribution make_distribution(std::vector<double> pos, std::vector<double> mass);

struct LipCheck {
    double max_ratio_excess = 0;  // max over pairs of |f_i-f_j| - d_ij
    std::size_t i = 0, j = 0;
};
LipCheck lipschitz_excess(const FiniteMMSpace& x, const std::vector<double>& f);
bool is_1lipschitz(const FiniteMMSpace& x, const std::vector<double>& f, double tol = 1e-9);

// Permutation sigma with w_i = w'_sigma(i) and d_ij = d'_sigma(i)sigma(j), both within tol.
std::optional<std::vector<std::size_t>> mm_isomorphic(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                                      double tol = 1e-9);

// Measure on the same carrier, zero-weight points dropped afterwards.
FiniteMMSpace reweight(const FiniteMMSpace& x, const std::vector<double>& weights);

}  // namespace mml
