#pragma once

// Brute-force reference implementations. They share no code with the library
// beyond the FiniteMMSpace container, and favour obviousness over speed.

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "mml/core.hpp"

namespace oracle {

using Vec = std::vector<double>;

// Smallest max-min spread of values over subsets carrying mass >= alpha.
double pd_subsets(const Vec& values, const Vec& weights, double alpha);

// Sup of pd_subsets(f, m, 1-kappa) over McShane envelopes f = min_j(v_j + d(., j))
// of grid vectors v with step delta. Lies in [OD - delta, OD].
double od_mcshane_grid(const mml::FiniteMMSpace& x, double kappa, double delta);

// Bisection on eps over the subset form: mu(closed eps-hood of A) >= nu(A) - lambda eps.
double prok_bisect(const Vec& dist, const Vec& mu, const Vec& nu, double lambda = 1.0);

// Bisection on eps: mass of {|f - g| > eps} <= eps.
double ky_bisect(const Vec& w, const Vec& f, const Vec& g);

struct Median {
    double lo, hi;
};
// Lower median: least value v with m(f <= v) >= 1/2; upper: greatest v with m(f >= v) >= 1/2.
Median median_scan(const Vec& values, const Vec& weights);

// sup over A with m(A) >= 1/2 of 1 - m({d(., A) < r}).
double conc_enum(const mml::FiniteMMSpace& x, double r);

// sup over B_i subset A_i with m(B_i) >= kappa of min pairwise distance.
double kappa_distance_enum(const mml::FiniteMMSpace& x, const std::vector<std::size_t>& a1,
                           const std::vector<std::size_t>& a2, double kappa);

// Uniformly weighted spaces of equal size n: min over bijections and kept sets S of
// max(distance discrepancy on S, 1 - |S|/n).
double box_uniform_bijections(const mml::FiniteMMSpace& x, const mml::FiniteMMSpace& y);

// Smallest eps in the grid for which some set of mass >= 1 - eps has
// d_Y(p i, p j) <= d_X(i, j) + eps on all its pairs; 1 when none does.
double lip_grid_enum(const mml::FiniteMMSpace& x, const mml::FiniteMMSpace& y, const std::vector<std::size_t>& p,
                     const Vec& grid);

// Full O(n^3) triangle inequality check of a row-major matrix.
bool triangle_ok(const Vec& dist, std::size_t n, double tol = 1e-9);

// Random space with n points in the plane and random positive weights.
mml::FiniteMMSpace random_space(std::mt19937_64& rng, std::size_t n);
// Random probability vector of length n; with `sparse` some entries are zero.
Vec random_measure(std::mt19937_64& rng, std::size_t n, bool sparse = false);

}  // namespace oracle
