#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mml/core.hpp"
#include "mml/mpf.hpp"

namespace mml {

enum class SphereMetric { Chordal, Geodesic };

struct SphereSample {
    int n = 1;            // intrinsic dimension, points live in R^{n+1}
    double r = 1;
    std::size_t N = 0;
    SphereMetric metric = SphereMetric::Chordal;
    std::uint64_t seed = 7;
    bool antipodal = false;  // second half is the negation of the first half
    FiniteMMSpace space;
};

// Normalised Gaussian vectors scaled to radius r, uniform weights. With
// `antipodal`, N/2 points are drawn and their negations appended, so the
// sample is closed under x -> -x. Samples are memoised under $MML_CACHE_DIR.
SphereSample sample_sphere(int n, double r, std::size_t N, SphereMetric metric, std::uint64_t seed,
                           bool antipodal = false);

FiniteMMSpace two_point(double s, double w0 = 0.5);
FiniteMMSpace four_point_Z(double alpha, double beta, double gamma);

struct GluedInterval {
    FiniteMMSpace xn;     // interval atoms first, then sphere points
    FiniteMMSpace limit;  // interval atoms, then the atom at 3pi/2
    std::vector<std::size_t> p;
    std::size_t interval_atoms = 0;
};

// Interval [0,pi] as ceil(N/4) midpoint atoms (total mass 1/2) glued at pi to a
// geodesic S^n(1) sample of N points (total mass 1/2).
GluedInterval glued_interval(int n, std::size_t n_sphere, std::uint64_t seed);

struct CounterexampleBundle {
    double s = 0, t = 0, s_n = 0, t_n = 0, eta = 0;
    double r_n = 0, rho_n = 0;
    int k_n = 0, l_n = 0;
    bool dimension_capped = false;
    Mpf f;

    FiniteMMSpace x, y;          // two-point factors
    FiniteMMSpace x_n, y_n;      // factor x_2 antipodal sphere sample; index = i * N + a
    std::size_t sphere_points = 0;

    // 1-dim construction
    FiniteMMSpace transformed;   // (x_n, F o d)
    FiniteMMSpace y_lim;         // two-point, d = min of F on [s, s_n]
    FiniteMMSpace naive_limit;   // two-point, d = F(s)
    std::vector<std::size_t> fiber;      // x_n point -> factor index
    std::vector<std::size_t> antipode;   // T(x0, a) = (x1, -a)

    // 2-dim construction
    double alpha = 0, beta = 0, gamma = 0;
    FiniteMMSpace z;
};

inline constexpr int kSphereDimCap = 256;

// F is the family member F_n (unary). Requires s < s_n and F(s) > F(s_n).
CounterexampleBundle build_counterexample_1dim(const Mpf& f, double s, double s_n, int n, std::size_t N,
                                               std::uint64_t seed);

// F is the binary member F_n. Requires s < s_n, t < t_n and F(s,t) > F(s_n,t_n).
CounterexampleBundle build_counterexample_2dim(const Mpf& f, double s, double t, double s_n, double t_n, int n,
                                               std::size_t N, std::uint64_t seed);

// alpha, beta, gamma as minima of F over their rectangles (128x128 grid + refinement).
struct Triplet3 {
    double alpha, beta, gamma;
};
Triplet3 rectangle_minima(const Mpf& f, double s, double t, double s_n, double t_n);

}  // namespace mml
