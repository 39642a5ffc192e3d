#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mml/mpf.hpp"

namespace mml {

// ---- triangle triplets -----------------------------------------------------

struct TripletOptions {
    std::size_t samples = 100000;
    double horizon = 10.0;
    std::uint64_t seed = 7;
    double tol = 1e-9;
};

struct TripletVerdict {
    bool violation = false;
    // Per-coordinate triangle triplets and the F values that failed to form one.
    std::vector<double> a, b, c;
    double fa = 0, fb = 0, fc = 0;
    std::size_t tested = 0;
    bool zero_set_ok = true;  // F(0)=0 and F>0 on the sampled shells
    std::string zero_set_note;
    // "violation" or "no violation found": the sampler cannot prove validity.
    std::string label() const;
    std::string detail() const;
};

bool is_triangle_triplet(double a, double b, double c, double tol = 0);

TripletVerdict check_triangle_triplets(const Mpf& f, const TripletOptions& opt = {});

// ---- isotone defect --------------------------------------------------------

struct DefectReport {
    double D = 0, h = 0, probe = 0;
    std::size_t arity = 0;
    std::size_t per_axis = 0;  // grid points per axis on [0, D]
    std::vector<double> table; // row-major, first argument slowest
    double sup_defect = 0;
    std::vector<double> argsup;

    double at_index(const std::vector<std::size_t>& idx) const;
    // Nearest grid entry.
    double at(const std::vector<double>& x) const;
};

DefectReport defect_table(const Mpf& f, double D, double h, double probe, bool refine = true);

// Golden-section search for a minimum on [lo, hi]; endpoints included.
double golden_min(const std::function<double(double)>& g, double lo, double hi, int iters = 60,
                  double* argmin = nullptr);

// Minimum of a function over an axis-aligned box: grid with `per_axis` points,
// then coordinate-wise golden refinement around the best cell.
double box_min(const Mpf& f, const std::vector<double>& lo, const std::vector<double>& hi, std::size_t per_axis,
               std::vector<double>* argmin = nullptr);

// ---- classifier ------------------------------------------------------------

struct ClassifyOptions {
    std::vector<int> n_list{1, 2, 4, 8, 16};
    std::vector<double> D_list{4, 8};
    double h = 1.0 / 64;
    double probe = 0;  // 0: max(D_list, n + 8) for each n
    double tol = 1e-6;
};

struct SequenceVerdict {
    // (1) isotone for all n, (2) sup defect -> 0, (3) bounded sup defect -> 0,
    // (4) pointwise defect -> 0, (5) limit isotone.
    std::array<bool, 5> cond{};
    std::array<bool, 5> raw{};
    bool chain_repaired = false;
    std::vector<int> n_list;
    std::vector<double> probe_used;
    std::vector<double> sup_all;                    // per n
    std::vector<std::vector<double>> sup_bounded;   // [D][n]
    std::vector<double> worst_point;                // grid point with the slowest pointwise decay
    std::vector<double> worst_point_defects;        // per n
    double limit_sup_defect = 0;
    std::vector<double> uniform_gap;                // sup |F_n - F| on [0, max D]^N, per n
    bool uniform_convergence = false;
    bool pointwise_convergence = false;
};

// Numerical reading of "v_n -> 0" along n_list: either the last value is below
// tol, or the sequence is nonincreasing and has decayed at least like n^{-1/2}.
bool tends_to_zero(const std::vector<double>& v, const std::vector<int>& n, double tol);

SequenceVerdict classify_sequence(const std::function<Mpf(int)>& family, const Mpf& limit,
                                  const ClassifyOptions& opt = {});

// Convexity of phi and of log(phi(exp(.))) on a sampled grid, as in the
// Mulholland sufficient condition.
struct MulhollandConvexity {
    bool phi_convex = true;
    bool log_exp_convex = true;
    double witness_phi = 0, witness_log = 0;
};
MulhollandConvexity mulholland_convexity(const Mpf& phi, double top = 8.0, std::size_t steps = 2048);

}  // namespace mml
