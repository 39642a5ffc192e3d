#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mml/core.hpp"
#include "mml/mpf.hpp"

namespace mml {

// Sub-coupling pi (row-major rows x cols) supported on d <= radius.
struct SubtransportPlan {
    std::size_t rows = 0, cols = 0;
    std::vector<double> pi;
    double radius = 0;
    double deficiency = 1;

    double at(std::size_t i, std::size_t j) const { return pi[i * cols + j]; }
    // Row/column sums within the marginals and support within the radius, all up to tol.
    bool satisfies(const std::vector<double>& mu, const std::vector<double>& nu, const std::vector<double>& dist,
                   double tol = 1e-12) const;
};

struct ProkResult {
    double value = 0;
    SubtransportPlan plan;
};

// lambda-Prokhorov distance between two measures on one carrier (dist is n x n).
// Exact: the max-flow value is constant between consecutive distinct distances,
// so the infimum is located by a binary search over those breakpoints.
ProkResult prokhorov(const std::vector<double>& dist, const std::vector<double>& mu, const std::vector<double>& nu,
                     double lambda = 1.0);
ProkResult prokhorov(const FiniteMMSpace& x, const std::vector<double>& mu, const std::vector<double>& nu,
                     double lambda = 1.0);

// Direct evaluation of the defining inequality over all subsets, n <= 12.
double prokhorov_bruteforce(const std::vector<double>& dist, const std::vector<double>& mu,
                            const std::vector<double>& nu, double lambda = 1.0);
double prokhorov_bruteforce(const FiniteMMSpace& x, const std::vector<double>& mu, const std::vector<double>& nu,
                            double lambda = 1.0);

// inf { eps : m(|f - g| > eps) <= eps }
double ky_fan(const std::vector<double>& w, const std::vector<double>& f, const std::vector<double>& g);
double ky_fan(const FiniteMMSpace& x, const std::vector<double>& f, const std::vector<double>& g);

enum class BoxMode { ExactTiny, Bound };

struct BoxResult {
    double lower = 0, upper = 0;
    bool exact = false;
    std::size_t chunks = 0;  // equal-mass chunks used in exact mode
};

// ExactTiny: both weight vectors must be multiples of 1/q with a common
// q <= 8; the spaces are cut into 8 (or the largest multiple of q below it)
// equal chunks and every chunk bijection is scored.
// Bound: upper = 3 eps of the best eps-mm-isomorphism found, lower from
// partial-diameter profiles (exact for <= 16 points, else 0).
BoxResult box_distance(const FiniteMMSpace& x, const FiniteMMSpace& y, BoxMode mode = BoxMode::ExactTiny,
                       std::size_t budget = 20000, std::uint64_t seed = 7);

struct IsoResult {
    double eps = 1;
    std::vector<std::size_t> map;
    std::vector<std::size_t> domain;
    double mass_deficit = 1, discrepancy = 0, prok = 1;
    bool exhaustive = false;
};

// Scores one point map X -> Y.
IsoResult score_iso_map(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& map);
IsoResult epsilon_mm_iso_search(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t budget = 20000,
                                std::uint64_t seed = 7);

struct LipDomain {
    double mass = 0;
    std::vector<std::size_t> domain;
    bool exact = false;
};

// Heaviest domain on which d_Y(p x, p x') <= d_X(x, x') + eps. Exact for n <= 16,
// greedy removal of the most-violating point otherwise.
LipDomain lip_domain_at(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& p,
                        double eps);

struct LipUpTo {
    double eps = 1;
    std::vector<std::size_t> domain;
    bool exact = false;
};

// Smallest eps in the grid with a domain of mass >= 1 - eps. An empty grid
// means the exact continuous minimum for n <= 16 and a 0.005 step grid otherwise.
LipUpTo lip_up_to_eps(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& p,
                      const std::vector<double>& eps_grid = {});

// min over g in Lip_1(Y) of ky(f, g o p), by coordinate descent over fibre quantiles.
// Without `descend` only the clamped fibre Levy means are scored.
double pullback_ky(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& p,
                   const std::vector<double>& f, std::vector<double>* best_g = nullptr, bool descend = true);

struct ConcentrationCertificate {
    std::vector<std::size_t> map;
    double epsilon_lip = 1;
    std::vector<std::size_t> lip_domain;
    bool lip_exact = false;
    double epsilon_prok = 1;
    double epsilon_haus = 0;
    std::vector<double> haus_witness;  // observable on X attaining epsilon_haus
    std::string haus_family;
    std::size_t observables = 0;
    bool haus_descent = true;  // false when the target was too large for the descent
    double epsilon = 1;
};

struct CertificateOptions {
    std::size_t budget = 48;  // observables probed on X
    std::uint64_t seed = 7;
    // Targets above 6 points skip the coordinate descent over Lip_1(Y): each fibre gets its clamped
    // Levy mean, which can only overstate epsilon_haus.
    std::size_t max_target = 6;
};

// Y must have at most 6 points. `budget` is the number of observables probed.
ConcentrationCertificate concentration_certificate(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                                   const std::vector<std::size_t>& p, std::size_t budget = 48,
                                                   std::uint64_t seed = 7);
ConcentrationCertificate concentration_certificate(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                                   const std::vector<std::size_t>& p, const CertificateOptions& o);

struct InequalityCheck {
    bool pass = false;
    double lhs = 0, rhs = 0;
    std::string detail;
};

// prok_lambda(mu x nu, mu2 x nu2) on X x_F Y against
// max{a + b, 2F(a, b)} with a = prok_lambda(mu, mu2), b = prok_lambda(nu, nu2).
InequalityCheck lprok_product_check(const FiniteMMSpace& x, const std::vector<double>& mu,
                                    const std::vector<double>& mu2, const FiniteMMSpace& y,
                                    const std::vector<double>& nu, const std::vector<double>& nu2, const Mpf& f,
                                    double lambda = 1.0);

// box(X x_F Z, Y x_F W) against max{a + b, 2F(a/2, b/2)}, a = box(X,Y), b = box(Z,W);
// for l_p functions the sharper a + b is asserted as well.
InequalityCheck box_product_check(const FiniteMMSpace& x, const FiniteMMSpace& y, const FiniteMMSpace& z,
                                  const FiniteMMSpace& w, const Mpf& f);

}  // namespace mml
