#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double subset_mass(const Vec& w, unsigned s) {
    double m = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (s >> i & 1u) m += w[i];
    return m;
}

}  // namespace

double pd_subsets(const Vec& values, const Vec& weights, double alpha) {
    const std::size_t n = values.size();
    double best = kInf;
    for (unsigned s = 1; s < (1u << n); ++s) {
        if (subset_mass(weights, s) < alpha - 1e-12) continue;
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 0; i < n; ++i)
            if (s >> i & 1u) {
                lo = std::min(lo, values[i]);
                hi = std::max(hi, values[i]);
            }
        best = std::min(best, hi - lo);
    }
    return best;
}

double od_mcshane_grid(const mml::FiniteMMSpace& x, double kappa, double delta) {
    const std::size_t n = x.size();
    if (n == 1) return 0;
    const int range = static_cast<int>(std::ceil(x.diameter() / delta)) + 1;
    std::vector<int> v(n, 0);
    Vec f(n);
    double best = 0;
    // v[0] = 0 by translation invariance; v[i] constrained by rounded Lipschitz bounds.
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            for (std::size_t a = 0; a < n; ++a) {
                double m = kInf;
                for (std::size_t b = 0; b < n; ++b) m = std::min(m, v[b] * delta + x.d(a, b));
                f[a] = m;
            }
            best = std::max(best, pd_subsets(f, x.weights(), 1 - kappa));
            return;
        }
        for (int k = -range; k <= range; ++k) {
            bool ok = true;
            for (std::size_t j = 0; j < i && ok; ++j) ok = std::abs(k - v[j]) * delta <= x.d(i, j) + delta + 1e-12;
            if (!ok) continue;
            v[i] = k;
            rec(i + 1);
        }
    };
    rec(1);
    return best;
}

double prok_bisect(const Vec& dist, const Vec& mu, const Vec& nu, double lambda) {
    const std::size_t n = mu.size();
    auto feasible = [&](double eps) {
        for (unsigned a = 1; a < (1u << n); ++a) {
            double hood = 0;
            for (std::size_t i = 0; i < n; ++i) {
                bool near = false;
                for (std::size_t j = 0; j < n && !near; ++j) near = (a >> j & 1u) && dist[i * n + j] <= eps;
                if (near) hood += mu[i];
            }
            if (hood < subset_mass(nu, a) - lambda * eps - 1e-13) return false;
        }
        return true;
    };
    double lo = 0, hi = 1.0 / lambda + *std::max_element(dist.begin(), dist.end());
    if (feasible(0)) return 0;
    for (int it = 0; it < 100; ++it) {
        double mid = (lo + hi) / 2;
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

double ky_bisect(const Vec& w, const Vec& f, const Vec& g) {
    auto feasible = [&](double eps) {
        double m = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (std::abs(f[i] - g[i]) > eps) m += w[i];
        return m <= eps + 1e-13;
    };
    double lo = 0, hi = 1;
    if (feasible(0)) return 0;
    for (int it = 0; it < 100; ++it) {
        double mid = (lo + hi) / 2;
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

Median median_scan(const Vec& values, const Vec& weights) {
    Median m{kInf, -kInf};
    for (double v : values) {
        double below = 0, above = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] <= v) below += weights[i];
            if (values[i] >= v) above += weights[i];
        }
        if (below >= 0.5 - 1e-12) m.lo = std::min(m.lo, v);
        if (above >= 0.5 - 1e-12) m.hi = std::max(m.hi, v);
    }
    return m;
}

double conc_enum(const mml::FiniteMMSpace& x, double r) {
    const std::size_t n = x.size();
    double best = 0;
    for (unsigned a = 1; a < (1u << n); ++a) {
        if (subset_mass(x.weights(), a) < 0.5 - 1e-12) continue;
        double hood = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = kInf;
            for (std::size_t j = 0; j < n; ++j)
                if (a >> j & 1u) d = std::min(d, x.d(i, j));
            if (d < r) hood += x.w(i);
        }
        best = std::max(best, 1 - hood);
    }
    return best;
}

double kappa_distance_enum(const mml::FiniteMMSpace& x, const std::vector<std::size_t>& a1,
                           const std::vector<std::size_t>& a2, double kappa) {
    double best = 0;
    for (unsigned b1 = 1; b1 < (1u << a1.size()); ++b1) {
        double m1 = 0;
        for (std::size_t i = 0; i < a1.size(); ++i)
            if (b1 >> i & 1u) m1 += x.w(a1[i]);
        if (m1 < kappa - 1e-12) continue;
        for (unsigned b2 = 1; b2 < (1u << a2.size()); ++b2) {
            double m2 = 0, d = kInf;
            for (std::size_t j = 0; j < a2.size(); ++j)
                if (b2 >> j & 1u) {
                    m2 += x.w(a2[j]);
                    for (std::size_t i = 0; i < a1.size(); ++i)
                        if (b1 >> i & 1u) d = std::min(d, x.d(a1[i], a2[j]));
                }
            if (m2 >= kappa - 1e-12) best = std::max(best, d);
        }
    }
    return best;
}

double box_uniform_bijections(const mml::FiniteMMSpace& x, const mml::FiniteMMSpace& y) {
    const std::size_t n = x.size();
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    double best = 1;
    do {
        for (unsigned s = 1; s < (1u << n); ++s) {
            double disc = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if ((s >> i & 1u) && (s >> j & 1u))
                        disc = std::max(disc, std::abs(x.d(i, j) - y.d(sigma[i], sigma[j])));
            double kept = static_cast<double>(__builtin_popcount(s)) / static_cast<double>(n);
            best = std::min(best, std::max(disc, 1 - kept));
        }
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return best;
}

double lip_grid_enum(const mml::FiniteMMSpace& x, const mml::FiniteMMSpace& y, const std::vector<std::size_t>& p,
                     const Vec& grid) {
    const std::size_t n = x.size();
    for (double eps : grid) {
        for (unsigned s = 1; s < (1u << n); ++s) {
            if (subset_mass(x.weights(), s) < 1 - eps - 1e-12) continue;
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i)
                for (std::size_t j = 0; j < n && ok; ++j)
                    if ((s >> i & 1u) && (s >> j & 1u)) ok = y.d(p[i], p[j]) <= x.d(i, j) + eps + 1e-12;
            if (ok) return eps;
        }
    }
    return 1;
}

bool triangle_ok(const Vec& dist, std::size_t n, double tol) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (dist[i * n + k] > dist[i * n + j] + dist[j * n + k] + tol) return false;
    return true;
}

Vec random_measure(std::mt19937_64& rng, std::size_t n, bool sparse) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution drop(0.3);
    Vec w(n);
    for (auto& v : w) v = sparse && drop(rng) ? 0.0 : u(rng);
    if (std::accumulate(w.begin(), w.end(), 0.0) == 0) w[0] = 1;
    double t = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= t;
    return w;
}

mml::FiniteMMSpace random_space(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0, 3);
    std::vector<std::vector<double>> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    return mml::validate_space(mml::raw_from_coords(std::move(pts), mml::CoordMetric::Euclidean, 1.0,
                                                    random_measure(rng, n)));
}

}  // namespace oracle
