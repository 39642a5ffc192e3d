#include "mml/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "mml/parallel.hpp"

namespace mml {

namespace {

constexpr double kMassTol = 1e-12;

void check_kappa(double kappa) {
    if (!(kappa > 0 && kappa < 1)) throw Error(ErrorKind::BadKappa, "kappa must lie in (0,1)");
}

// Dense simplex for: maximise c.x subject to A x <= b, x >= 0, with b >= 0.
// Bland's rule; the problems here have a handful of variables.
std::vector<double> simplex_max(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                                const std::vector<double>& c) {
    const std::size_t m = A.size(), n = c.size();
    const std::size_t cols = n + m + 1;
    std::vector<std::vector<double>> T(m + 1, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
        T[i][n + i] = 1;
        T[i][cols - 1] = b[i];
    }
    for (std::size_t j = 0; j < n; ++j) T[m][j] = -c[j];
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
    const double eps = 1e-12;
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j)
            if (T[m][j] < -eps) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (T[i][enter] > eps) {
                double ratio = T[i][cols - 1] / T[i][enter];
                if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < m && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave == m) break;  // unbounded; callers bound every variable
        double piv = T[leave][enter];
        for (auto& v : T[leave]) v /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || T[i][enter] == 0) continue;
            double factor = T[i][enter];
            for (std::size_t j = 0; j < cols; ++j) T[i][j] -= factor * T[leave][j];
        }
        basis[leave] = enter;
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = std::max(0.0, T[i][cols - 1]);
    return x;
}

struct SortedValues {
    std::vector<std::pair<double, std::size_t>> v;  // (value, point)
};

double pd_sorted(const std::vector<std::pair<double, std::size_t>>& s, const std::vector<double>& w, double alpha) {
    double best = std::numeric_limits<double>::infinity();
    double mass = 0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        mass += w[s[j].second];
        while (i < j && mass - w[s[i].second] >= alpha - kMassTol) {
            mass -= w[s[i].second];
            ++i;
        }
        if (mass >= alpha - kMassTol) best = std::min(best, s[j].first - s[i].first);
    }
    return std::isinf(best) ? (s.empty() ? 0.0 : s.back().first - s.front().first) : best;
}

}  // namespace

// ---- partial diameter ------------------------------------------------------

double partial_diameter(const RealDistribution& d, double alpha) {
    if (!(alpha > 0 && alpha <= 1 + kMassTol)) throw Error(ErrorKind::BadAlpha, "alpha must lie in (0,1]");
    const auto& a = d.atoms;
    if (a.empty()) return 0;
    double best = std::numeric_limits<double>::infinity();
    double mass = 0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        mass += a[j].mass;
        while (i < j && mass - a[i].mass >= alpha - kMassTol) {
            mass -= a[i].mass;
            ++i;
        }
        if (mass >= alpha - kMassTol) best = std::min(best, a[j].pos - a[i].pos);
    }
    return std::isinf(best) ? a.back().pos - a.front().pos : best;
}

double pd_of_values(const std::vector<double>& f, const std::vector<double>& w, double alpha) {
    if (!(alpha > 0 && alpha <= 1 + kMassTol)) throw Error(ErrorKind::BadAlpha, "alpha must lie in (0,1]");
    std::vector<std::pair<double, std::size_t>> s(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) s[i] = {f[i], i};
    std::sort(s.begin(), s.end());
    return pd_sorted(s, w, alpha);
}

// ---- observable families ---------------------------------------------------

namespace {

void for_each_observable(const FiniteMMSpace& x, std::size_t count, std::uint64_t seed,
                         const std::function<void(const std::vector<double>&, const char*)>& visit) {
    const std::size_t n = x.size();
    auto rng = substream(seed, 0x0b5);
    std::vector<double> f(n);
    std::size_t used = 0;

    // Distance functions.
    std::size_t anchors = std::min(n, std::max<std::size_t>(1, count / 4));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (anchors < n) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < anchors && used < count; ++k, ++used) {
        const double* r = x.row(order[k]);
        f.assign(r, r + n);
        visit(f, "distance");
    }

    // Coordinate axes and random directions.
    if (x.has_coords() && used < count) {
        const auto& c = x.coords();
        const std::size_t dim = c[0].size();
        for (std::size_t k = 0; k < dim && used < count; ++k, ++used) {
            for (std::size_t i = 0; i < n; ++i) f[i] = c[i][k];
            visit(f, "coordinate");
        }
        std::normal_distribution<double> g(0, 1);
        std::vector<double> u(dim);
        std::size_t dirs = count / 4;
        for (std::size_t k = 0; k < dirs && used < count; ++k, ++used) {
            double norm = 0;
            for (auto& ui : u) {
                ui = g(rng);
                norm += ui * ui;
            }
            norm = std::sqrt(norm);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0;
                for (std::size_t j = 0; j < dim; ++j) s += u[j] * c[i][j];
                f[i] = s / norm;
            }
            visit(f, "projection");
        }
    }

    // Kuratowski minima min_i (c_i + d(., a_i)).
    const double diam = x.diameter();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<int> howmany(2, 4);
    std::uniform_real_distribution<double> off(0, diam / 2);
    while (used < count) {
        int k = howmany(rng);
        std::fill(f.begin(), f.end(), std::numeric_limits<double>::infinity());
        for (int t = 0; t < k; ++t) {
            const double* r = x.row(pick(rng));
            double shift = off(rng);
            for (std::size_t i = 0; i < n; ++i) f[i] = std::min(f[i], shift + r[i]);
        }
        visit(f, "kuratowski");
        ++used;
    }
}

// Greedy single-value moves inside the Lipschitz polytope, accepted when the
// partial diameter does not drop.
double local_search(const FiniteMMSpace& x, std::vector<double>& f, double alpha, std::size_t steps,
                    std::uint64_t seed) {
    const std::size_t n = x.size();
    const auto& w = x.weights();
    std::vector<std::pair<double, std::size_t>> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = {f[i], i};
    std::sort(s.begin(), s.end());
    double cur = pd_sorted(s, w, alpha);
    if (n < 2) return cur;
    auto rng = substream(seed, 0x10c);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::normal_distribution<double> g(0, 1);
    const double sigma = x.diameter() / 32;
    auto move = [&](std::size_t i, double from, double to) {
        auto it = std::lower_bound(s.begin(), s.end(), std::make_pair(from, i));
        s.erase(it);
        auto jt = std::lower_bound(s.begin(), s.end(), std::make_pair(to, i));
        s.insert(jt, {to, i});
        f[i] = to;
    };
    for (std::size_t step = 0; step < steps; ++step) {
        std::size_t i = pick(rng);
        const double* r = x.row(i);
        double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            lo = std::max(lo, f[j] - r[j]);
            hi = std::min(hi, f[j] + r[j]);
        }
        double old = f[i];
        double proposal = std::clamp(old + sigma * g(rng), lo, hi);
        if (proposal == old) continue;
        move(i, old, proposal);
        double next = pd_sorted(s, w, alpha);
        if (next >= cur)
            cur = next;
        else
            move(i, proposal, old);
    }
    return cur;
}

// ---- exact OD --------------------------------------------------------------

struct Windows {
    std::vector<std::pair<std::size_t, std::size_t>> list;  // minimal (first, last) positions
};

Windows minimal_windows(const std::vector<std::size_t>& perm, const std::vector<double>& w, double need) {
    Windows out;
    const std::size_t n = perm.size();
    for (std::size_t a = 0; a < n; ++a) {
        double mass = 0;
        bool found = false;
        for (std::size_t b = a; b < n; ++b) {
            mass += w[perm[b]];
            if (mass >= need - kMassTol) {
                out.list.push_back({a, b});
                found = true;
                break;
            }
        }
        if (!found) break;
    }
    return out;
}

// Floyd-Warshall on difference constraints f_v <= f_u + D[u][v]; false on a negative cycle.
bool feasible_potentials(const FiniteMMSpace& x, const std::vector<std::size_t>& perm, const Windows& win,
                         double t, std::vector<double>* potentials) {
    const std::size_t n = x.size();
    std::vector<double> D(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) D[i * n + j] = x.d(i, j);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double& e = D[perm[k + 1] * n + perm[k]];
        e = std::min(e, 0.0);
    }
    for (auto [a, b] : win.list) {
        double& e = D[perm[b] * n + perm[a]];
        e = std::min(e, -t);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            double dik = D[i * n + k];
            for (std::size_t j = 0; j < n; ++j) {
                double v = dik + D[k * n + j];
                if (v < D[i * n + j]) D[i * n + j] = v;
            }
        }
    for (std::size_t i = 0; i < n; ++i)
        if (D[i * n + i] < -1e-12) return false;
    if (potentials) {
        potentials->assign(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t u = 0; u < n; ++u) (*potentials)[v] = std::min((*potentials)[v], D[u * n + v]);
    }
    return true;
}

ODEstimate od_exact(const FiniteMMSpace& x, double kappa) {
    const std::size_t n = x.size();
    ODEstimate est;
    est.kappa = kappa;
    est.mode = OdMode::ExactTiny;
    est.witness.assign(n, 0.0);
    est.family = "order-polytope";
    if (n < 2) return est;
    const double need = 1 - kappa;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
        if (perm.front() > perm.back()) continue;  // reversal gives -f
        Windows win = minimal_windows(perm, x.weights(), need);
        double hi = std::numeric_limits<double>::infinity();
        for (auto [a, b] : win.list) hi = std::min(hi, a == b ? 0.0 : x.d(perm[a], perm[b]));
        if (hi <= best + 1e-12) continue;
        double lo = 0;
        if (feasible_potentials(x, perm, win, hi, nullptr)) {
            lo = hi;
        } else {
            for (int it = 0; it < 64 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
                double mid = 0.5 * (lo + hi);
                if (feasible_potentials(x, perm, win, mid, nullptr))
                    lo = mid;
                else
                    hi = mid;
            }
        }
        if (lo <= best) continue;
        std::vector<double> f;
        feasible_potentials(x, perm, win, lo, &f);
        double val = pd_of_values(f, x.weights(), need);
        ++est.evaluations;
        if (val > best) {
            best = val;
            est.witness = f;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    est.value = best;
    return est;
}

ODEstimate od_heuristic(const FiniteMMSpace& x, double kappa, const OdOptions& opt) {
    ODEstimate est;
    est.kappa = kappa;
    est.mode = OdMode::HeuristicLb;
    const double alpha = 1 - kappa;
    const std::size_t n = x.size();
    est.witness.assign(n, 0.0);
    est.family = "constant";
    if (n < 2) return est;
    std::size_t local = static_cast<std::size_t>(opt.local_share * static_cast<double>(opt.budget));
    std::size_t candidates = std::max<std::size_t>(1, opt.budget - local);
    double best = 0;
    for_each_observable(x, candidates, opt.seed, [&](const std::vector<double>& f, const char* fam) {
        double v = pd_of_values(f, x.weights(), alpha);
        ++est.evaluations;
        if (v > best) {
            best = v;
            est.witness = f;
            est.family = fam;
        }
    });
    if (local > 0) {
        double v = local_search(x, est.witness, alpha, local, opt.seed);
        est.evaluations += local;
        if (v > best) est.family += "+local";
        best = v;
    }
    est.value = pd_of_values(est.witness, x.weights(), alpha);
    return est;
}

}  // namespace

std::vector<Observable> observable_family(const FiniteMMSpace& x, std::size_t count, std::uint64_t seed) {
    std::vector<Observable> out;
    for_each_observable(x, count, seed,
                        [&](const std::vector<double>& f, const char* fam) { out.push_back({f, fam}); });
    return out;
}

ODEstimate observable_diameter(const FiniteMMSpace& x, double kappa, const OdOptions& opt) {
    check_kappa(kappa);
    OdMode mode = opt.mode;
    if (mode == OdMode::Auto) mode = x.size() <= opt.exact_limit ? OdMode::ExactTiny : OdMode::HeuristicLb;
    if (mode == OdMode::ExactTiny) {
        if (x.size() > opt.exact_limit)
            throw Error(ErrorKind::TooLarge, "exact observable diameter needs at most " +
                                                 std::to_string(opt.exact_limit) + " points");
        return od_exact(x, kappa);
    }
    return od_heuristic(x, kappa, opt);
}

// ---- concentration function ------------------------------------------------

ConcentrationValue concentration_function(const FiniteMMSpace& x, double r) {
    if (!(r > 0)) throw Error(ErrorKind::BadArgument, "r must be positive");
    const std::size_t n = x.size();
    ConcentrationValue out;
    if (n <= 16) {
        std::vector<std::uint32_t> near(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (x.d(i, j) < r) near[i] |= (1u << j);
        const std::size_t total = std::size_t{1} << n;
        std::vector<double> mass(total, 0.0);
        std::vector<std::uint32_t> hood(total, 0);
        double best = 0;
        for (std::size_t s = 1; s < total; ++s) {
            std::size_t low = static_cast<std::size_t>(__builtin_ctzll(s));
            std::size_t rest = s & (s - 1);
            mass[s] = mass[rest] + x.w(low);
            hood[s] = hood[rest] | near[low];
            if (mass[s] < 0.5 - kMassTol) continue;
            double covered = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (hood[s] >> j & 1u) covered += x.w(j);
            best = std::max(best, 1 - covered);
        }
        out.lower = out.upper = std::max(0.0, best);
        out.exact = true;
        return out;
    }
    // Lower bound: half-mass balls around sampled centres.
    auto rng = substream(0xc0c, n);
    std::vector<std::size_t> centres(n);
    std::iota(centres.begin(), centres.end(), 0);
    std::shuffle(centres.begin(), centres.end(), rng);
    centres.resize(std::min<std::size_t>(n, 48));
    std::vector<std::size_t> order(n);
    std::vector<double> dist_to_a(n);
    double lower = 0;
    for (std::size_t c : centres) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x.d(c, a) < x.d(c, b); });
        for (int flip = 0; flip < 2; ++flip) {
            // flip = 0: ball around c; flip = 1: the points farthest from c.
            std::vector<std::size_t> A;
            double m = 0;
            for (std::size_t k = 0; k < n && m < 0.5 - kMassTol; ++k) {
                std::size_t p = flip ? order[n - 1 - k] : order[k];
                A.push_back(p);
                m += x.w(p);
            }
            std::fill(dist_to_a.begin(), dist_to_a.end(), std::numeric_limits<double>::infinity());
            for (std::size_t a : A) {
                const double* row = x.row(a);
                for (std::size_t j = 0; j < n; ++j) dist_to_a[j] = std::min(dist_to_a[j], row[j]);
            }
            double far = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (dist_to_a[j] >= r) far += x.w(j);
            lower = std::max(lower, far);
        }
    }
    // Upper bound: every point outside U_r(A) sees mass >= 1/2 at distance >= r.
    double upper = 0;
    for (std::size_t b = 0; b < n; ++b) {
        double farmass = 0;
        const double* row = x.row(b);
        for (std::size_t j = 0; j < n; ++j)
            if (row[j] >= r) farmass += x.w(j);
        if (farmass >= 0.5 - kMassTol) upper += x.w(b);
    }
    out.lower = lower;
    out.upper = std::max(lower, std::min(0.5, upper));
    out.exact = false;
    return out;
}

// ---- medians ---------------------------------------------------------------

MedianInterval median_interval(const RealDistribution& d) {
    const auto& a = d.atoms;
    if (a.empty()) return {};
    MedianInterval m{a.front().pos, a.back().pos};
    // Relative to the total so that sub-probability fibres work too.
    double half = 0;
    for (const auto& at : a) half += at.mass;
    half *= 0.5;
    double cum = 0;
    for (const auto& at : a) {
        cum += at.mass;
        if (cum >= half - kMassTol) {
            m.lo = at.pos;
            break;
        }
    }
    double tail = 0;
    for (std::size_t k = a.size(); k-- > 0;) {
        tail += a[k].mass;
        if (tail >= half - kMassTol) {
            m.hi = a[k].pos;
            break;
        }
    }
    return m;
}

double levy_mean(const RealDistribution& d) {
    auto m = median_interval(d);
    return 0.5 * (m.lo + m.hi);
}

double levy_mean_of(const std::vector<double>& f, const std::vector<double>& w) {
    return levy_mean(make_distribution(f, w));
}

double levy_deviation(const std::vector<double>& f, const std::vector<double>& w, double kappa) {
    if (f.empty()) return 0;
    double lm = levy_mean_of(f, w);
    std::vector<std::pair<double, double>> dev(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) dev[i] = {std::abs(f[i] - lm), w[i]};
    std::sort(dev.begin(), dev.end());
    // Walk distinct deviations downwards; `above` is the mass strictly above the current one.
    double above = 0, best = dev.back().first;
    std::size_t k = dev.size();
    while (k > 0) {
        double v = dev[k - 1].first;
        if (above > kappa + kMassTol) break;
        best = v;
        while (k > 0 && dev[k - 1].first == v) above += dev[--k].second;
    }
    return best;
}

// ---- Lévy radius -----------------------------------------------------------

namespace {

LREstimate lr_exact(const FiniteMMSpace& x, double kappa) {
    const std::size_t n = x.size();
    LREstimate est;
    est.kappa = kappa;
    est.mode = OdMode::ExactTiny;
    est.witness.assign(n, 0.0);
    if (n < 2) return est;
    const auto& w = x.weights();
    const double diam = x.diameter();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
        if (perm.front() > perm.back()) continue;
        // Median positions in this order.
        std::size_t ma = 0, mb = n - 1;
        double cum = 0;
        for (std::size_t k = 0; k < n; ++k) {
            cum += w[perm[k]];
            if (cum >= 0.5 - kMassTol) {
                ma = k;
                break;
            }
        }
        double tail = 0;
        for (std::size_t k = n; k-- > 0;) {
            tail += w[perm[k]];
            if (tail >= 0.5 - kMassTol) {
                mb = k;
                break;
            }
        }
        Windows win = minimal_windows(perm, w, 1 - kappa);
        const std::size_t nv = n;  // f at positions 1..n-1, then t
        auto base = [&] { return std::vector<double>(nv, 0.0); };
        auto add = [&](std::vector<double>& row, std::size_t pos, double c) {
            if (pos > 0) row[pos - 1] += c;
        };
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                auto row = base();
                add(row, q, 1);
                add(row, p, -1);
                A.push_back(row);
                b.push_back(x.d(perm[p], perm[q]));
            }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            auto row = base();
            add(row, p, 1);
            add(row, p + 1, -1);
            A.push_back(row);
            b.push_back(0);
        }
        {
            auto row = base();
            row[nv - 1] = 1;
            A.push_back(row);
            b.push_back(diam);
        }
        std::vector<double> c(nv, 0.0);
        c[nv - 1] = 1;
        const std::size_t wcount = win.list.size();
        for (std::size_t cut = 0; cut <= wcount; ++cut) {
            auto AA = A;
            auto bb = b;
            if (cut >= 1) {  // lm - f(first of window cut-1) >= t
                auto row = base();
                row[nv - 1] = 1;
                add(row, ma, -0.5);
                add(row, mb, -0.5);
                add(row, win.list[cut - 1].first, 1);
                AA.push_back(row);
                bb.push_back(0);
            }
            if (cut < wcount) {  // f(last of window cut) - lm >= t
                auto row = base();
                row[nv - 1] = 1;
                add(row, ma, 0.5);
                add(row, mb, 0.5);
                add(row, win.list[cut].second, -1);
                AA.push_back(row);
                bb.push_back(0);
            }
            auto sol = simplex_max(AA, bb, c);
            if (sol[nv - 1] <= best) continue;
            std::vector<double> f(n, 0.0);
            for (std::size_t p = 1; p < n; ++p) f[perm[p]] = sol[p - 1];
            double val = levy_deviation(f, w, kappa);
            if (val > best && is_1lipschitz(x, f, 1e-9)) {
                best = val;
                est.witness = f;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    est.value = best;
    return est;
}

}  // namespace

LREstimate levy_radius(const FiniteMMSpace& x, double kappa, const OdOptions& opt) {
    check_kappa(kappa);
    OdMode mode = opt.mode;
    if (mode == OdMode::Auto) mode = x.size() <= opt.exact_limit ? OdMode::ExactTiny : OdMode::HeuristicLb;
    if (mode == OdMode::ExactTiny) {
        if (x.size() > opt.exact_limit) throw Error(ErrorKind::TooLarge, "exact Lévy radius needs a tiny space");
        return lr_exact(x, kappa);
    }
    LREstimate est;
    est.kappa = kappa;
    est.mode = OdMode::HeuristicLb;
    est.witness.assign(x.size(), 0.0);
    for_each_observable(x, std::max<std::size_t>(1, opt.budget), opt.seed,
                        [&](const std::vector<double>& f, const char*) {
                            double v = levy_deviation(f, x.weights(), kappa);
                            if (v > est.value) {
                                est.value = v;
                                est.witness = f;
                            }
                        });
    return est;
}

// ---- kappa distance --------------------------------------------------------

namespace {

// Best B2 given B1: the kappa-mass of A2 farthest from B1.
double best_partner(const FiniteMMSpace& x, const std::vector<double>& dist_b1, const std::vector<std::size_t>& a2,
                    double kappa, std::vector<std::size_t>* b2) {
    std::vector<std::size_t> order = a2;
    std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return dist_b1[p] > dist_b1[q]; });
    double mass = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        mass += x.w(order[k]);
        if (mass >= kappa - kMassTol) {
            if (b2) b2->assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k + 1));
            return dist_b1[order[k]];
        }
    }
    return -1;
}

}  // namespace

KappaDistance kappa_distance(const FiniteMMSpace& x, const std::vector<std::size_t>& a1,
                             const std::vector<std::size_t>& a2, double kappa) {
    KappaDistance out;
    out.kappa = kappa;
    auto mass_of = [&](const std::vector<std::size_t>& s) {
        double m = 0;
        for (auto i : s) {
            if (i >= x.size()) throw Error(ErrorKind::HostMismatch, "subset index out of range");
            m += x.w(i);
        }
        return m;
    };
    if (mass_of(a1) < kappa - kMassTol || mass_of(a2) < kappa - kMassTol) return out;
    const std::size_t n = x.size();
    bool swapped = a1.size() > 16 && a2.size() <= 16;
    const auto& s1 = swapped ? a2 : a1;
    const auto& s2 = swapped ? a1 : a2;
    std::vector<double> dist_b1(n);
    out.value = -1;
    auto consider = [&](const std::vector<std::size_t>& b1) {
        std::fill(dist_b1.begin(), dist_b1.end(), std::numeric_limits<double>::infinity());
        for (auto p : b1)
            for (std::size_t j = 0; j < n; ++j) dist_b1[j] = std::min(dist_b1[j], x.d(p, j));
        std::vector<std::size_t> b2;
        double v = best_partner(x, dist_b1, s2, kappa, &b2);
        if (v > out.value) {
            out.value = v;
            out.b1 = b1;
            out.b2 = b2;
        }
    };
    if (s1.size() <= 16) {
        const std::size_t k = s1.size();
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
            std::vector<std::size_t> b1;
            double m = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (mask >> i & 1) {
                    b1.push_back(s1[i]);
                    m += x.w(s1[i]);
                }
            if (m < kappa - kMassTol) continue;
            consider(b1);
        }
    } else {
        out.exact = false;
        for (std::size_t seed = 0; seed < std::min<std::size_t>(s1.size(), 64); ++seed) {
            std::size_t c = s1[seed * s1.size() / std::min<std::size_t>(s1.size(), 64)];
            std::vector<std::size_t> order = s1;
            std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return x.d(c, p) < x.d(c, q); });
            std::vector<std::size_t> b1;
            double m = 0;
            for (auto p : order) {
                b1.push_back(p);
                m += x.w(p);
                if (m >= kappa - kMassTol) break;
            }
            consider(b1);
        }
    }
    if (swapped) std::swap(out.b1, out.b2);
    out.value = std::max(0.0, out.value);
    return out;
}

}  // namespace mml
