#include "mml/distances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "mml/flow.hpp"
#include "mml/invariants.hpp"
#include "mml/parallel.hpp"
#include "mml/product.hpp"

namespace mml {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_measures(const std::vector<double>& dist, const std::vector<double>& mu, const std::vector<double>& nu) {
    if (mu.size() != nu.size() || dist.size() != mu.size() * mu.size())
        throw Error(ErrorKind::HostMismatch, "measures and distance matrix disagree in size");
}

double deficit(double flow) {
    double d = 1.0 - flow;
    return d < 1e-12 ? 0.0 : d;
}

// Max flow between supp mu and supp nu through pairs with d <= r.
double transport_flow(const std::vector<double>& dist, const std::vector<double>& mu, const std::vector<double>& nu,
                      const std::vector<std::size_t>& src, const std::vector<std::size_t>& dst, double r,
                      SubtransportPlan* plan) {
    const std::size_t n = mu.size();
    const std::size_t a = src.size(), b = dst.size();
    MaxFlow g(a + b + 2);
    const std::size_t s = a + b, t = a + b + 1;
    for (std::size_t i = 0; i < a; ++i) g.add_edge(s, i, mu[src[i]]);
    for (std::size_t j = 0; j < b; ++j) g.add_edge(a + j, t, nu[dst[j]]);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
            if (dist[src[i] * n + dst[j]] <= r) {
                ids.push_back(g.add_edge(i, a + j, mu[src[i]]));
                edges.emplace_back(src[i], dst[j]);
            }
    double f = g.run(s, t);
    if (plan) {
        plan->rows = plan->cols = n;
        plan->pi.assign(n * n, 0.0);
        for (std::size_t e = 0; e < ids.size(); ++e)
            plan->pi[edges[e].first * n + edges[e].second] = std::max(0.0, g.flow(ids[e]));
        plan->radius = r;
        plan->deficiency = 1.0 - f;
    }
    return f;
}

std::vector<std::size_t> support(const std::vector<double>& m) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] > 0) s.push_back(i);
    return s;
}

// max over pairs inside S, built incrementally over bitmasks.
std::vector<double> pairwise_max_dp(std::size_t n, const std::vector<double>& val) {
    std::vector<double> out(std::size_t{1} << n, 0.0);
    for (std::size_t s = 1; s < out.size(); ++s) {
        std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
        std::size_t rest = s & (s - 1);
        double m = out[rest];
        for (std::size_t r = rest; r; r &= r - 1) {
            std::size_t j = static_cast<std::size_t>(std::countr_zero(r));
            m = std::max(m, val[low * n + j]);
        }
        out[s] = m;
    }
    return out;
}

std::vector<double> subset_mass(const std::vector<double>& w) {
    std::vector<double> out(std::size_t{1} << w.size(), 0.0);
    for (std::size_t s = 1; s < out.size(); ++s)
        out[s] = out[s & (s - 1)] + w[static_cast<std::size_t>(std::countr_zero(s))];
    return out;
}

std::vector<std::size_t> bits(std::size_t s) {
    std::vector<std::size_t> out;
    for (; s; s &= s - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(s)));
    return out;
}

// argmin over subsets of max(val[S], 1 - mass[S]).
std::pair<double, std::size_t> best_subset(const std::vector<double>& val, const std::vector<double>& mass) {
    double best = 1.0;
    std::size_t arg = 0;
    for (std::size_t s = 1; s < val.size(); ++s) {
        double e = std::max(val[s], std::max(0.0, 1.0 - mass[s]));
        if (e < best) {
            best = e;
            arg = s;
        }
    }
    return {best, arg};
}

// Greedy removal of the point with the most violating partners per unit mass.
std::vector<std::size_t> greedy_domain(std::size_t n, const std::function<bool(std::size_t, std::size_t)>& bad,
                                       const std::vector<double>& w) {
    std::vector<std::size_t> cnt(n, 0);
    std::vector<char> alive(n, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (bad(i, j)) {
                ++cnt[i];
                ++cnt[j];
            }
    for (;;) {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i] || cnt[i] == 0) continue;
            // weighted vertex-cover rule: violations per unit of mass
            if (pick == n || static_cast<double>(cnt[i]) * w[pick] > static_cast<double>(cnt[pick]) * w[i]) pick = i;
        }
        if (pick == n) break;
        alive[pick] = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (alive[j] && j != pick && bad(pick, j)) --cnt[j];
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) out.push_back(i);
    return out;
}

double mass_of(const std::vector<std::size_t>& dom, const std::vector<double>& w) {
    double m = 0;
    for (auto i : dom) m += w[i];
    return m;
}

}  // namespace

bool SubtransportPlan::satisfies(const std::vector<double>& mu, const std::vector<double>& nu,
                                 const std::vector<double>& dist, double tol) const {
    if (mu.size() != rows || nu.size() != cols || pi.size() != rows * cols) return false;
    std::vector<double> col(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        double r = 0;
        for (std::size_t j = 0; j < cols; ++j) {
            double v = at(i, j);
            if (v < 0) return false;
            if (v > 0 && dist[i * cols + j] > radius + tol) return false;
            r += v;
            col[j] += v;
        }
        if (r > mu[i] + tol) return false;
    }
    for (std::size_t j = 0; j < cols; ++j)
        if (col[j] > nu[j] + tol) return false;
    return true;
}

ProkResult prokhorov(const std::vector<double>& dist, const std::vector<double>& mu, const std::vector<double>& nu,
                     double lambda) {
    check_measures(dist, mu, nu);
    if (!(lambda > 0)) throw Error(ErrorKind::BadArgument, "lambda must be positive");
    const std::size_t n = mu.size();
    auto src = support(mu), dst = support(nu);
    std::vector<double> levels{0.0};
    for (auto i : src)
        for (auto j : dst) levels.push_back(dist[i * n + j]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::vector<double> need(levels.size(), -1.0);  // deficit / lambda, lazily filled
    auto need_at = [&](std::size_t k) {
        if (need[k] < 0) need[k] = deficit(transport_flow(dist, mu, nu, src, dst, levels[k], nullptr)) / lambda;
        return need[k];
    };
    // First breakpoint where the radius alone already covers the deficit.
    std::size_t lo = 0, hi = levels.size() - 1;
    if (levels[hi] < need_at(hi)) lo = hi;  // only possible with total mass < 1
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (levels[mid] >= need_at(mid)) hi = mid;
        else lo = mid + 1;
    }
    std::size_t k = lo;
    double value = std::max(levels[k], need_at(k));
    if (k > 0 && need_at(k - 1) < value) {
        value = need_at(k - 1);
        --k;
    }
    ProkResult res;
    res.value = value;
    transport_flow(dist, mu, nu, src, dst, levels[k], &res.plan);
    res.plan.radius = value;
    return res;
}

ProkResult prokhorov(const FiniteMMSpace& x, const std::vector<double>& mu, const std::vector<double>& nu,
                     double lambda) {
    return prokhorov(x.dist(), mu, nu, lambda);
}

double prokhorov_bruteforce(const std::vector<double>& dist, const std::vector<double>& mu,
                            const std::vector<double>& nu, double lambda) {
    check_measures(dist, mu, nu);
    const std::size_t n = mu.size();
    if (n > 12) throw Error(ErrorKind::TooLarge, "brute-force Prokhorov is limited to 12 points");
    if (!(lambda > 0)) throw Error(ErrorKind::BadArgument, "lambda must be positive");
    double worst = 0;
    std::vector<double> da(n);
    std::vector<std::size_t> order(n);
    for (std::size_t a = 1; a < (std::size_t{1} << n); ++a) {
        double nu_a = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (a >> i & 1) nu_a += nu[i];
        if (nu_a <= 0) continue;
        for (std::size_t x = 0; x < n; ++x) {
            double m = kInf;
            for (std::size_t i = 0; i < n; ++i)
                if (a >> i & 1) m = std::min(m, dist[x * n + i]);
            da[x] = m;
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return da[p] < da[q]; });
        // For eps in (delta_k, delta_{k+1}] the open neighbourhood carries M_k.
        double best = kInf, covered = 0;
        for (std::size_t p = 0; p < n;) {
            double level = da[order[p]];
            while (p < n && da[order[p]] == level) covered += mu[order[p++]];
            best = std::min(best, std::max(level, (nu_a - covered) / lambda));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

double prokhorov_bruteforce(const FiniteMMSpace& x, const std::vector<double>& mu, const std::vector<double>& nu,
                            double lambda) {
    return prokhorov_bruteforce(x.dist(), mu, nu, lambda);
}

double ky_fan(const std::vector<double>& w, const std::vector<double>& f, const std::vector<double>& g) {
    if (f.size() != w.size() || g.size() != w.size())
        throw Error(ErrorKind::HostMismatch, "functions must live on the same space");
    const std::size_t n = w.size();
    std::vector<std::pair<double, double>> e(n);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = {std::abs(f[i] - g[i]), w[i]};
        total += w[i];
    }
    std::sort(e.begin(), e.end());
    double above = total;  // mass with |f-g| > current threshold
    double best = kInf;
    std::size_t p = 0;
    while (p < n && e[p].first <= 0) above -= e[p++].second;
    best = std::max(0.0, above);
    while (p < n) {
        double level = e[p].first;
        while (p < n && e[p].first == level) above -= e[p++].second;
        best = std::min(best, std::max(level, std::max(0.0, above)));
        if (level >= best) break;
    }
    return best;
}

double ky_fan(const FiniteMMSpace& x, const std::vector<double>& f, const std::vector<double>& g) {
    return ky_fan(x.weights(), f, g);
}

// ---- box distance --------------------------------------------------------

namespace {

std::size_t denominator(double w) {
    for (std::size_t q = 1; q <= 1000; ++q)
        if (std::abs(w * static_cast<double>(q) - std::round(w * static_cast<double>(q))) <= 1e-6 * static_cast<double>(q))
            return q;
    throw Error(ErrorKind::NotRational, "weight " + std::to_string(w) + " is not a fraction with denominator <= 1000");
}

std::vector<std::size_t> chunk_list(const FiniteMMSpace& x, std::size_t k) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto c = static_cast<std::size_t>(std::llround(x.w(i) * static_cast<double>(k)));
        out.insert(out.end(), c, i);
    }
    if (out.size() != k) throw Error(ErrorKind::NotRational, "weights do not split into equal chunks");
    return out;
}

double box_exact(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t& chunks) {
    std::size_t l = 1;
    for (double w : x.weights()) l = std::lcm(l, denominator(w));
    for (double w : y.weights()) l = std::lcm(l, denominator(w));
    if (l > 8) throw Error(ErrorKind::CapExceeded, "exact box needs " + std::to_string(l) + " chunks, cap is 8");
    chunks = l;
    auto xs = chunk_list(x, l);
    auto ys = chunk_list(y, l);
    std::vector<double> mass(std::size_t{1} << l);
    for (std::size_t s = 0; s < mass.size(); ++s)
        mass[s] = static_cast<double>(std::popcount(s)) / static_cast<double>(l);
    std::vector<double> disc(l * l);
    double best = 1.0;
    do {
        for (std::size_t a = 0; a < l; ++a)
            for (std::size_t b = 0; b < l; ++b)
                disc[a * l + b] = std::abs(x.d(xs[a], xs[b]) - y.d(ys[a], ys[b]));
        auto dmax = pairwise_max_dp(l, disc);
        best = std::min(best, best_subset(dmax, mass).first);
    } while (best > 0 && std::next_permutation(ys.begin(), ys.end()));
    return best;
}

// Sorted (mass, smallest diameter among subsets of at least that mass).
struct Profile {
    std::vector<double> mass, diam;
    double at(double alpha) const {
        if (alpha <= 1e-12) return 0;
        auto it = std::lower_bound(mass.begin(), mass.end(), alpha - 1e-12);
        if (it == mass.end()) return kInf;
        return diam[static_cast<std::size_t>(it - mass.begin())];
    }
};

Profile diameter_profile(const FiniteMMSpace& x) {
    const std::size_t n = x.size();
    auto dm = pairwise_max_dp(n, x.dist());
    auto ms = subset_mass(x.weights());
    std::vector<std::size_t> idx(dm.size() - 1);
    std::iota(idx.begin(), idx.end(), 1);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ms[a] < ms[b]; });
    Profile p;
    for (auto s : idx) {
        if (!p.mass.empty() && std::abs(p.mass.back() - ms[s]) <= 1e-15) {
            p.diam.back() = std::min(p.diam.back(), dm[s]);
        } else {
            p.mass.push_back(ms[s]);
            p.diam.push_back(dm[s]);
        }
    }
    for (std::size_t i = p.diam.size(); i-- > 1;) p.diam[i - 1] = std::min(p.diam[i - 1], p.diam[i]);
    return p;
}

bool profile_ok(const Profile& px, const Profile& py, double eps) {
    for (std::size_t j = 0; j < py.mass.size(); ++j)
        if (px.at(py.mass[j] - eps) > py.diam[j] + eps + 1e-12) return false;
    return true;
}

double box_lower(const FiniteMMSpace& x, const FiniteMMSpace& y) {
    if (x.size() > 16 || y.size() > 16) return 0;
    auto px = diameter_profile(x), py = diameter_profile(y);
    auto ok = [&](double e) { return profile_ok(px, py, e) && profile_ok(py, px, e); };
    if (ok(0)) return 0;
    double lo = 0, hi = 1;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return lo;
}

}  // namespace

BoxResult box_distance(const FiniteMMSpace& x, const FiniteMMSpace& y, BoxMode mode, std::size_t budget,
                       std::uint64_t seed) {
    BoxResult r;
    if (mode == BoxMode::ExactTiny) {
        r.lower = r.upper = box_exact(x, y, r.chunks);
        r.exact = true;
        return r;
    }
    auto iso = epsilon_mm_iso_search(x, y, budget, seed);
    r.upper = std::min(1.0, 3.0 * iso.eps);
    r.lower = std::min(r.upper, box_lower(x, y));
    return r;
}

// ---- eps-mm-isomorphisms -------------------------------------------------

IsoResult score_iso_map(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& map) {
    const std::size_t n = x.size();
    if (map.size() != n) throw Error(ErrorKind::HostMismatch, "map must assign every source point");
    IsoResult r;
    r.map = map;
    std::vector<double> pf(y.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (map[i] >= y.size()) throw Error(ErrorKind::HostMismatch, "map target out of range");
        pf[map[i]] += x.w(i);
    }
    r.prok = prokhorov(y.dist(), pf, y.weights()).value;
    std::vector<double> disc(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) disc[i * n + j] = std::abs(x.d(i, j) - y.d(map[i], map[j]));
    double dom_eps = 1.0;
    if (n <= 16) {
        auto dm = pairwise_max_dp(n, disc);
        auto ms = subset_mass(x.weights());
        auto [e, s] = best_subset(dm, ms);
        dom_eps = e;
        r.domain = bits(s);
        r.discrepancy = dm[s];
        r.mass_deficit = std::max(0.0, 1.0 - ms[s]);
    } else {
        std::vector<double> vals(disc.begin(), disc.end());
        std::sort(vals.begin(), vals.end());
        for (int q = 0; q <= 64; ++q) {
            double t = vals[std::min(vals.size() - 1, vals.size() * static_cast<std::size_t>(q) / 64)];
            auto dom = greedy_domain(n, [&](std::size_t i, std::size_t j) { return disc[i * n + j] > t; }, x.weights());
            double dd = 0;
            for (auto i : dom)
                for (auto j : dom) dd = std::max(dd, disc[i * n + j]);
            double deficit_m = std::max(0.0, 1.0 - mass_of(dom, x.weights()));
            double e = std::max(dd, deficit_m);
            if (e < dom_eps) {
                dom_eps = e;
                r.domain = dom;
                r.discrepancy = dd;
                r.mass_deficit = deficit_m;
            }
        }
    }
    r.eps = std::max(r.prok, dom_eps);
    return r;
}

IsoResult epsilon_mm_iso_search(const FiniteMMSpace& x, const FiniteMMSpace& y, std::size_t budget,
                                std::uint64_t seed) {
    const std::size_t n = x.size(), m = y.size();
    double maps = std::pow(static_cast<double>(m), static_cast<double>(n));
    if (maps <= static_cast<double>(budget)) {
        std::vector<std::size_t> f(n, 0);
        IsoResult best;
        best.eps = kInf;
        for (;;) {
            auto r = score_iso_map(x, y, f);
            if (r.eps < best.eps) best = r;
            std::size_t i = 0;
            while (i < n && ++f[i] == m) f[i++] = 0;
            if (i == n) break;
        }
        best.exhaustive = true;
        return best;
    }
    // Greedy weight matching: heaviest source points to the target with most unclaimed mass.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x.w(a) > x.w(b); });
    std::vector<double> room = y.weights();
    std::vector<std::size_t> f(n);
    for (auto i : order) {
        std::size_t t = static_cast<std::size_t>(std::max_element(room.begin(), room.end()) - room.begin());
        f[i] = t;
        room[t] -= x.w(i);
    }
    IsoResult best = score_iso_map(x, y, f);
    std::size_t used = 1;
    auto rng = substream(seed, 0x150);
    auto current = best;
    while (used < budget) {
        bool improved = false;
        for (std::size_t i = 0; i < n && used < budget; ++i) {
            for (std::size_t t = 0; t < m && used < budget; ++t) {
                if (t == current.map[i]) continue;
                auto g = current.map;
                g[i] = t;
                auto r = score_iso_map(x, y, g);
                ++used;
                if (r.eps < current.eps - 1e-15) {
                    current = r;
                    improved = true;
                }
            }
        }
        for (std::size_t i = 0; i < n && used < budget; ++i)
            for (std::size_t j = i + 1; j < n && used < budget; ++j) {
                if (current.map[i] == current.map[j]) continue;
                auto g = current.map;
                std::swap(g[i], g[j]);
                auto r = score_iso_map(x, y, g);
                ++used;
                if (r.eps < current.eps - 1e-15) {
                    current = r;
                    improved = true;
                }
            }
        if (current.eps < best.eps) best = current;
        if (!improved) {
            // Restart from a random perturbation of the best map.
            auto g = best.map;
            std::uniform_int_distribution<std::size_t> pi(0, n - 1), pt(0, m - 1);
            for (int k = 0; k < 2; ++k) g[pi(rng)] = pt(rng);
            current = score_iso_map(x, y, g);
            ++used;
        }
    }
    return best;
}

// ---- 1-Lipschitz up to an additive error ---------------------------------

namespace {

std::vector<double> lip_excess(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& p) {
    const std::size_t n = x.size();
    if (p.size() != n) throw Error(ErrorKind::HostMismatch, "map must assign every source point");
    for (auto t : p)
        if (t >= y.size()) throw Error(ErrorKind::HostMismatch, "map target out of range");
    std::vector<double> e(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) e[i * n + j] = std::max(0.0, y.d(p[i], p[j]) - x.d(i, j));
    return e;
}

LipDomain domain_from_excess(const std::vector<double>& ex, const std::vector<double>& w, double eps) {
    const std::size_t n = w.size();
    LipDomain out;
    if (n <= 16) {
        std::vector<std::uint32_t> bad(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (ex[i * n + j] > eps + 1e-12) bad[i] |= std::uint32_t{1} << j;
        std::vector<char> ok(std::size_t{1} << n, 0);
        auto ms = subset_mass(w);
        ok[0] = 1;
        std::size_t arg = 0;
        for (std::size_t s = 1; s < ok.size(); ++s) {
            std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
            std::size_t rest = s & (s - 1);
            ok[s] = ok[rest] && !(bad[low] & rest);
            if (ok[s] && ms[s] > ms[arg]) arg = s;
        }
        out.mass = ms[arg];
        out.domain = bits(arg);
        out.exact = true;
        return out;
    }
    out.domain = greedy_domain(n, [&](std::size_t i, std::size_t j) { return ex[i * n + j] > eps + 1e-12; }, w);
    out.mass = mass_of(out.domain, w);
    return out;
}

}  // namespace

LipDomain lip_domain_at(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& p,
                        double eps) {
    return domain_from_excess(lip_excess(x, y, p), x.weights(), eps);
}

LipUpTo lip_up_to_eps(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& p,
                      const std::vector<double>& eps_grid) {
    const std::size_t n = x.size();
    auto ex = lip_excess(x, y, p);
    LipUpTo out;
    if (eps_grid.empty() && n <= 16) {
        auto em = pairwise_max_dp(n, ex);
        auto ms = subset_mass(x.weights());
        auto [e, s] = best_subset(em, ms);
        out.eps = e;
        out.domain = bits(s);
        out.exact = true;
        return out;
    }
    std::vector<double> grid = eps_grid;
    if (grid.empty())
        for (int k = 0; k <= 200; ++k) grid.push_back(0.005 * k);
    std::sort(grid.begin(), grid.end());
    for (double e : grid) {
        auto dom = domain_from_excess(ex, x.weights(), e);
        if (dom.mass >= 1.0 - e - 1e-12) {
            out.eps = e;
            out.domain = std::move(dom.domain);
            out.exact = dom.exact;
            return out;
        }
    }
    out.eps = 1.0;  // the empty domain always qualifies at eps = 1
    out.exact = n <= 16;
    return out;
}

// ---- concentration certificates ------------------------------------------

double pullback_ky(const FiniteMMSpace& x, const FiniteMMSpace& y, const std::vector<std::size_t>& p,
                   const std::vector<double>& f, std::vector<double>* best_g, bool descend) {
    const std::size_t n = x.size(), m = y.size();
    if (f.size() != n || p.size() != n) throw Error(ErrorKind::HostMismatch, "observable and map must cover X");
    std::vector<std::vector<double>> fv(m), fw(m);
    for (std::size_t i = 0; i < n; ++i) {
        fv[p[i]].push_back(f[i]);
        fw[p[i]].push_back(x.w(i));
    }
    // Weighted quantiles per fibre as candidate levels.
    std::vector<std::vector<double>> cand(m);
    std::vector<double> g(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        if (fv[a].empty()) continue;
        g[a] = levy_mean_of(fv[a], fw[a]);
        std::vector<std::size_t> idx(fv[a].size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t u, std::size_t v) { return fv[a][u] < fv[a][v]; });
        double tot = std::accumulate(fw[a].begin(), fw[a].end(), 0.0), cum = 0;
        std::size_t q = 0;
        for (auto u : idx) {
            cum += fw[a][u];
            while (q <= 32 && cum >= tot * static_cast<double>(q) / 32.0 - 1e-15) {
                cand[a].push_back(fv[a][u]);
                ++q;
            }
        }
        cand[a].push_back(g[a]);
    }
    auto interval = [&](std::size_t a, std::size_t upto) {
        double lo = -kInf, hi = kInf;
        for (std::size_t b = 0; b < upto; ++b) {
            if (b == a) continue;
            lo = std::max(lo, g[b] - y.d(a, b));
            hi = std::min(hi, g[b] + y.d(a, b));
        }
        return std::pair{lo, hi};
    };
    for (std::size_t a = 0; a < m; ++a) {
        auto [lo, hi] = interval(a, a);
        g[a] = std::clamp(g[a], lo, std::max(lo, hi));
    }
    std::vector<double> pg(n);
    auto score = [&]() {
        for (std::size_t i = 0; i < n; ++i) pg[i] = g[p[i]];
        return ky_fan(x.weights(), f, pg);
    };
    double best = score();
    for (int sweep = 0; descend && sweep < 4; ++sweep) {
        bool moved = false;
        for (std::size_t a = 0; a < m; ++a) {
            auto [lo, hi] = interval(a, m);
            hi = std::max(lo, hi);
            double keep = g[a];
            std::vector<double> tries = cand[a];
            tries.push_back(lo);
            tries.push_back(hi);
            for (double c : tries) {
                if (!std::isfinite(c)) continue;
                g[a] = std::clamp(c, lo, hi);
                double s = score();
                if (s < best - 1e-15) {
                    best = s;
                    keep = g[a];
                    moved = true;
                }
            }
            g[a] = keep;
        }
        if (!moved) break;
    }
    if (best_g) *best_g = g;
    return best;
}

ConcentrationCertificate concentration_certificate(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                                   const std::vector<std::size_t>& p, std::size_t budget,
                                                   std::uint64_t seed) {
    CertificateOptions o;
    o.budget = budget;
    o.seed = seed;
    return concentration_certificate(x, y, p, o);
}

ConcentrationCertificate concentration_certificate(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                                   const std::vector<std::size_t>& p, const CertificateOptions& o) {
    const std::size_t budget = o.budget;
    const std::uint64_t seed = o.seed;
    if (y.size() > o.max_target)
        throw Error(ErrorKind::TargetTooLarge,
                    "certificate target must have at most " + std::to_string(o.max_target) + " points");
    if (p.size() != x.size()) throw Error(ErrorKind::HostMismatch, "map must assign every source point");
    ConcentrationCertificate c;
    c.map = p;
    std::vector<double> pf(y.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (p[i] >= y.size()) throw Error(ErrorKind::HostMismatch, "map target out of range");
        pf[p[i]] += x.w(i);
    }
    c.epsilon_prok = prokhorov(y.dist(), pf, y.weights()).value;
    auto lip = lip_up_to_eps(x, y, p);
    c.epsilon_lip = lip.eps;
    c.lip_domain = std::move(lip.domain);
    c.lip_exact = lip.exact;

    auto obs = observable_family(x, budget, seed);
    std::vector<double> score(obs.size(), 0.0);
    c.haus_descent = y.size() <= 6;
    parallel_for(obs.size(),
                 [&](std::size_t k) { score[k] = pullback_ky(x, y, p, obs[k].values, nullptr, c.haus_descent); });
    c.observables = obs.size();
    for (std::size_t k = 0; k < obs.size(); ++k)
        if (score[k] > c.epsilon_haus || c.haus_witness.empty()) {
            c.epsilon_haus = score[k];
            c.haus_witness = obs[k].values;
            c.haus_family = obs[k].family;
        }
    c.epsilon = std::max({c.epsilon_prok, c.epsilon_lip, c.epsilon_haus});
    return c;
}

// ---- product inequalities ------------------------------------------------

InequalityCheck lprok_product_check(const FiniteMMSpace& x, const std::vector<double>& mu,
                                    const std::vector<double>& mu2, const FiniteMMSpace& y,
                                    const std::vector<double>& nu, const std::vector<double>& nu2, const Mpf& f,
                                    double lambda) {
    if (f.arity() != 2) throw Error(ErrorKind::ArityMismatch, "product check needs a binary function");
    const std::size_t a = x.size(), b = y.size(), n = a * b;
    std::vector<double> dist(n * n), m1(n), m2(n);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            m1[i * b + j] = mu[i] * nu[j];
            m2[i * b + j] = mu2[i] * nu2[j];
            for (std::size_t k = 0; k < a; ++k)
                for (std::size_t l = 0; l < b; ++l) dist[(i * b + j) * n + k * b + l] = f(x.d(i, k), y.d(j, l));
        }
    double pa = prokhorov(x.dist(), mu, mu2, lambda).value;
    double pb = prokhorov(y.dist(), nu, nu2, lambda).value;
    InequalityCheck r;
    r.lhs = prokhorov(dist, m1, m2, lambda).value;
    r.rhs = std::max(pa + pb, 2.0 * f(pa, pb));
    r.pass = r.lhs <= r.rhs + 1e-6;
    r.detail = "prok_X=" + std::to_string(pa) + " prok_Y=" + std::to_string(pb);
    return r;
}

InequalityCheck box_product_check(const FiniteMMSpace& x, const FiniteMMSpace& y, const FiniteMMSpace& z,
                                  const FiniteMMSpace& w, const Mpf& f) {
    ProductOptions po;
    po.triplet_samples = 0;
    auto xz = product({x, z}, f, po);
    auto yw = product({y, w}, f, po);
    double a = box_distance(x, y).upper;
    double b = box_distance(z, w).upper;
    InequalityCheck r;
    r.lhs = box_distance(xz, yw).upper;
    double max_form = std::max(a + b, 2.0 * f(0.5 * a, 0.5 * b));
    bool is_lp = f.node().kind == MpfKind::Lp;
    r.rhs = is_lp ? a + b : max_form;
    r.pass = r.lhs <= max_form + 1e-9 && (!is_lp || r.lhs <= a + b + 1e-9);
    r.detail = "box_XY=" + std::to_string(a) + " box_ZW=" + std::to_string(b);
    return r;
}

}  // namespace mml
