#include "mml/battery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "mml/distances.hpp"
#include "mml/invariants.hpp"
#include "mml/io.hpp"
#include "mml/mpf.hpp"
#include "mml/parallel.hpp"
#include "mml/product.hpp"

namespace mml {

namespace {

struct Outcome {
    double lhs = 0, rhs = 0;
    std::string instance;
    json witness;
};

using Trial = std::function<Outcome(std::mt19937_64&)>;

double uni(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

ODEstimate od_exact(const FiniteMMSpace& x, double kappa) {
    OdOptions o;
    o.mode = OdMode::ExactTiny;
    return observable_diameter(x, kappa, o);
}

// Exact when small enough, otherwise a heuristic lower bound.
double od_lhs(const FiniteMMSpace& x, double kappa, std::uint64_t seed) {
    OdOptions o;
    o.budget = 4000;
    o.seed = seed;
    return observable_diameter(x, kappa, o).value;
}

struct NamedFn {
    const char* name;
    Mpf f;
};

std::vector<NamedFn> unary_fns() {
    return {{"H_1", fn::h1()},
            {"H_2", fn::h2()},
            {"sqrt", fn::power(0.5)},
            {"min(s,1)", fn::min_clamp(fn::identity(), 1.0)},
            {"F^1_3", fn::fn1(3)}};
}

struct Binary {
    std::string name;
    Mpf f;
};

std::vector<Binary> binaries() {
    std::vector<Binary> out;
    for (auto& g : fn::gallery())
        if (g.f.arity() == 2) out.push_back({g.name, g.f});
    out.push_back({"NotIsotone", fn::not_isotone()});
    out.push_back({"G^2_3", fn::gn(2, 3)});
    return out;
}

std::vector<Binary> ternaries() {
    return {{"F_1^3", fn::lp(1, 3)},
            {"F_2^3", fn::lp(2, 3)},
            {"F_inf^3", fn::max(3)},
            {"F_exp^3", fn::exp_log(3)},
            {"F_cyc", fn::cyclic(3)},
            {"F_alpha(0.5)^3", fn::power_sum(0.5, 3)}};
}

std::vector<double> random_measure(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> w(n);
    double s = 0;
    for (auto& v : w) s += (v = uni(rng, 0.05, 1.0));
    for (auto& v : w) v /= s;
    return w;
}

std::vector<double> composition(std::mt19937_64& rng, std::size_t n, std::size_t q, bool allow_zero) {
    std::vector<std::size_t> c(n, allow_zero ? 0 : 1);
    std::size_t left = q - (allow_zero ? 0 : n);
    for (std::size_t k = 0; k < left; ++k) ++c[pick(rng, n)];
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(c[i]) / static_cast<double>(q);
    return w;
}

json jspace(const FiniteMMSpace& x) { return space_to_json(x); }

// inf{r > 0 : alpha_X(r) <= level}, alpha_X being a left-open step function.
double conc_inf(const FiniteMMSpace& x, double level) {
    std::vector<double> d(x.dist().begin(), x.dist().end());
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    if (!d.empty() && d.front() == 0) d.erase(d.begin());
    double prev = 0;
    for (double r : d) {
        if (concentration_function(x, r).upper <= level) return prev;
        prev = r;
    }
    return prev;
}

// sup{kappa > 0 : OD(X; -kappa) >= r}, 0 for the empty set.
double od_sup_kappa(const FiniteMMSpace& x, double r) {
    auto ok = [&](double k) { return od_exact(x, k).value >= r - 1e-12; };
    if (!ok(1e-9)) return 0;
    double lo = 1e-9, hi = 1 - 1e-9;
    if (ok(hi)) return 1;
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return hi;
}

// Random 1-Lipschitz function: Kuratowski-type minimum of shifted distances.
std::vector<double> random_lipschitz(std::mt19937_64& rng, const FiniteMMSpace& x) {
    const std::size_t n = x.size();
    std::vector<double> shift(n), f(n);
    for (auto& s : shift) s = uni(rng, 0, x.diameter() + 1e-9);
    for (std::size_t i = 0; i < n; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) m = std::min(m, shift[j] + x.d(i, j));
        f[i] = m;
    }
    return f;
}

std::map<std::string, Trial> trials() {
    std::map<std::string, Trial> t;

    t["key_1dim"] = [](std::mt19937_64& rng) {
        auto fns = unary_fns();
        auto& g = fns[pick(rng, fns.size())];
        auto x = random_tiny_space(rng, 3 + pick(rng, 3));
        auto xf = metric_transform(x, g.f);
        double kappa = uni(rng, 0.05, 0.45);
        double od = od_exact(x, kappa).value;
        Outcome o;
        // part (2), with part (1) folded in as a second inequality
        double lhs2 = od_exact(xf, 2 * kappa).value, rhs2 = 4 * g.f(od);
        double s = uni(rng, 0.05, x.diameter() + 0.5);
        double lhs1 = concentration_function(xf, 2 * g.f(s) + 1e-9).upper;
        double rhs1 = concentration_function(x, s).upper;
        if (lhs1 - rhs1 > lhs2 - rhs2) {
            o.lhs = lhs1;
            o.rhs = rhs1;
        } else {
            o.lhs = lhs2;
            o.rhs = rhs2;
        }
        o.instance = std::string(g.name) + " n=" + std::to_string(x.size()) + " kappa=" + fmt12(kappa) +
                     " s=" + fmt12(s);
        o.witness = {{"F", g.name}, {"kappa", kappa}, {"s", s}, {"X", jspace(x)}};
        return o;
    };

    t["key_lp"] = [](std::mt19937_64& rng) {
        const double ps[] = {1, 2, 3, fn::inf};
        double p = ps[pick(rng, 4)];
        auto x = random_tiny_space(rng, 2 + pick(rng, 2));
        auto y = random_tiny_space(rng, 2);
        double k1 = uni(rng, 0.05, 0.6), k2 = uni(rng, 0.05, std::min(0.45, 0.95 - k1));
        auto xy = product({x, y}, fn::lp(p));
        Outcome o;
        o.lhs = od_exact(xy, k1 + k2).value;
        o.rhs = od_exact(x, k1).value + 2 * od_exact(y, k2).value;
        o.instance = "p=" + fmt12(p) + " kappa=" + fmt12(k1) + " kappa'=" + fmt12(k2);
        o.witness = {{"p", fmt12(p)}, {"kappa", k1}, {"kappa2", k2}, {"X", jspace(x)}, {"Y", jspace(y)}};
        return o;
    };

    t["key_F"] = [](std::mt19937_64& rng) {
        auto fs = binaries();
        auto& g = fs[pick(rng, fs.size())];
        auto x = random_tiny_space(rng, 2 + pick(rng, 2));
        auto y = random_tiny_space(rng, 2);
        double k1 = uni(rng, 0.02, 0.4), k2 = uni(rng, 0.02, std::min(0.24, 0.49 - k1));
        auto xy = product({x, y}, g.f);
        Outcome o;
        o.lhs = od_exact(xy, 2 * (k1 + k2)).value;
        o.rhs = 4 * g.f(od_exact(x, k1).value, 0) + 8 * g.f(0, od_exact(y, k2).value);
        o.instance = g.name + " kappa=" + fmt12(k1) + " kappa'=" + fmt12(k2);
        o.witness = {{"F", g.name}, {"kappa", k1}, {"kappa2", k2}, {"X", jspace(x)}, {"Y", jspace(y)}};
        return o;
    };

    t["LO"] = [](std::mt19937_64& rng) {
        struct Pair {
            const char* name;
            Mpf f, g;
        };
        std::vector<Pair> pairs = {{"F_2<=F_1", fn::lp(2), fn::lp(1)},
                                   {"F_inf<=F_2", fn::max(), fn::lp(2)},
                                   {"F_3<=F_1.5", fn::lp(3), fn::lp(1.5)},
                                   {"F_exp<=F_1", fn::exp_log(), fn::lp(1)},
                                   {"F_inf<=F_exp", fn::max(), fn::exp_log()}};
        auto& pr = pairs[pick(rng, pairs.size())];
        auto x = random_tiny_space(rng, 2 + pick(rng, 2));
        auto y = random_tiny_space(rng, 2);
        double kappa = uni(rng, 0.05, 0.9);
        Outcome o;
        o.lhs = od_exact(product({x, y}, pr.f), kappa).value;
        o.rhs = od_exact(product({x, y}, pr.g), kappa).value;
        o.instance = std::string(pr.name) + " kappa=" + fmt12(kappa);
        o.witness = {{"pair", pr.name}, {"kappa", kappa}, {"X", jspace(x)}, {"Y", jspace(y)}};
        return o;
    };

    t["conc_fct"] = [](std::mt19937_64& rng) {
        auto x = random_tiny_space(rng, 3 + pick(rng, 2));
        double kappa = uni(rng, 0.05, 0.9);
        double r = uni(rng, 0.05, x.diameter());
        Outcome o;
        double lhs1 = od_exact(x, kappa).value, rhs1 = 2 * conc_inf(x, kappa / 2);
        double lhs2 = concentration_function(x, r).upper, rhs2 = od_sup_kappa(x, r);
        if (lhs1 - rhs1 > lhs2 - rhs2) {
            o.lhs = lhs1;
            o.rhs = rhs1;
        } else {
            o.lhs = lhs2;
            o.rhs = rhs2;
        }
        o.instance = "kappa=" + fmt12(kappa) + " r=" + fmt12(r);
        o.witness = {{"kappa", kappa}, {"r", r}, {"X", jspace(x)}};
        return o;
    };

    t["key_lp_N"] = [](std::mt19937_64& rng) {
        const double ps[] = {1, 2, fn::inf};
        double p = ps[pick(rng, 3)];
        std::vector<FiniteMMSpace> f;
        std::vector<double> k;
        for (int i = 0; i < 3; ++i) f.push_back(random_tiny_space(rng, 2));
        k.push_back(uni(rng, 0.05, 0.4));
        for (int i = 1; i < 3; ++i) k.push_back(uni(rng, 0.02, 0.25));
        Outcome o;
        o.lhs = od_lhs(product(f, fn::lp(p, 3)), k[0] + k[1] + k[2], rng());
        o.rhs = od_exact(f[0], k[0]).value + 2 * (od_exact(f[1], k[1]).value + od_exact(f[2], k[2]).value);
        o.instance = "p=" + fmt12(p) + " N=3";
        o.witness = {{"p", fmt12(p)}, {"kappas", k}, {"X1", jspace(f[0])}, {"X2", jspace(f[1])}, {"X3", jspace(f[2])}};
        return o;
    };

    t["key_F_N"] = [](std::mt19937_64& rng) {
        auto fs = ternaries();
        auto& g = fs[pick(rng, fs.size())];
        std::vector<FiniteMMSpace> f;
        for (int i = 0; i < 3; ++i) f.push_back(random_tiny_space(rng, 2));
        std::vector<double> k{uni(rng, 0.02, 0.2), uni(rng, 0.02, 0.1), uni(rng, 0.02, 0.1)};
        auto unit = [&](std::size_t i, double v) {
            double a[3] = {0, 0, 0};
            a[i] = v;
            return g.f(std::span<const double>(a, 3));
        };
        Outcome o;
        o.lhs = od_lhs(product(f, g.f), 2 * (k[0] + k[1] + k[2]), rng());
        o.rhs = 4 * unit(0, od_exact(f[0], k[0]).value) + 8 * (unit(1, od_exact(f[1], k[1]).value) +
                                                               unit(2, od_exact(f[2], k[2]).value));
        o.instance = g.name + " N=3";
        o.witness = {{"F", g.name}, {"kappas", k}, {"X1", jspace(f[0])}, {"X2", jspace(f[1])}, {"X3", jspace(f[2])}};
        return o;
    };

    t["lm_lem"] = [](std::mt19937_64& rng) {
        auto x = random_tiny_space(rng, 3 + pick(rng, 3));
        auto mu = random_measure(rng, x.size()), nu = random_measure(rng, x.size());
        auto pr = prokhorov(x, mu, nu, 1.0);
        double def = std::max(0.0, pr.plan.deficiency);
        double kappa = uni(rng, 0.01, std::max(0.011, 0.499 * (1 - def)));
        auto f = random_lipschitz(rng, x);
        Outcome o;
        o.lhs = std::abs(levy_mean_of(f, mu) - levy_mean_of(f, nu));
        o.rhs = pr.plan.radius + od_exact(reweight(x, mu), kappa).value + od_exact(reweight(x, nu), kappa).value;
        o.instance = "eps=" + fmt12(pr.plan.radius) + " def=" + fmt12(def) + " kappa=" + fmt12(kappa);
        o.witness = {{"kappa", kappa}, {"mu", mu}, {"nu", nu}, {"f", f}, {"X", jspace(x)}};
        return o;
    };

    t["lprok"] = [](std::mt19937_64& rng) {
        auto fs = binaries();
        auto& g = fs[pick(rng, fs.size())];
        const double lambdas[] = {0.5, 1, 2};
        double lambda = lambdas[pick(rng, 3)];
        auto x = random_tiny_space(rng, 3), y = random_tiny_space(rng, 3);
        auto mu = random_measure(rng, 3), mu2 = random_measure(rng, 3);
        auto nu = random_measure(rng, 3), nu2 = random_measure(rng, 3);
        auto c = lprok_product_check(x, mu, mu2, y, nu, nu2, g.f, lambda);
        Outcome o{c.lhs, c.rhs, g.name + " lambda=" + fmt12(lambda), {}};
        o.witness = {{"F", g.name}, {"lambda", lambda}, {"mu", mu}, {"mu2", mu2}, {"nu", nu}, {"nu2", nu2},
                     {"X", jspace(x)}, {"Y", jspace(y)}};
        return o;
    };

    t["box1"] = [](std::mt19937_64& rng) {
        std::vector<Binary> fs = {{"F_1", fn::lp(1)}, {"F_2", fn::lp(2)}, {"F_inf", fn::max()},
                                  {"F_exp", fn::exp_log()}, {"Petrik", fn::petrik()}};
        auto& g = fs[pick(rng, fs.size())];
        auto two = [&] { return random_tiny_space(rng, 2, 2); };
        auto x = two(), y = two(), z = two(), w = two();
        auto c = box_product_check(x, y, z, w, g.f);
        Outcome o{c.lhs, c.rhs, g.name + " " + c.detail, {}};
        o.witness = {{"F", g.name}, {"X", jspace(x)}, {"Y", jspace(y)}, {"Z", jspace(z)}, {"W", jspace(w)}};
        return o;
    };

    t["box_prok"] = [](std::mt19937_64& rng) {
        std::size_t n = 2 + pick(rng, 3);
        auto x = random_tiny_space(rng, n);
        const std::size_t qs[] = {2, 4, 6, 8};
        std::size_t q = std::max(n, qs[pick(rng, 4)]);
        auto mu = composition(rng, n, q, true), nu = composition(rng, n, q, true);
        Outcome o;
        o.lhs = box_distance(reweight(x, mu), reweight(x, nu)).upper;
        o.rhs = 2 * prokhorov(x, mu, nu).value;
        o.instance = "n=" + std::to_string(n) + " chunks=" + std::to_string(q);
        o.witness = {{"mu", mu}, {"nu", nu}, {"X", jspace(x)}};
        return o;
    };

    t["lr_od"] = [](std::mt19937_64& rng) {
        auto x = random_tiny_space(rng, 3 + pick(rng, 3));
        double kappa = uni(rng, 0.02, 0.49);
        OdOptions oo;
        oo.mode = OdMode::ExactTiny;
        Outcome o;
        o.lhs = levy_radius(x, kappa, oo).value;
        o.rhs = od_exact(x, kappa).value;
        o.instance = "n=" + std::to_string(x.size()) + " kappa=" + fmt12(kappa);
        o.witness = {{"kappa", kappa}, {"X", jspace(x)}};
        return o;
    };

    t["kyfan"] = [](std::mt19937_64& rng) {
        std::size_t n = 3 + pick(rng, 4);
        auto w = random_measure(rng, n);
        std::vector<double> f(n), g(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = uni(rng, 0, 2);
            g[i] = rng() % 3 == 0 ? f[i] : uni(rng, 0, 2);
        }
        // both pushforwards on the union of values, as a subset of the line
        std::vector<double> pts(f);
        pts.insert(pts.end(), g.begin(), g.end());
        const std::size_t m = pts.size();
        std::vector<double> dist(m * m), a(m, 0.0), b(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) dist[i * m + j] = std::abs(pts[i] - pts[j]);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = w[i];
            b[n + i] = w[i];
        }
        Outcome o;
        o.lhs = prokhorov(dist, a, b).value;
        o.rhs = ky_fan(w, f, g);
        o.instance = "n=" + std::to_string(n);
        o.witness = {{"w", w}, {"f", f}, {"g", g}};
        return o;
    };
    return t;
}

}  // namespace

const std::vector<std::string>& battery_names() {
    static const std::vector<std::string> names = {"key_1dim", "key_lp",  "key_F", "LO",      "conc_fct",
                                                   "key_lp_N", "key_F_N", "lm_lem", "lprok",  "box1",
                                                   "box_prok",  "lr_od", "kyfan"};
    return names;
}

FiniteMMSpace random_tiny_space(std::mt19937_64& rng, std::size_t n, std::size_t denominator) {
    std::vector<std::vector<double>> pts(n);
    for (auto& p : pts) p = {uni(rng, 0, 3), uni(rng, 0, 3)};
    std::vector<double> w = denominator ? composition(rng, n, denominator, false) : random_measure(rng, n);
    return validate_space(raw_from_coords(std::move(pts), CoordMetric::Euclidean, 1.0, w));
}

BatteryReport run_inequality_battery(const std::string& lemma, std::size_t n_trials, std::uint64_t seed, double tol) {
    auto all = trials();
    auto it = all.find(lemma);
    if (it == all.end()) throw Error(ErrorKind::BadSpec, "unknown battery '" + lemma + "'");
    BatteryReport rep;
    rep.lemma = lemma;
    rep.rows.resize(n_trials);
    std::uint64_t salt = 1469598103934665603ull;  // FNV-1a of the lemma name
    for (unsigned char c : lemma) salt = (salt ^ c) * 1099511628211ull;
    parallel_for(n_trials, [&](std::size_t k) {
        auto rng = substream(seed ^ salt, k);
        Outcome o = it->second(rng);
        BatteryRow& r = rep.rows[k];
        r.trial = k;
        r.lhs = o.lhs;
        r.rhs = o.rhs;
        r.pass = o.lhs <= o.rhs + tol;
        r.instance = o.instance;
        if (!r.pass) r.witness = o.witness.dump();
    });
    for (auto& r : rep.rows) rep.failures += r.pass ? 0 : 1;
    return rep;
}

std::string battery_csv(const BatteryReport& r) {
    std::ostringstream os;
    os << "lemma,trial,lhs,rhs,pass,instance,witness\n";
    for (const auto& row : r.rows) {
        std::string w = row.witness;
        std::replace(w.begin(), w.end(), '"', '\'');
        os << r.lemma << ',' << row.trial << ',' << fmt12(row.lhs) << ',' << fmt12(row.rhs) << ','
           << (row.pass ? "pass" : "FAIL") << ",\"" << row.instance << "\",\"" << w << "\"\n";
    }
    return os.str();
}

}  // namespace mml
