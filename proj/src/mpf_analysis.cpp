#include "mml/mpf_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "mml/parallel.hpp"

namespace mml {

// ---- triangle triplets -----------------------------------------------------

bool is_triangle_triplet(double a, double b, double c, double tol) {
    return a <= b + c + tol && b <= a + c + tol && c <= a + b + tol;
}

std::string TripletVerdict::label() const { return violation ? "violation" : "no violation found"; }

std::string TripletVerdict::detail() const {
    std::ostringstream os;
    if (violation)
        os << "F values (" << fa << ", " << fb << ", " << fc << ") are not a triangle triplet";
    else
        os << tested << " triplets tested";
    if (!zero_set_ok) os << "; zero set check failed: " << zero_set_note;
    return os.str();
}

namespace {

struct Triplet {
    double a, b, c;
};

std::vector<Triplet> boundary_triplets(double horizon) {
    const double base[] = {0, 0.125, 0.25, 0.5, 1, 1.5, 2, 2.5, 3, 4, 5};
    double scale = horizon / 10.0;
    std::vector<Triplet> out;
    out.push_back({0, 0, 0});
    for (double b : base)
        for (double c : base) {
            double bb = b * scale, cc = c * scale;
            if (bb + cc > horizon) continue;
            if (bb <= cc) out.push_back({bb + cc, bb, cc});  // degenerate
        }
    for (double v : base) out.push_back({v * scale, v * scale, v * scale});  // all equal
    for (double v : base) out.push_back({v * scale, v * scale, 0});           // one zero
    return out;
}

Triplet permuted(Triplet t, int p) {
    switch (p % 3) {
        case 0: return t;
        case 1: return {t.b, t.c, t.a};
        default: return {t.c, t.a, t.b};
    }
}

Triplet random_triplet(std::mt19937_64& rng, double horizon) {
    std::uniform_real_distribution<double> u(0, horizon);
    for (;;) {
        Triplet t{u(rng), u(rng), u(rng)};
        if (is_triangle_triplet(t.a, t.b, t.c)) return t;
    }
}

bool test_tuple(const Mpf& f, const std::vector<Triplet>& ts, double tol, TripletVerdict& v) {
    const std::size_t N = ts.size();
    double a[16], b[16], c[16];
    for (std::size_t i = 0; i < N; ++i) {
        a[i] = ts[i].a;
        b[i] = ts[i].b;
        c[i] = ts[i].c;
    }
    double fa = f.eval_raw(a), fb = f.eval_raw(b), fc = f.eval_raw(c);
    double scale = std::max({1.0, std::abs(fa), std::abs(fb), std::abs(fc)});
    if (is_triangle_triplet(fa, fb, fc, tol * scale)) return false;
    v.violation = true;
    v.a.assign(a, a + N);
    v.b.assign(b, b + N);
    v.c.assign(c, c + N);
    v.fa = fa;
    v.fb = fb;
    v.fc = fc;
    return true;
}

void zero_set_check(const Mpf& f, std::uint64_t seed, TripletVerdict& v) {
    const std::size_t N = f.arity();
    std::vector<double> x(N, 0.0);
    double z = f.eval_raw(x.data());
    if (std::abs(z) > 1e-12) {
        v.zero_set_ok = false;
        v.zero_set_note = "F(0) = " + std::to_string(z);
        return;
    }
    auto rng = substream(seed, 0xfeed);
    std::exponential_distribution<double> e(1.0);
    for (double r : {1e-6, 1e-3, 1.0, 10.0}) {
        for (int k = 0; k < 64 + static_cast<int>(N); ++k) {
            if (k < static_cast<int>(N)) {
                std::fill(x.begin(), x.end(), 0.0);
                x[k] = r;
            } else {
                double norm = 0;
                for (auto& xi : x) {
                    xi = e(rng);
                    norm += xi * xi;
                }
                norm = std::sqrt(norm);
                for (auto& xi : x) xi *= r / norm;
            }
            double val = f.eval_raw(x.data());
            if (!(val > 0)) {
                v.zero_set_ok = false;
                std::ostringstream os;
                os << "F vanishes at a point of norm " << r;
                v.zero_set_note = os.str();
                return;
            }
        }
    }
}

}  // namespace

TripletVerdict check_triangle_triplets(const Mpf& f, const TripletOptions& opt) {
    const std::size_t N = f.arity();
    if (N > 16) throw Error(ErrorKind::ArityMismatch, "triplet check supports arity <= 16");
    TripletVerdict v;
    zero_set_check(f, opt.seed, v);

    auto bounds = boundary_triplets(opt.horizon);
    std::vector<Triplet> tuple(N);
    // Deterministic pass: same boundary triplet everywhere, then one coordinate at a time.
    for (const auto& t : bounds) {
        for (int p = 0; p < 3; ++p) {
            std::fill(tuple.begin(), tuple.end(), permuted(t, p));
            ++v.tested;
            if (test_tuple(f, tuple, opt.tol, v)) return v;
            if (N == 1) continue;
            for (std::size_t i = 0; i < N; ++i) {
                std::fill(tuple.begin(), tuple.end(), Triplet{0, 0, 0});
                tuple[i] = permuted(t, p);
                ++v.tested;
                if (test_tuple(f, tuple, opt.tol, v)) return v;
            }
        }
    }

    const std::size_t chunk = 4096;
    const std::size_t chunks = (opt.samples + chunk - 1) / chunk;
    std::vector<TripletVerdict> found(chunks);
    std::vector<char> hit(chunks, 0);
    parallel_for(chunks, [&](std::size_t ci) {
        auto rng = substream(opt.seed, ci);
        std::uniform_int_distribution<std::size_t> pick(0, bounds.size() - 1);
        std::uniform_int_distribution<int> perm(0, 2);
        std::uniform_real_distribution<double> coin(0, 1);
        std::vector<Triplet> tp(N);
        std::size_t count = std::min(chunk, opt.samples - ci * chunk);
        for (std::size_t s = 0; s < count; ++s) {
            for (auto& t : tp) t = coin(rng) < 0.1 ? permuted(bounds[pick(rng)], perm(rng)) : random_triplet(rng, opt.horizon);
            if (test_tuple(f, tp, opt.tol, found[ci])) {
                hit[ci] = 1;
                found[ci].tested = s + 1;
                return;
            }
        }
    });
    for (std::size_t ci = 0; ci < chunks; ++ci) {
        if (hit[ci]) {
            found[ci].tested += v.tested + ci * chunk;
            found[ci].zero_set_ok = v.zero_set_ok;
            found[ci].zero_set_note = v.zero_set_note;
            return found[ci];
        }
    }
    v.tested += opt.samples;
    return v;
}

// ---- minimisation helpers --------------------------------------------------

double golden_min(const std::function<double(double)>& g, double lo, double hi, int iters, double* argmin) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    double best_x = lo, best = g(lo);
    double ghi = g(hi);
    if (ghi < best) {
        best = ghi;
        best_x = hi;
    }
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int i = 0; i < iters && b - a > 1e-15; ++i) {
        if (f1 < best) {
            best = f1;
            best_x = x1;
        }
        if (f2 < best) {
            best = f2;
            best_x = x2;
        }
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        }
    }
    if (f1 < best) {
        best = f1;
        best_x = x1;
    }
    if (f2 < best) {
        best = f2;
        best_x = x2;
    }
    if (argmin) *argmin = best_x;
    return best;
}

namespace {

// Coordinate-wise golden descent inside [lo, hi], starting at x.
double refine_in_box(const Mpf& f, std::vector<double> x, const std::vector<double>& lo,
                     const std::vector<double>& hi, std::vector<double>* argmin) {
    double best = f.eval_raw(x.data());
    for (int round = 0; round < 2; ++round) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (hi[k] <= lo[k]) continue;
            std::vector<double> y = x;
            double arg = x[k];
            double v = golden_min(
                [&](double t) {
                    y[k] = t;
                    return f.eval_raw(y.data());
                },
                lo[k], hi[k], 60, &arg);
            if (v < best) {
                best = v;
                x[k] = arg;
            }
        }
    }
    if (argmin) *argmin = x;
    return best;
}

}  // namespace

double box_min(const Mpf& f, const std::vector<double>& lo, const std::vector<double>& hi, std::size_t per_axis,
               std::vector<double>* argmin) {
    const std::size_t N = f.arity();
    if (lo.size() != N || hi.size() != N) throw Error(ErrorKind::ArityMismatch, "box dimension");
    std::size_t total = 1;
    for (std::size_t k = 0; k < N; ++k) total *= per_axis;
    std::vector<double> x(N), best_x(N);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> step(N);
    for (std::size_t k = 0; k < N; ++k) step[k] = per_axis > 1 ? (hi[k] - lo[k]) / (per_axis - 1) : 0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t r = idx;
        for (std::size_t k = N; k-- > 0;) {
            x[k] = lo[k] + step[k] * static_cast<double>(r % per_axis);
            r /= per_axis;
        }
        double v = f.eval_raw(x.data());
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    std::vector<double> rlo(N), rhi(N);
    for (std::size_t k = 0; k < N; ++k) {
        rlo[k] = std::max(lo[k], best_x[k] - step[k]);
        rhi[k] = std::min(hi[k], best_x[k] + step[k]);
    }
    std::vector<double> refined_x;
    double refined = refine_in_box(f, best_x, rlo, rhi, &refined_x);
    if (refined < best) {
        best = refined;
        best_x = refined_x;
    }
    if (argmin) *argmin = best_x;
    return best;
}

// ---- defect tables ---------------------------------------------------------

double DefectReport::at_index(const std::vector<std::size_t>& idx) const {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < arity; ++k) flat = flat * per_axis + idx[k];
    return table[flat];
}

double DefectReport::at(const std::vector<double>& x) const {
    std::vector<std::size_t> idx(arity);
    for (std::size_t k = 0; k < arity; ++k)
        idx[k] = std::min(per_axis - 1, static_cast<std::size_t>(std::llround(x[k] / h)));
    return at_index(idx);
}

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= b;
    return r;
}

// Defect on the grid over [0, probe]^N; entries for every probe-grid point.
struct FullDefect {
    std::size_t M = 0;  // points per axis up to probe
    std::vector<double> defect;
};

FullDefect full_defect(const Mpf& f, double h, double probe, bool refine) {
    const std::size_t N = f.arity();
    FullDefect out;
    out.M = static_cast<std::size_t>(std::ceil(probe / h - 1e-9)) + 1;
    const std::size_t M = out.M;
    const std::size_t total = ipow(M, N);
    if (total > 40'000'000)
        throw Error(ErrorKind::BadArgument, "defect grid too large; increase h or lower probe");

    std::vector<double> val(total);
    std::vector<std::size_t> coord(N, 0);
    std::vector<double> x(N);
    for (std::size_t idx = 0; idx < total; ++idx) {
        for (std::size_t k = 0; k < N; ++k) x[k] = static_cast<double>(coord[k]) * h;
        val[idx] = f.eval_raw(x.data());
        for (std::size_t k = N; k-- > 0;) {
            if (++coord[k] < M) break;
            coord[k] = 0;
        }
    }

    // Minimum over the upper orthant: suffix minima along each axis in turn.
    std::vector<double> mn = val;
    std::vector<std::uint32_t> arg(total);
    std::iota(arg.begin(), arg.end(), 0u);
    for (std::size_t k = 0; k < N; ++k) {
        std::size_t stride = ipow(M, N - 1 - k);
        for (std::size_t idx = total; idx-- > 0;) {
            std::size_t ck = (idx / stride) % M;
            if (ck + 1 >= M) continue;
            std::size_t nxt = idx + stride;
            if (mn[nxt] < mn[idx]) {
                mn[idx] = mn[nxt];
                arg[idx] = arg[nxt];
            }
        }
    }

    out.defect.resize(total);
    std::unordered_map<std::uint64_t, double> cache;
    std::vector<std::size_t> ci(N), ai(N);
    for (std::size_t idx = 0; idx < total; ++idx) {
        double inf = mn[idx];
        if (refine && arg[idx] != idx) {
            std::size_t r = idx, a = arg[idx];
            std::uint64_t mask = 0;
            for (std::size_t k = N; k-- > 0;) {
                ci[k] = r % M;
                r /= M;
                ai[k] = a % M;
                a /= M;
                if (ai[k] == ci[k]) mask |= (1ull << k);
            }
            std::uint64_t key = (static_cast<std::uint64_t>(arg[idx]) << 16) | mask;
            auto it = cache.find(key);
            if (it == cache.end()) {
                std::vector<double> lo(N), hi(N), start(N);
                for (std::size_t k = 0; k < N; ++k) {
                    start[k] = static_cast<double>(ai[k]) * h;
                    lo[k] = (ai[k] > ci[k] ? static_cast<double>(ai[k] - 1) : static_cast<double>(ai[k])) * h;
                    hi[k] = static_cast<double>(std::min(ai[k] + 1, M - 1)) * h;
                }
                double refined = refine_in_box(f, start, lo, hi, nullptr);
                it = cache.emplace(key, std::min(inf, refined)).first;
            }
            inf = it->second;
        }
        out.defect[idx] = std::max(0.0, val[idx] - inf);
    }
    return out;
}

// Restriction of a probe-grid table to the first m points per axis.
std::vector<double> restrict_grid(const std::vector<double>& t, std::size_t M, std::size_t m, std::size_t N) {
    std::size_t total = ipow(m, N);
    std::vector<double> out(total);
    std::vector<std::size_t> c(N, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t flat = 0;
        for (std::size_t k = 0; k < N; ++k) flat = flat * M + c[k];
        out[idx] = t[flat];
        for (std::size_t k = N; k-- > 0;) {
            if (++c[k] < m) break;
            c[k] = 0;
        }
    }
    return out;
}

std::vector<double> unflatten(std::size_t idx, std::size_t m, std::size_t N, double h) {
    std::vector<double> x(N);
    for (std::size_t k = N; k-- > 0;) {
        x[k] = static_cast<double>(idx % m) * h;
        idx /= m;
    }
    return x;
}

std::size_t axis_points(double D, double h) { return static_cast<std::size_t>(std::floor(D / h + 1e-9)) + 1; }

}  // namespace

DefectReport defect_table(const Mpf& f, double D, double h, double probe, bool refine) {
    if (!(h > 0 && h <= D)) throw Error(ErrorKind::BadArgument, "need 0 < h <= D");
    if (!(probe >= D)) throw Error(ErrorKind::BadArgument, "need probe >= D");
    FullDefect full = full_defect(f, h, probe, refine);
    DefectReport r;
    r.D = D;
    r.h = h;
    r.probe = probe;
    r.arity = f.arity();
    r.per_axis = axis_points(D, h);
    r.table = restrict_grid(full.defect, full.M, r.per_axis, r.arity);
    std::size_t best = 0;
    for (std::size_t i = 0; i < r.table.size(); ++i)
        if (r.table[i] > r.table[best]) best = i;
    r.sup_defect = r.table[best];
    r.argsup = unflatten(best, r.per_axis, r.arity, h);
    return r;
}

// ---- classifier ------------------------------------------------------------

bool tends_to_zero(const std::vector<double>& v, const std::vector<int>& n, double tol) {
    if (v.empty()) return true;
    if (v.back() <= tol) return true;
    if (v.size() < 2) return false;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > v[i] + tol) return false;
    double ratio = std::sqrt(static_cast<double>(n.front()) / static_cast<double>(n.back()));
    return v.back() <= v.front() * ratio + tol;
}

SequenceVerdict classify_sequence(const std::function<Mpf(int)>& family, const Mpf& limit,
                                  const ClassifyOptions& opt) {
    if (opt.n_list.empty() || opt.D_list.empty()) throw Error(ErrorKind::BadArgument, "empty n or D list");
    if (!std::is_sorted(opt.n_list.begin(), opt.n_list.end()))
        throw Error(ErrorKind::BadArgument, "n_list must be ascending");
    const std::size_t N = limit.arity();
    const double maxD = *std::max_element(opt.D_list.begin(), opt.D_list.end());
    if (opt.probe != 0 && opt.probe < maxD) throw Error(ErrorKind::BadArgument, "probe must be >= max D");
    const double h = opt.h;
    const std::size_t mD = axis_points(maxD, h);

    SequenceVerdict v;
    v.n_list = opt.n_list;
    v.sup_bounded.assign(opt.D_list.size(), {});
    std::vector<std::vector<double>> local;  // per n, defect on [0, maxD]^N
    std::vector<std::vector<double>> gaps;   // per n, |F_n - F| on [0, maxD]^N

    std::vector<double> lim_vals(ipow(mD, N));
    for (std::size_t idx = 0; idx < lim_vals.size(); ++idx) {
        auto x = unflatten(idx, mD, N, h);
        lim_vals[idx] = limit.eval_raw(x.data());
    }

    double max_probe = maxD;
    for (int n : opt.n_list) {
        Mpf fn_ = family(n);
        if (fn_.arity() != N) throw Error(ErrorKind::InconsistentArity, "family member arity differs from limit");
        double probe = std::max(opt.probe, std::max(maxD, static_cast<double>(n) + 8));
        max_probe = std::max(max_probe, probe);
        v.probe_used.push_back(probe);
        FullDefect full = full_defect(fn_, h, probe, true);
        v.sup_all.push_back(*std::max_element(full.defect.begin(), full.defect.end()));
        for (std::size_t di = 0; di < opt.D_list.size(); ++di) {
            auto sub = restrict_grid(full.defect, full.M, axis_points(opt.D_list[di], h), N);
            v.sup_bounded[di].push_back(*std::max_element(sub.begin(), sub.end()));
        }
        local.push_back(restrict_grid(full.defect, full.M, mD, N));
        std::vector<double> gap(lim_vals.size());
        for (std::size_t idx = 0; idx < gap.size(); ++idx) {
            auto x = unflatten(idx, mD, N, h);
            gap[idx] = std::abs(fn_.eval_raw(x.data()) - lim_vals[idx]);
        }
        v.uniform_gap.push_back(*std::max_element(gap.begin(), gap.end()));
        gaps.push_back(std::move(gap));
    }

    const double tol = opt.tol;
    v.raw[0] = std::all_of(v.sup_all.begin(), v.sup_all.end(), [&](double s) { return s <= tol; });
    v.raw[1] = tends_to_zero(v.sup_all, opt.n_list, tol);
    v.raw[2] = true;
    for (const auto& seq : v.sup_bounded) v.raw[2] = v.raw[2] && tends_to_zero(seq, opt.n_list, tol);

    v.raw[3] = true;
    v.pointwise_convergence = true;
    std::size_t worst = 0;
    double worst_last = -1;
    std::vector<double> seq(opt.n_list.size());
    for (std::size_t idx = 0; idx < lim_vals.size(); ++idx) {
        for (std::size_t k = 0; k < seq.size(); ++k) seq[k] = local[k][idx];
        bool ok = tends_to_zero(seq, opt.n_list, tol);
        double last = seq.back() + (ok ? 0.0 : 1e6);
        if (last > worst_last) {
            worst_last = last;
            worst = idx;
        }
        v.raw[3] = v.raw[3] && ok;
        for (std::size_t k = 0; k < seq.size(); ++k) seq[k] = gaps[k][idx];
        v.pointwise_convergence = v.pointwise_convergence && tends_to_zero(seq, opt.n_list, tol);
    }
    v.worst_point = unflatten(worst, mD, N, h);
    for (const auto& t : local) v.worst_point_defects.push_back(t[worst]);

    FullDefect lim = full_defect(limit, h, max_probe, true);
    auto lim_local = restrict_grid(lim.defect, lim.M, mD, N);
    v.limit_sup_defect = *std::max_element(lim_local.begin(), lim_local.end());
    v.raw[4] = v.limit_sup_defect <= tol;
    v.uniform_convergence = tends_to_zero(v.uniform_gap, opt.n_list, tol);

    v.cond = v.raw;
    for (std::size_t k = 0; k + 1 < 5; ++k) {
        if (v.cond[k] && !v.cond[k + 1]) {
            v.cond[k + 1] = true;
            v.chain_repaired = true;
        }
    }
    return v;
}

MulhollandConvexity mulholland_convexity(const Mpf& phi, double top, std::size_t steps) {
    MulhollandConvexity out;
    const double tol = 1e-9;
    double hs = top / static_cast<double>(steps);
    for (std::size_t i = 1; i + 1 < steps; ++i) {
        double s = hs * static_cast<double>(i);
        double a = s - hs, b = s + hs;
        double second = phi.eval_raw(&a) - 2 * phi.eval_raw(&s) + phi.eval_raw(&b);
        if (second < -tol * std::max(1.0, std::abs(phi.eval_raw(&s)))) {
            out.phi_convex = false;
            out.witness_phi = s;
            break;
        }
    }
    // g(u) = log(phi(e^u)) for u in [-6, log(top)].
    double ulo = -6, uhi = std::log(top);
    double hu = (uhi - ulo) / static_cast<double>(steps);
    auto g = [&](double u) {
        double s = std::exp(u);
        return std::log(phi.eval_raw(&s));
    };
    for (std::size_t i = 1; i + 1 < steps; ++i) {
        double u = ulo + hu * static_cast<double>(i);
        double second = g(u - hu) - 2 * g(u) + g(u + hu);
        if (second < -1e-9) {
            out.log_exp_convex = false;
            out.witness_log = std::exp(u);
            break;
        }
    }
    return out;
}

}  // namespace mml
