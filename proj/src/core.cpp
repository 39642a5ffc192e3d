#include "mml/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "mml/parallel.hpp"

namespace mml {

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::TriangleViolation: return "TriangleViolation";
        case ErrorKind::NegativeWeight: return "NegativeWeight";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::BadShape: return "BadShape";
        case ErrorKind::HostMismatch: return "HostMismatch";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::ArityMismatch: return "ArityMismatch";
        case ErrorKind::BadArgument: return "BadArgument";
        case ErrorKind::NotIncreasing: return "NotIncreasing";
        case ErrorKind::CapExceeded: return "CapExceeded";
        case ErrorKind::MetricViolation: return "MetricViolation";
        case ErrorKind::NotLipschitz: return "NotLipschitz";
        case ErrorKind::BadAlpha: return "BadAlpha";
        case ErrorKind::BadKappa: return "BadKappa";
        case ErrorKind::NotRational: return "NotRational";
        case ErrorKind::TargetTooLarge: return "TargetTooLarge";
        case ErrorKind::NotTriangleTriplet: return "NotTriangleTriplet";
        case ErrorKind::WitnessInvalid: return "WitnessInvalid";
        case ErrorKind::BadSpec: return "BadSpec";
        case ErrorKind::InconsistentArity: return "InconsistentArity";
        case ErrorKind::Io: return "Io";
    }
    return "Error";
}

// ---- threading -------------------------------------------------------------

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned n) { g_threads = n; }

unsigned thread_count() {
    unsigned n = g_threads.load();
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next++;
                if (i >= n || failed) return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// ---- spaces ----------------------------------------------------------------

double FiniteMMSpace::diameter() const {
    double m = 0;
    for (double v : dist_) m = std::max(m, v);
    return m;
}

RawSpace FiniteMMSpace::to_raw() const {
    RawSpace r;
    r.labels = labels_;
    r.dist = dist_;
    r.weight = weight_;
    r.coords = coords_;
    r.metric = metric_;
    r.radius = radius_;
    return r;
}

namespace {

void full_triangle_check(const std::vector<double>& d, std::size_t n, double tol) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ri = d.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* rj = d.data() + j * n;
            double worst = -1e300;
            for (std::size_t k = 0; k < n; ++k) {
                double v = ri[k] - rj[k];
                worst = v > worst ? v : worst;
            }
            if (worst <= ri[j] + tol) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (ri[k] > ri[j] + rj[k] + tol) {
                    std::ostringstream os;
                    os << "d(" << i << "," << k << ")=" << ri[k] << " > d(" << i << "," << j
                       << ")+d(" << j << "," << k << ")=" << ri[j] + rj[k];
                    throw Error(ErrorKind::TriangleViolation, os.str());
                }
            }
        }
    }
}

void sampled_triangle_check(const std::vector<double>& d, std::size_t n, double tol) {
    auto rng = substream(0x7a1a, n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int t = 0; t < 200000; ++t) {
        std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        if (d[i * n + k] > d[i * n + j] + d[j * n + k] + tol) {
            std::ostringstream os;
            os << "d(" << i << "," << k << ") exceeds path through " << j;
            throw Error(ErrorKind::TriangleViolation, os.str());
        }
    }
}

}  // namespace

FiniteMMSpace validate_space(RawSpace raw, const ValidateOptions& opt) {
    const std::size_t n = raw.weight.size();
    if (n == 0) throw Error(ErrorKind::BadShape, "empty space");
    if (raw.dist.size() != n * n) throw Error(ErrorKind::BadShape, "distance matrix is not n x n");
    if (!raw.labels.empty() && raw.labels.size() != n)
        throw Error(ErrorKind::BadShape, "label count differs from point count");
    if (!raw.coords.empty() && raw.coords.size() != n)
        throw Error(ErrorKind::BadShape, "coordinate count differs from point count");

    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = raw.weight[i];
        if (!(w >= 0)) throw Error(ErrorKind::NegativeWeight, "weight " + std::to_string(i));
        sum += w;
    }
    if (std::abs(sum - 1.0) > opt.mass_tol) {
        std::ostringstream os;
        os.precision(17);
        os << "weights sum to " << sum;
        throw Error(ErrorKind::NotNormalized, os.str());
    }

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i)
        if (raw.weight[i] > 0) keep.push_back(i);
    const std::size_t m = keep.size();
    if (m > opt.cap) throw Error(ErrorKind::TooLarge, std::to_string(m) + " points exceed cap");

    FiniteMMSpace s;
    s.n_ = m;
    s.dist_.resize(m * m);
    s.weight_.resize(m);
    s.labels_.resize(m);
    for (std::size_t a = 0; a < m; ++a) {
        std::size_t i = keep[a];
        s.weight_[a] = raw.weight[i];
        s.labels_[a] = raw.labels.empty() ? std::to_string(i) : raw.labels[i];
        for (std::size_t b = 0; b < m; ++b) s.dist_[a * m + b] = raw.dist[i * n + keep[b]];
    }
    if (!raw.coords.empty()) {
        s.coords_.reserve(m);
        for (std::size_t i : keep) s.coords_.push_back(std::move(raw.coords[i]));
        s.metric_ = raw.metric;
        s.radius_ = raw.radius;
    }

    for (std::size_t a = 0; a < m; ++a) {
        if (s.dist_[a * m + a] != 0) throw Error(ErrorKind::BadShape, "nonzero diagonal at " + std::to_string(a));
        for (std::size_t b = a + 1; b < m; ++b) {
            double x = s.dist_[a * m + b], y = s.dist_[b * m + a];
            if (!(x >= 0) || !std::isfinite(x))
                throw Error(ErrorKind::BadShape, "negative or non-finite distance");
            if (std::abs(x - y) > opt.triangle_tol) throw Error(ErrorKind::BadShape, "asymmetric distance");
        }
    }
    bool from_coords = !s.coords_.empty() && s.metric_ != CoordMetric::None;
    if (m > (from_coords ? opt.coord_full_check_limit : opt.full_check_limit))
        sampled_triangle_check(s.dist_, m, opt.triangle_tol);
    else
        full_triangle_check(s.dist_, m, opt.triangle_tol);
    return s;
}

RawSpace raw_from_coords(std::vector<std::vector<double>> coords, CoordMetric metric, double radius,
                         std::vector<double> weights, std::vector<std::string> labels) {
    const std::size_t n = coords.size();
    RawSpace r;
    r.dist.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& a = coords[i];
            const auto& b = coords[j];
            if (a.size() != b.size()) throw Error(ErrorKind::BadShape, "coordinate dimension mismatch");
            double v;
            if (metric == CoordMetric::GeodesicSphere) {
                double dot = 0;
                for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
                double c = std::clamp(dot / (radius * radius), -1.0, 1.0);
                v = radius * std::acos(c);
            } else {
                double s = 0;
                for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
                v = std::sqrt(s);
            }
            r.dist[i * n + j] = r.dist[j * n + i] = v;
        }
    }
    if (weights.empty()) weights.assign(n, 1.0 / static_cast<double>(n));
    r.weight = std::move(weights);
    r.labels = std::move(labels);
    r.coords = std::move(coords);
    r.metric = metric == CoordMetric::None ? CoordMetric::Euclidean : metric;
    r.radius = radius;
    return r;
}

FiniteMMSpace line_space(const std::vector<double>& positions, const std::vector<double>& weights) {
    std::vector<std::vector<double>> c;
    for (double p : positions) c.push_back({p});
    return validate_space(raw_from_coords(std::move(c), CoordMetric::Euclidean, 1.0, weights));
}

FiniteMMSpace uniform_space(std::vector<double> dist_rowmajor, std::size_t n) {
    RawSpace r;
    r.dist = std::move(dist_rowmajor);
    r.weight.assign(n, 1.0 / static_cast<double>(n));
    return validate_space(std::move(r));
}

FiniteMMSpace reweight(const FiniteMMSpace& x, const std::vector<double>& weights) {
    if (weights.size() != x.size()) throw Error(ErrorKind::HostMismatch, "weight vector size");
    RawSpace r = x.to_raw();
    r.weight = weights;
    return validate_space(std::move(r));
}

// ---- distributions ---------------------------------------------------------

double RealDistribution::total() const {
    double s = 0;
    for (const auto& a : atoms) s += a.mass;
    return s;
}

RealDistribution make_distribution(std::vector<double> pos, std::vector<double> mass) {
    if (pos.size() != mass.size()) throw Error(ErrorKind::HostMismatch, "positions vs masses");
    std::vector<std::size_t> idx(pos.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pos[a] < pos[b]; });
    RealDistribution out;
    for (std::size_t i : idx) {
        if (mass[i] <= 0) continue;
        if (!out.atoms.empty() && pos[i] - out.atoms.back().pos <= 1e-12)
            out.atoms.back().mass += mass[i];
        else
            out.atoms.push_back({pos[i], mass[i]});
    }
    return out;
}

RealDistribution pushforward(const FiniteMMSpace& x, const std::vector<double>& f) {
    if (f.size() != x.size()) throw Error(ErrorKind::HostMismatch, "function is not defined on this space");
    return make_distribution(f, x.weights());
}

LipCheck lipschitz_excess(const FiniteMMSpace& x, const std::vector<double>& f) {
    if (f.size() != x.size()) throw Error(ErrorKind::HostMismatch, "function is not defined on this space");
    LipCheck c;
    c.max_ratio_excess = -1e300;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double e = std::abs(f[i] - f[j]) - x.d(i, j);
            if (e > c.max_ratio_excess) c = {e, i, j};
        }
    if (x.size() < 2) c.max_ratio_excess = 0;
    return c;
}

bool is_1lipschitz(const FiniteMMSpace& x, const std::vector<double>& f, double tol) {
    return lipschitz_excess(x, f).max_ratio_excess <= tol;
}

// ---- isomorphism -----------------------------------------------------------

namespace {

bool extend(const FiniteMMSpace& x, const FiniteMMSpace& y, double tol, std::vector<std::size_t>& sigma,
            std::vector<bool>& used, std::size_t k) {
    if (k == x.size()) return true;
    for (std::size_t c = 0; c < y.size(); ++c) {
        if (used[c] || std::abs(x.w(k) - y.w(c)) > tol) continue;
        bool ok = true;
        for (std::size_t j = 0; j < k && ok; ++j) ok = std::abs(x.d(k, j) - y.d(c, sigma[j])) <= tol;
        if (!ok) continue;
        used[c] = true;
        sigma[k] = c;
        if (extend(x, y, tol, sigma, used, k + 1)) return true;
        used[c] = false;
    }
    return false;
}

}  // namespace

std::optional<std::vector<std::size_t>> mm_isomorphic(const FiniteMMSpace& x, const FiniteMMSpace& y,
                                                      double tol) {
    if (x.size() > 10 || y.size() > 10) throw Error(ErrorKind::TooLarge, "mm_isomorphic supports at most 10 points");
    if (x.size() != y.size()) return std::nullopt;
    std::vector<std::size_t> sigma(x.size());
    std::vector<bool> used(y.size(), false);
    if (extend(x, y, tol, sigma, used, 0)) return sigma;
    return std::nullopt;
}

}  // namespace mml
