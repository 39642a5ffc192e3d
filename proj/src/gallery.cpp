#include "mml/gallery.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "mml/io.hpp"
#include "mml/mpf_analysis.hpp"
#include "mml/parallel.hpp"
#include "mml/product.hpp"

namespace mml {

namespace {

std::vector<std::vector<double>> draw_sphere(int n, double r, std::size_t count, std::uint64_t seed) {
    std::vector<std::vector<double>> pts(count);
    parallel_for(count, [&](std::size_t i) {
        auto rng = substream(seed, i);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<double> v(static_cast<std::size_t>(n) + 1);
        double norm = 0;
        do {
            norm = 0;
            for (auto& c : v) {
                c = g(rng);
                norm += c * c;
            }
        } while (norm < 1e-300);
        norm = std::sqrt(norm);
        for (auto& c : v) c *= r / norm;
        pts[i] = std::move(v);
    });
    return pts;
}

std::string cache_path(int n, double r, std::size_t N, std::uint64_t seed, bool antipodal) {
    const char* dir = std::getenv("MML_CACHE_DIR");
    if (!dir || !*dir) return {};
    std::ostringstream os;
    os << dir << "/sphere_n" << n << "_r" << fmt12(r) << "_N" << N << "_s" << seed << (antipodal ? "_anti" : "")
       << ".json";
    return os.str();
}

std::vector<std::vector<double>> sphere_coords(int n, double r, std::size_t N, std::uint64_t seed, bool antipodal) {
    std::string path = cache_path(n, r, N, seed, antipodal);
    if (!path.empty() && std::filesystem::exists(path)) {
        auto j = read_json_file(path);
        auto pts = j.at("coords").get<std::vector<std::vector<double>>>();
        if (pts.size() == N) return pts;
    }
    std::vector<std::vector<double>> pts;
    if (antipodal) {
        pts = draw_sphere(n, r, N / 2, seed);
        for (std::size_t i = 0; i < N / 2; ++i) {
            auto v = pts[i];
            for (auto& c : v) c = -c;
            pts.push_back(std::move(v));
        }
    } else {
        pts = draw_sphere(n, r, N, seed);
    }
    if (!path.empty()) {
        std::filesystem::create_directories(std::filesystem::path(path).parent_path());
        write_json_file(path, json{{"n", n}, {"r", r}, {"N", N}, {"seed", seed}, {"coords", pts}});
    }
    return pts;
}

double unary_min(const Mpf& f, double lo, double hi) { return box_min(f, {lo}, {hi}, 4096); }

int capped_dim(double r, int n, bool& capped) {
    double need = std::ceil(std::pow(r, 4));
    double k = std::max(static_cast<double>(n), need);
    capped = k > kSphereDimCap;
    return static_cast<int>(std::min<double>(k, kSphereDimCap));
}

FiniteMMSpace factor_times_sphere(const FiniteMMSpace& two, const FiniteMMSpace& sphere) {
    ProductOptions po;
    po.triplet_samples = 0;  // l_2 is known to be metric preserving
    return product({two, sphere}, fn::lp(2), po);
}

}  // namespace

SphereSample sample_sphere(int n, double r, std::size_t N, SphereMetric metric, std::uint64_t seed, bool antipodal) {
    if (n < 1) throw Error(ErrorKind::BadArgument, "sphere dimension must be >= 1");
    if (N < 2) throw Error(ErrorKind::BadArgument, "need at least two sample points");
    if (!(r > 0)) throw Error(ErrorKind::BadArgument, "radius must be positive");
    if (antipodal && N % 2) throw Error(ErrorKind::BadArgument, "antipodal samples need an even count");
    SphereSample s;
    s.n = n;
    s.r = r;
    s.N = N;
    s.metric = metric;
    s.seed = seed;
    s.antipodal = antipodal;
    auto pts = sphere_coords(n, r, N, seed, antipodal);
    auto cm = metric == SphereMetric::Chordal ? CoordMetric::Euclidean : CoordMetric::GeodesicSphere;
    s.space = validate_space(raw_from_coords(std::move(pts), cm, r));
    return s;
}

FiniteMMSpace two_point(double s, double w0) {
    if (!(s > 0)) throw Error(ErrorKind::BadArgument, "two-point distance must be positive");
    RawSpace raw;
    raw.labels = {"x0", "x1"};
    raw.dist = {0, s, s, 0};
    raw.weight = {w0, 1 - w0};
    return validate_space(std::move(raw));
}

FiniteMMSpace four_point_Z(double alpha, double beta, double gamma) {
    if (!(alpha > 0 && beta > 0 && gamma > 0)) throw Error(ErrorKind::BadArgument, "Z needs positive distances");
    if (!is_triangle_triplet(alpha, beta, gamma, 1e-9))
        throw Error(ErrorKind::NotTriangleTriplet, "(" + fmt12(alpha) + ", " + fmt12(beta) + ", " + fmt12(gamma) + ")");
    // z_ij at index i + 2j
    RawSpace raw;
    raw.labels = {"z00", "z10", "z01", "z11"};
    raw.dist.assign(16, 0.0);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            std::size_t di = (a ^ b) & 1, dj = (a ^ b) >> 1;
            raw.dist[a * 4 + b] = di && dj ? gamma : di ? alpha : dj ? beta : 0.0;
        }
    raw.weight.assign(4, 0.25);
    return validate_space(std::move(raw));
}

GluedInterval glued_interval(int n, std::size_t n_sphere, std::uint64_t seed) {
    constexpr double pi = std::numbers::pi;
    auto sph = sample_sphere(n, 1.0, n_sphere, SphereMetric::Geodesic, seed).space;
    const std::size_t m = (n_sphere + 3) / 4, total = m + n_sphere;
    std::vector<double> u(m);
    for (std::size_t k = 0; k < m; ++k) u[k] = (static_cast<double>(k) + 0.5) * pi / static_cast<double>(m);
    // geodesic distance from the glue point e_0
    std::vector<double> from_bar(n_sphere);
    for (std::size_t a = 0; a < n_sphere; ++a) from_bar[a] = std::acos(std::clamp(sph.coords()[a][0], -1.0, 1.0));

    RawSpace raw;
    raw.dist.assign(total * total, 0.0);
    raw.weight.resize(total);
    raw.labels.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        bool iu = i < m;
        raw.weight[i] = iu ? 0.5 / static_cast<double>(m) : 0.5 / static_cast<double>(n_sphere);
        raw.labels[i] = iu ? "u" + std::to_string(i) : "y" + std::to_string(i - m);
        for (std::size_t j = i + 1; j < total; ++j) {
            bool ju = j < m;
            double d;
            if (iu && ju) d = std::abs(u[i] - u[j]);
            else if (!iu && !ju) d = sph.d(i - m, j - m);
            else if (iu) d = (pi - u[i]) + from_bar[j - m];
            else d = (pi - u[j]) + from_bar[i - m];
            raw.dist[i * total + j] = raw.dist[j * total + i] = d;
        }
    }
    ValidateOptions vo;
    vo.full_check_limit = 1024;
    GluedInterval ex;
    ex.xn = validate_space(std::move(raw), vo);
    ex.interval_atoms = m;

    std::vector<double> pos = u, w(m, 0.5 / static_cast<double>(m));
    pos.push_back(1.5 * pi);
    w.push_back(0.5);
    ex.limit = line_space(pos, w);
    ex.p.resize(total);
    for (std::size_t i = 0; i < total; ++i) ex.p[i] = i < m ? i : m;
    return ex;
}

CounterexampleBundle build_counterexample_1dim(const Mpf& f, double s, double s_n, int n, std::size_t N,
                                               std::uint64_t seed) {
    if (f.arity() != 1) throw Error(ErrorKind::ArityMismatch, "1-dim construction needs a unary function");
    if (!(s > 0)) throw Error(ErrorKind::BadArgument, "need s > 0");
    if (!(s_n > s)) throw Error(ErrorKind::WitnessInvalid, "witness needs s_n > s");
    CounterexampleBundle b;
    b.f = f;
    b.s = s;
    b.s_n = s_n;
    b.eta = f(s) - f(s_n);
    if (!(b.eta > 1e-12))
        throw Error(ErrorKind::WitnessInvalid, "F(s) - F(s_n) = " + fmt12(b.eta) + " is not positive");
    b.r_n = std::sqrt(s_n * s_n - s * s) / 2;
    b.k_n = capped_dim(b.r_n, n, b.dimension_capped);
    if (N % 2) ++N;
    b.sphere_points = N;

    auto sph = sample_sphere(b.k_n, b.r_n, N, SphereMetric::Chordal, seed, true).space;
    b.x = two_point(s);
    b.x_n = factor_times_sphere(b.x, sph);
    b.transformed = metric_transform(b.x_n, f);
    double dmin = unary_min(f, s, s_n);
    if (!(dmin > 0)) throw Error(ErrorKind::WitnessInvalid, "limit distance is not positive");
    b.y_lim = two_point(dmin);
    b.naive_limit = two_point(f(s));

    b.fiber.resize(2 * N);
    b.antipode.resize(2 * N);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t a = 0; a < N; ++a) {
            b.fiber[i * N + a] = i;
            b.antipode[i * N + a] = (1 - i) * N + (a + N / 2) % N;
        }
    return b;
}

Triplet3 rectangle_minima(const Mpf& f, double s, double t, double s_n, double t_n) {
    double r = std::sqrt(s_n * s_n - s * s) / 2, rho = std::sqrt(t_n * t_n - t * t) / 2;
    Triplet3 m;
    m.alpha = box_min(f, {s, 0}, {s_n, 2 * rho}, 128);
    m.beta = box_min(f, {0, t}, {2 * r, t_n}, 128);
    m.gamma = box_min(f, {s, t}, {s_n, t_n}, 128);
    return m;
}

CounterexampleBundle build_counterexample_2dim(const Mpf& f, double s, double t, double s_n, double t_n, int n,
                                               std::size_t N, std::uint64_t seed) {
    if (f.arity() != 2) throw Error(ErrorKind::ArityMismatch, "2-dim construction needs a binary function");
    if (!(s > 0 && t > 0)) throw Error(ErrorKind::BadArgument, "need s, t > 0");
    if (!(s_n > s && t_n > t)) throw Error(ErrorKind::WitnessInvalid, "witness needs s_n > s and t_n > t");
    CounterexampleBundle b;
    b.f = f;
    b.s = s;
    b.t = t;
    b.s_n = s_n;
    b.t_n = t_n;
    b.eta = f(s, t) - f(s_n, t_n);
    if (!(b.eta > 1e-12))
        throw Error(ErrorKind::WitnessInvalid, "F(s,t) - F(s_n,t_n) = " + fmt12(b.eta) + " is not positive");
    b.r_n = std::sqrt(s_n * s_n - s * s) / 2;
    b.rho_n = std::sqrt(t_n * t_n - t * t) / 2;
    bool c1 = false, c2 = false;
    // odd dimensions 2 max{n, ceil(r^4)} + 1, capped below the limit
    b.k_n = 2 * capped_dim(b.r_n, n, c1) + 1;
    b.l_n = 2 * capped_dim(b.rho_n, n, c2) + 1;
    if (b.k_n > kSphereDimCap) {
        b.k_n = kSphereDimCap - 1;
        c1 = true;
    }
    if (b.l_n > kSphereDimCap) {
        b.l_n = kSphereDimCap - 1;
        c2 = true;
    }
    b.dimension_capped = c1 || c2;
    if (N % 2) ++N;
    b.sphere_points = N;

    b.x = two_point(s);
    b.y = two_point(t);
    b.x_n = factor_times_sphere(b.x, sample_sphere(b.k_n, b.r_n, N, SphereMetric::Chordal, seed, true).space);
    b.y_n = factor_times_sphere(b.y, sample_sphere(b.l_n, b.rho_n, N, SphereMetric::Chordal, seed + 1, true).space);

    auto m = rectangle_minima(f, s, t, s_n, t_n);
    b.alpha = m.alpha;
    b.beta = m.beta;
    b.gamma = m.gamma;
    if (!is_triangle_triplet(b.alpha, b.beta, b.gamma, 1e-9))
        throw Error(ErrorKind::WitnessInvalid, "rectangle minima do not form a triangle triplet");
    b.z = four_point_Z(std::max(b.alpha, 1e-300), std::max(b.beta, 1e-300), std::max(b.gamma, 1e-300));
    b.fiber.resize(2 * N);
    for (std::size_t i = 0; i < 2 * N; ++i) b.fiber[i] = i / N;
    return b;
}

}  // namespace mml
