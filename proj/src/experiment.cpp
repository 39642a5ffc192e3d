#include "mml/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "mml/battery.hpp"
#include "mml/distances.hpp"
#include "mml/gallery.hpp"
#include "mml/invariants.hpp"
#include "mml/io.hpp"
#include "mml/mpf.hpp"
#include "mml/mpf_analysis.hpp"
#include "mml/parallel.hpp"

namespace mml {

namespace {

SuiteCheck check(std::string name, bool pass, std::string detail) { return {std::move(name), pass, std::move(detail)}; }

// ---- sphere_od_decay -------------------------------------------------------

SuiteResult sphere_od_decay(const ExperimentSpec& spec) {
    std::vector<int> ns = spec.n_list.empty() ? std::vector<int>{2, 4, 8, 16, 32} : spec.n_list;
    const std::size_t N = spec.size ? spec.size : 2000;
    const double kappa = 0.1;
    const std::size_t ns_n = ns.size(), seeds_n = spec.seeds.size();
    std::vector<double> od(ns_n * seeds_n);
    std::vector<std::string> fam(od.size());
    for (std::size_t k = 0; k < od.size(); ++k) {
        int n = ns[k / seeds_n];
        std::uint64_t seed = spec.seeds[k % seeds_n];
        auto x = sample_sphere(n, 1.0, N, SphereMetric::Chordal, seed).space;
        OdOptions o;
        o.mode = OdMode::HeuristicLb;
        o.seed = seed;
        o.local_share = 0;  // structured observables only, see README
        auto e = observable_diameter(x, kappa, o);
        od[k] = e.value;
        fam[k] = e.family;
    }
    SuiteResult r;
    std::ostringstream csv;
    csv << "n,seed,N,kappa,od_lb,family\n";
    std::vector<double> xs, mean(ns_n, 0.0);
    for (std::size_t i = 0; i < ns_n; ++i) {
        xs.push_back(ns[i]);
        for (std::size_t s = 0; s < seeds_n; ++s) {
            std::size_t k = i * seeds_n + s;
            csv << ns[i] << ',' << spec.seeds[s] << ',' << N << ',' << fmt12(kappa) << ',' << fmt12(od[k]) << ','
                << fam[k] << '\n';
            mean[i] += od[k] / static_cast<double>(seeds_n);
        }
    }
    double slope = loglog_slope(xs, mean);
    csv << "# slope," << fmt12(slope) << '\n';
    r.csv = csv.str();
    r.checks.push_back(check("loglog slope in [-0.75,-0.30]", slope >= -0.75 && slope <= -0.30, "slope=" + fmt12(slope)));
    auto at = [&](int n, std::size_t s) {
        auto it = std::find(ns.begin(), ns.end(), n);
        return it == ns.end() ? -1.0 : od[static_cast<std::size_t>(it - ns.begin()) * seeds_n + s];
    };
    if (at(2, 0) >= 0 && at(8, 0) >= 0 && at(32, 0) >= 0) {
        bool mono = true;
        for (std::size_t s = 0; s < seeds_n; ++s) mono = mono && at(32, s) < at(8, s) && at(8, s) < at(2, s);
        r.checks.push_back(check("OD(32) < OD(8) < OD(2) for every seed", mono, ""));
    }
    r.svg = svg_polyline("observable diameter of S^n(1), kappa=0.1", "n", "OD lower bound", xs, {mean},
                         {"mean over seeds"}, true, true);
    return r;
}

// ---- cex_1dim_collapse -----------------------------------------------------

SuiteResult cex_1dim_collapse(const ExperimentSpec& spec) {
    const int n = spec.n_list.empty() ? 50 : spec.n_list.front();
    const std::size_t N = spec.size ? spec.size : 1500;
    const std::uint64_t seed = spec.seeds.empty() ? 7 : spec.seeds.front();
    auto b = build_counterexample_1dim(fn::h1(), 2.0, 3.0, n, N, seed);
    const std::size_t M = b.sphere_points;

    double anti_err = 0, cross_lo = fn::inf, cross_hi = 0;
    std::vector<double> hd;
    hd.reserve(M * M);
    for (std::size_t i = 0; i < M; ++i) {
        anti_err = std::max(anti_err, std::abs(b.x_n.d(i, b.antipode[i]) - 3.0));
        anti_err = std::max(anti_err, std::abs(b.x_n.d(M + i, b.antipode[M + i]) - 3.0));
        for (std::size_t j = M; j < 2 * M; ++j) {
            cross_lo = std::min(cross_lo, b.x_n.d(i, j));
            cross_hi = std::max(cross_hi, b.x_n.d(i, j));
            hd.push_back(b.transformed.d(i, j));
        }
    }
    std::sort(hd.begin(), hd.end());
    double h_min = hd.front();
    double p5 = hd[hd.size() / 20];
    double dy = b.y_lim.d(0, 1);

    auto cert = concentration_certificate(b.transformed, b.y_lim, b.fiber, 48, seed);
    std::vector<double> grid;
    for (int k = 0; k < 100; ++k) grid.push_back(0.005 * k);  // eps < 0.5
    double worst_mass_gap = -1;
    double first_ok = -1;
    for (double e : grid) {
        auto d = lip_domain_at(b.transformed, b.naive_limit, b.fiber, e);
        double gap = d.mass - (1 - e);
        worst_mass_gap = std::max(worst_mass_gap, gap);
        if (gap >= -1e-12 && first_ok < 0) first_ok = e;
    }
    auto at_half = lip_domain_at(b.transformed, b.naive_limit, b.fiber, 0.5);

    SuiteResult r;
    std::ostringstream csv;
    csv << "quantity,value\n"
        << "k_n," << b.k_n << "\nr_n," << fmt12(b.r_n) << "\nsphere_points," << M << "\neta," << fmt12(b.eta)
        << "\nd_Y_lim," << fmt12(dy) << "\nd_naive," << fmt12(b.naive_limit.d(0, 1))
        << "\nantipodal_max_error," << fmt12(anti_err) << "\ncross_min," << fmt12(cross_lo) << "\ncross_max,"
        << fmt12(cross_hi) << "\nH_cross_min," << fmt12(h_min) << "\nH_cross_p5," << fmt12(p5)
        << "\nH_cross_median," << fmt12(hd[hd.size() / 2]) << "\ncert_eps," << fmt12(cert.epsilon) << "\ncert_prok,"
        << fmt12(cert.epsilon_prok) << "\ncert_lip," << fmt12(cert.epsilon_lip) << "\ncert_haus,"
        << fmt12(cert.epsilon_haus) << "\nnaive_best_mass_gap_below_half," << fmt12(worst_mass_gap)
        << "\nnaive_mass_at_half_greedy," << fmt12(at_half.mass) << '\n';
    r.csv = csv.str();
    r.checks.push_back(check("(a) antipodal distance = 3", anti_err <= 1e-9, "max error " + fmt12(anti_err)));
    r.checks.push_back(check("(b) cross-fibre distances in [2,3]", cross_lo >= 2 - 1e-9 && cross_hi <= 3 + 1e-9,
                             "[" + fmt12(cross_lo) + ", " + fmt12(cross_hi) + "]"));
    r.checks.push_back(check("(c) H_1 cross distances >= d_Y", h_min >= dy - 1e-9, "min " + fmt12(h_min)));
    r.checks.push_back(check("(c) 5th percentile of H_1 cross distances <= 1.25", p5 <= 1.25, "p5 " + fmt12(p5)));
    r.checks.push_back(check("(d) certificate against Y_lim has eps <= 0.3", cert.epsilon <= 0.3,
                             "eps " + fmt12(cert.epsilon) + " (haus " + fmt12(cert.epsilon_haus) + ")"));
    r.checks.push_back(check("(d) 1-Lipschitz-up-to-eps against (X, H_1 o d) fails for every grid eps < 0.5",
                             first_ok < 0, "largest mass - (1-eps) " + fmt12(worst_mass_gap)));

    std::vector<double> qx, qy;
    for (int q = 0; q <= 100; ++q) {
        qx.push_back(q / 100.0);
        qy.push_back(hd[std::min(hd.size() - 1, hd.size() * static_cast<std::size_t>(q) / 100)]);
    }
    r.svg = svg_polyline("quantiles of H_1 cross-fibre distances", "quantile", "H_1(d)", qx, {qy}, {"H_1 o d"});
    return r;
}

// ---- lemma_batteries -------------------------------------------------------

SuiteResult lemma_batteries(const ExperimentSpec& spec) {
    const std::size_t trials = spec.size ? spec.size : 50;
    const std::uint64_t seed = spec.seeds.empty() ? 7 : spec.seeds.front();
    SuiteResult r;
    std::ostringstream csv;
    bool header = false;
    for (const auto& name : battery_names()) {
        auto rep = run_inequality_battery(name, trials, seed);
        std::string part = battery_csv(rep);
        if (header) part = part.substr(part.find('\n') + 1);
        header = true;
        csv << part;
        r.checks.push_back(check(name, rep.pass(), std::to_string(rep.failures) + " failures / " + std::to_string(trials)));
    }
    r.csv = csv.str();
    return r;
}

// ---- box_convergence -------------------------------------------------------

SuiteResult box_convergence(const ExperimentSpec& spec) {
    const std::size_t trials = spec.size ? spec.size : 50;
    const std::uint64_t seed = spec.seeds.empty() ? 7 : spec.seeds.front();
    struct Row {
        double a, b, lhs2, lhsexp, rhsexp;
    };
    std::vector<Row> rows(trials);
    parallel_for(trials, [&](std::size_t k) {
        auto rng = substream(seed, 0xb0c5 + k);
        auto x = random_tiny_space(rng, 2, 2), y = random_tiny_space(rng, 2, 2);
        auto z = random_tiny_space(rng, 2, 2), w = random_tiny_space(rng, 2, 2);
        auto c2 = box_product_check(x, y, z, w, fn::lp(2));
        auto ce = box_product_check(x, y, z, w, fn::exp_log());
        rows[k] = {box_distance(x, y).upper, box_distance(z, w).upper, c2.lhs, ce.lhs, ce.rhs};
    });
    SuiteResult r;
    std::ostringstream csv;
    csv << "trial,box_XY,box_ZW,box_l2_product,sum,box_exp_product,max_form\n";
    std::size_t fail2 = 0, failexp = 0;
    double worst = -fn::inf;
    for (std::size_t k = 0; k < trials; ++k) {
        const auto& q = rows[k];
        csv << k << ',' << fmt12(q.a) << ',' << fmt12(q.b) << ',' << fmt12(q.lhs2) << ',' << fmt12(q.a + q.b) << ','
            << fmt12(q.lhsexp) << ',' << fmt12(q.rhsexp) << '\n';
        if (q.lhs2 > q.a + q.b + 1e-9) ++fail2;
        if (q.lhsexp > q.rhsexp + 1e-9) ++failexp;
        worst = std::max(worst, q.lhs2 - q.a - q.b);
    }
    r.csv = csv.str();
    r.checks.push_back(check("box(X x_2 Z, Y x_2 W) <= box(X,Y) + box(Z,W)", fail2 == 0,
                             std::to_string(fail2) + " failures, worst margin " + fmt12(worst)));
    r.checks.push_back(check("F_exp product against the max form", failexp == 0, std::to_string(failexp) + " failures"));
    return r;
}

// ---- classifier_demo -------------------------------------------------------

SuiteResult classifier_demo(const ExperimentSpec& spec) {
    ClassifyOptions opt;
    if (!spec.n_list.empty()) opt.n_list = spec.n_list;
    SuiteResult r;
    std::ostringstream csv;
    csv << "family,n,sup_defect,sup_defect_D4,sup_defect_D8,I_n(2;0),worst_point_defect\n";
    std::array<SequenceVerdict, 3> v;
    std::vector<std::vector<double>> i20(3);
    for (int fam = 1; fam <= 3; ++fam) {
        v[fam - 1] = classify_sequence([fam](int n) { return fn::gn(fam, n); }, fn::g_limit(), opt);
        const auto& s = v[fam - 1];
        for (std::size_t k = 0; k < s.n_list.size(); ++k) {
            int n = s.n_list[k];
            auto tab = defect_table(fn::gn(fam, n), 4, opt.h, s.probe_used[k]);
            double d20 = tab.at({2.0, 0.0});
            i20[fam - 1].push_back(d20);
            csv << "G^" << fam << ',' << n << ',' << fmt12(s.sup_all[k]) << ',' << fmt12(s.sup_bounded[0][k]) << ','
                << fmt12(s.sup_bounded.size() > 1 ? s.sup_bounded[1][k] : 0) << ',' << fmt12(d20) << ','
                << fmt12(s.worst_point_defects.empty() ? 0 : s.worst_point_defects[k]) << '\n';
        }
        csv << "# G^" << fam << " conditions";
        for (int c = 0; c < 5; ++c) csv << ',' << (s.cond[c] ? 1 : 0);
        csv << '\n';
    }
    r.csv = csv.str();
    auto& g1 = v[0];
    auto& g2 = v[1];
    auto& g3 = v[2];
    r.checks.push_back(check("G^1 satisfies (2) but not (1)", g1.cond[1] && !g1.cond[0], ""));
    bool bump = std::all_of(g2.sup_all.begin(), g2.sup_all.end(), [](double d) { return d >= 1 - 1e-6; });
    r.checks.push_back(check("G^2 satisfies (3) but not (2), sup defect >= 1", g2.cond[2] && !g2.cond[1] && bump, ""));
    bool one = std::all_of(i20[2].begin(), i20[2].end(), [](double d) { return std::abs(d - 1) <= 1e-6; });
    r.checks.push_back(check("G^3 satisfies (5) but not (4), I_n(2,0) = 1", g3.cond[4] && !g3.cond[3] && one, ""));
    std::vector<double> xs(g1.n_list.begin(), g1.n_list.end());
    r.svg = svg_polyline("sup isotone defect", "n", "sup defect", xs, {g1.sup_all, g2.sup_all, g3.sup_all},
                         {"G^1", "G^2", "G^3"}, true, false);
    return r;
}

}  // namespace

bool SuiteResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

std::string SuiteResult::summary() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.pass ? "PASS " : "FAIL ") << suite << ": " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")")
           << '\n';
    return os.str();
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"sphere_od_decay", "cex_1dim_collapse", "lemma_batteries",
                                                   "box_convergence", "classifier_demo"};
    return names;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
    return {{"suite", s.suite}, {"seeds", s.seeds}, {"n_list", s.n_list}, {"size", s.size}, {"out_dir", s.out_dir},
            {"svg", s.svg}};
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
    ExperimentSpec s;
    try {
        s.suite = j.at("suite").get<std::string>();
        if (j.contains("seeds")) s.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("n_list")) s.n_list = j["n_list"].get<std::vector<int>>();
        if (j.contains("size")) s.size = j["size"].get<std::size_t>();
        if (j.contains("out_dir")) s.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("svg")) s.svg = j["svg"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::BadSpec, e.what());
    }
    return s;
}

SuiteResult run_suite(const ExperimentSpec& spec) {
    if (std::find(suite_names().begin(), suite_names().end(), spec.suite) == suite_names().end())
        throw Error(ErrorKind::BadSpec, "unknown suite '" + spec.suite + "'");
    if (spec.seeds.empty()) throw Error(ErrorKind::BadSpec, "at least one seed is required");
    for (int n : spec.n_list)
        if (n < 1) throw Error(ErrorKind::BadSpec, "n_list entries must be positive");
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    if (spec.suite == "sphere_od_decay") r = sphere_od_decay(spec);
    else if (spec.suite == "cex_1dim_collapse") r = cex_1dim_collapse(spec);
    else if (spec.suite == "lemma_batteries") r = lemma_batteries(spec);
    else if (spec.suite == "box_convergence") r = box_convergence(spec);
    else r = classifier_demo(spec);
    r.suite = spec.suite;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!spec.out_dir.empty()) {
        std::filesystem::create_directories(spec.out_dir);
        write_text_file(spec.out_dir + "/" + spec.suite + ".csv", r.csv);
        if (spec.svg && !r.svg.empty()) write_text_file(spec.out_dir + "/" + spec.suite + ".svg", r.svg);
        write_text_file(spec.out_dir + "/" + spec.suite + ".summary.txt", r.summary());
    }
    return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

std::string svg_polyline(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                         const std::vector<double>& x, const std::vector<std::vector<double>>& series,
                         const std::vector<std::string>& names, bool logx, bool logy) {
    const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    auto tx = [&](double v) { return logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy ? std::log10(std::max(v, 1e-300)) : v; };
    double x0 = fn::inf, x1 = -fn::inf, y0 = fn::inf, y1 = -fn::inf;
    for (double v : x) {
        x0 = std::min(x0, tx(v));
        x1 = std::max(x1, tx(v));
    }
    for (const auto& s : series)
        for (double v : s) {
            y0 = std::min(y0, ty(v));
            y1 = std::max(y1, ty(v));
        }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n"
       << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel
       << (logx ? " (log)" : "") << "</text>\n"
       << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
       << ")\" text-anchor=\"middle\" font-size=\"13\">" << ylabel << (logy ? " (log)" : "") << "</text>\n";
    for (double v : x)
        os << "<text x=\"" << px(v) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
           << fmt12(v) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        double yv = y0 + (y1 - y0) * k / 4.0;
        double shown = logy ? std::pow(10.0, yv) : yv;
        double yy = H - B - (yv - y0) / (y1 - y0) * (H - T - B);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", shown);
        os << "<text x=\"" << L - 6 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << buf
           << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[s % 5] << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < std::min(x.size(), series[s].size()); ++i)
            os << px(x[i]) << ',' << py(series[s][i]) << ' ';
        os << "\"/>\n";
        if (s < names.size())
            os << "<text x=\"" << W - R - 120 << "\" y=\"" << T + 16 * (s + 1) << "\" fill=\"" << colors[s % 5]
               << "\" font-size=\"12\">" << names[s] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace mml
