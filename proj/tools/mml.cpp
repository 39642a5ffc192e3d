#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mml/battery.hpp"
#include "mml/distances.hpp"
#include "mml/experiment.hpp"
#include "mml/gallery.hpp"
#include "mml/invariants.hpp"
#include "mml/io.hpp"
#include "mml/mpf.hpp"
#include "mml/mpf_analysis.hpp"
#include "mml/parallel.hpp"
#include "mml/product.hpp"

using namespace mml;

namespace {

struct Globals {
    std::uint64_t seed = 7;
    unsigned threads = 0;
    double tol = 1e-6;
};

// JSON to a file, or stdout when the path is empty or "-".
void emit(const json& j, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << j.dump(2) << '\n';
    else
        write_json_file(out, j);
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error(ErrorKind::BadArgument, "not a number: '" + tok + "'");
        }
    }
    return v;
}

// Either a comma list or a JSON file holding an array (or {"values": [...]}).
std::vector<double> values_arg(const std::string& s) {
    if (std::filesystem::exists(s)) {
        json j = read_json_file(s);
        if (j.is_object() && j.contains("values")) j = j["values"];
        if (j.is_object() && j.contains("weight")) j = j["weight"];
        try {
            return j.get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw Error(ErrorKind::BadShape, s + ": " + e.what());
        }
    }
    return parse_doubles(s);
}

std::vector<std::size_t> map_arg(const std::string& s) { return map_from_json(read_json_file(s)); }

json od_json(const ODEstimate& e) {
    return {{"kappa", e.kappa},
            {"value", e.value},
            {"mode", e.mode == OdMode::ExactTiny ? "exact" : "heuristic"},
            {"witness", e.witness},
            {"family", e.family},
            {"evaluations", e.evaluations}};
}

OdOptions od_options(const std::string& mode, std::size_t budget, std::uint64_t seed) {
    OdOptions o;
    if (mode == "exact") o.mode = OdMode::ExactTiny;
    else if (mode == "heuristic") o.mode = OdMode::HeuristicLb;
    else if (mode == "auto") o.mode = OdMode::Auto;
    else throw Error(ErrorKind::BadArgument, "mode must be exact, heuristic or auto");
    o.budget = budget;
    o.seed = seed;
    return o;
}

std::string plan_csv(const SubtransportPlan& p) {
    std::string out;
    for (std::size_t i = 0; i < p.rows; ++i) {
        for (std::size_t j = 0; j < p.cols; ++j) out += (j ? "," : "") + fmt12(p.at(i, j));
        out += '\n';
    }
    return out;
}

json verdict_json(const SequenceVerdict& v) {
    return {{"conditions", v.cond},
            {"raw_conditions", v.raw},
            {"chain_repaired", v.chain_repaired},
            {"n", v.n_list},
            {"probe", v.probe_used},
            {"sup_defect", v.sup_all},
            {"sup_defect_bounded", v.sup_bounded},
            {"worst_point", v.worst_point},
            {"worst_point_defects", v.worst_point_defects},
            {"limit_sup_defect", v.limit_sup_defect},
            {"uniform_gap", v.uniform_gap},
            {"uniform_convergence", v.uniform_convergence},
            {"pointwise_convergence", v.pointwise_convergence}};
}

json bundle_summary(const CounterexampleBundle& b) {
    return {{"s", b.s},         {"t", b.t},           {"s_n", b.s_n},
            {"t_n", b.t_n},     {"eta", b.eta},       {"r_n", b.r_n},
            {"rho_n", b.rho_n}, {"k_n", b.k_n},       {"l_n", b.l_n},
            {"dimension_capped", b.dimension_capped}, {"sphere_points", b.sphere_points},
            {"alpha", b.alpha}, {"beta", b.beta},     {"gamma", b.gamma},
            {"fn", mpf_to_json(b.f)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mm-lab: finite metric measure spaces, metric preserving functions and distances"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads, 0 = hardware")
        ->capture_default_str()
        ->trigger_on_parse()
        ->each([](const std::string& v) { set_thread_count(static_cast<unsigned>(std::stoul(v))); });
    app.add_option("--tol", g.tol, "tolerance for pass/fail assertions")->capture_default_str();

    int status = 0;

    // ---- space -------------------------------------------------------------
    auto* space = app.add_subcommand("space", "inspect or normalise a space file");
    space->require_subcommand(1);
    std::string sp_in, sp_out;
    auto* sp_info = space->add_subcommand("info", "validate and summarise");
    sp_info->add_option("--space", sp_in, "space JSON")->required();
    sp_info->callback([&] {
        auto x = load_space(sp_in);
        json j = {{"points", x.size()}, {"diameter", x.diameter()}, {"coords", x.has_coords()}, {"labels", x.labels()}};
        emit(j, "");
    });
    auto* sp_norm = space->add_subcommand("normalize", "validate, drop zero weights, write explicit matrix");
    sp_norm->add_option("--space", sp_in, "space JSON")->required();
    sp_norm->add_option("-o,--out", sp_out, "output JSON");
    sp_norm->callback([&] { emit(space_to_json(load_space(sp_in)), sp_out); });

    // ---- mpf ---------------------------------------------------------------
    auto* mpf = app.add_subcommand("mpf", "metric preserving functions");
    mpf->require_subcommand(1);
    std::string fn_name, family = "gn3", at_str;
    std::size_t samples = 100000;
    double horizon = 10, D = 8, h = 1.0 / 64, probe = 0;
    std::string n_str = "1,2,4,8,16", d_str = "4,8", mpf_out;

    auto* m_check = mpf->add_subcommand("check", "sample triangle triplets");
    m_check->add_option("--fn", fn_name, "function name or @file.json")->required();
    m_check->add_option("--samples", samples)->capture_default_str();
    m_check->add_option("--horizon", horizon)->capture_default_str();
    m_check->callback([&] {
        TripletOptions o;
        o.samples = samples;
        o.horizon = horizon;
        o.seed = g.seed;
        auto v = check_triangle_triplets(parse_fn(fn_name), o);
        json j = {{"fn", fn_name}, {"verdict", v.label()}, {"detail", v.detail()}, {"tested", v.tested}, {"zero_set_ok", v.zero_set_ok}};
        if (v.violation) j["witness"] = {{"a", v.a}, {"b", v.b}, {"c", v.c}, {"F", {v.fa, v.fb, v.fc}}};
        if (!v.zero_set_note.empty()) j["zero_set_note"] = v.zero_set_note;
        emit(j, "");
        if (v.violation || !v.zero_set_ok) status = 1;
    });

    auto* m_defect = mpf->add_subcommand("defect", "isotone defect table on [0,D]^N");
    m_defect->add_option("--fn", fn_name)->required();
    m_defect->add_option("--D", D)->capture_default_str();
    m_defect->set_help_flag("--help", "Print this help message and exit");
    m_defect->add_option("--h", h)->capture_default_str();
    m_defect->add_option("--probe", probe, "quadrant probe extent, 0 = D + 8")->capture_default_str();
    m_defect->add_option("--csv", mpf_out, "write the full table as CSV");
    m_defect->callback([&] {
        auto f = parse_fn(fn_name);
        auto r = defect_table(f, D, h, probe > 0 ? probe : D + 8);
        emit({{"fn", fn_name}, {"sup_defect", r.sup_defect}, {"argsup", r.argsup}, {"per_axis", r.per_axis}}, "");
        if (!mpf_out.empty()) {
            std::string csv;
            if (r.arity == 1) {
                csv = "s,defect\n";
                for (std::size_t i = 0; i < r.per_axis; ++i)
                    csv += fmt12(static_cast<double>(i) * r.h) + ',' + fmt12(r.table[i]) + '\n';
            } else if (r.arity == 2) {
                csv = "s,t,defect\n";
                for (std::size_t i = 0; i < r.per_axis; ++i)
                    for (std::size_t k = 0; k < r.per_axis; ++k)
                        csv += fmt12(static_cast<double>(i) * r.h) + ',' + fmt12(static_cast<double>(k) * r.h) + ',' +
                               fmt12(r.table[i * r.per_axis + k]) + '\n';
            } else {
                throw Error(ErrorKind::BadArgument, "CSV export supports arity 1 and 2");
            }
            write_text_file(mpf_out, csv);
        }
    });

    auto* m_class = mpf->add_subcommand("classify", "conditions (1)-(5) along a sequence");
    m_class->add_option("--family", family, "gn1, gn2, gn3, fn1, ...")->capture_default_str();
    m_class->add_option("--n", n_str)->capture_default_str();
    m_class->add_option("--D", d_str)->capture_default_str();
    m_class->set_help_flag("--help", "Print this help message and exit");
    m_class->add_option("--h", h)->capture_default_str();
    m_class->callback([&] {
        ClassifyOptions o;
        o.n_list.clear();
        for (double n : parse_doubles(n_str)) o.n_list.push_back(static_cast<int>(n));
        o.D_list = parse_doubles(d_str);
        o.h = h;
        o.tol = g.tol;
        auto v = classify_sequence([&](int n) { return family_member(family, n); }, family_limit(family), o);
        json j = verdict_json(v);
        j["family"] = family;
        emit(j, "");
    });

    auto* m_eval = mpf->add_subcommand("eval", "evaluate at a point");
    m_eval->add_option("--fn", fn_name)->required();
    m_eval->add_option("--at", at_str, "comma separated arguments")->required();
    m_eval->callback([&] {
        auto f = parse_fn(fn_name);
        auto x = parse_doubles(at_str);
        emit({{"fn", describe(f)}, {"at", x}, {"value", f(std::span<const double>(x))}}, "");
    });

    auto* m_show = mpf->add_subcommand("show", "print the JSON descriptor");
    m_show->add_option("--fn", fn_name)->required();
    m_show->add_option("-o,--out", mpf_out);
    m_show->callback([&] { emit(mpf_to_json(parse_fn(fn_name)), mpf_out); });

    // ---- product / transform -------------------------------------------------
    std::vector<std::string> factor_files;
    std::string pr_fn, pr_out;
    std::size_t pr_cap = 4096;
    auto* prod = app.add_subcommand("product", "F-product of spaces");
    prod->add_option("--space", factor_files, "factor space (repeat)")->required();
    prod->add_option("--fn", pr_fn, "N-ary function")->required();
    prod->add_option("--cap", pr_cap)->capture_default_str();
    prod->add_option("-o,--out", pr_out);
    prod->callback([&] {
        std::vector<FiniteMMSpace> fs;
        for (const auto& f : factor_files) fs.push_back(load_space(f));
        ProductOptions o;
        o.cap = pr_cap;
        o.seed = g.seed;
        emit(space_to_json(product(fs, parse_fn(pr_fn), o)), pr_out);
    });

    std::string tr_in;
    auto* trans = app.add_subcommand("transform", "metric transform F o d");
    trans->add_option("--space", tr_in)->required();
    trans->add_option("--fn", pr_fn, "unary function")->required();
    trans->add_option("-o,--out", pr_out);
    trans->callback([&] { emit(space_to_json(metric_transform(load_space(tr_in), parse_fn(pr_fn))), pr_out); });

    // ---- invariant -----------------------------------------------------------
    auto* inv = app.add_subcommand("invariant", "concentration invariants");
    inv->require_subcommand(1);
    std::string iv_space, iv_mode = "auto";
    double kappa = 0.1, radius = 0.5, alpha = 0.5;
    std::size_t iv_budget = 20000;
    auto add_od_opts = [&](CLI::App* c) {
        c->add_option("--space", iv_space)->required();
        c->add_option("--kappa", kappa)->capture_default_str();
        c->add_option("--mode", iv_mode, "exact|heuristic|auto")->capture_default_str();
        c->add_option("--budget", iv_budget)->capture_default_str();
    };
    auto* i_od = inv->add_subcommand("od", "observable diameter");
    add_od_opts(i_od);
    i_od->callback([&] {
        emit(od_json(observable_diameter(load_space(iv_space), kappa, od_options(iv_mode, iv_budget, g.seed))), "");
    });
    auto* i_lr = inv->add_subcommand("lr", "Levy radius");
    add_od_opts(i_lr);
    i_lr->callback([&] {
        auto r = levy_radius(load_space(iv_space), kappa, od_options(iv_mode, iv_budget, g.seed));
        emit({{"kappa", r.kappa},
              {"value", r.value},
              {"mode", r.mode == OdMode::ExactTiny ? "exact" : "heuristic"},
              {"witness", r.witness}},
             "");
    });
    auto* i_conc = inv->add_subcommand("conc", "concentration function");
    i_conc->add_option("--space", iv_space)->required();
    i_conc->add_option("--r", radius)->capture_default_str();
    i_conc->callback([&] {
        auto c = concentration_function(load_space(iv_space), radius);
        emit({{"r", radius}, {"lower", c.lower}, {"upper", c.upper}, {"exact", c.exact}}, "");
    });
    std::string pd_values;
    auto* i_pd = inv->add_subcommand("pd", "partial diameter of a pushforward");
    i_pd->add_option("--space", iv_space)->required();
    i_pd->add_option("--values", pd_values, "observable values (list or JSON file)")->required();
    i_pd->add_option("--alpha", alpha)->capture_default_str();
    i_pd->callback([&] {
        auto x = load_space(iv_space);
        auto f = values_arg(pd_values);
        if (f.size() != x.size()) throw Error(ErrorKind::BadShape, "one value per point expected");
        emit({{"alpha", alpha}, {"value", pd_of_values(f, x.weights(), alpha)}, {"levy_mean", levy_mean_of(f, x.weights())}},
             "");
    });

    // ---- battery -------------------------------------------------------------
    std::string bat_name, bat_csv;
    std::size_t trials = 50;
    auto* bat = app.add_subcommand("battery", "randomised inequality battery ('all' runs every lemma)");
    bat->add_option("lemma", bat_name)->required();
    bat->add_option("--trials", trials)->capture_default_str();
    bat->add_option("--csv", bat_csv);
    bat->callback([&] {
        std::vector<std::string> names = bat_name == "all" ? battery_names() : std::vector<std::string>{bat_name};
        std::string csv;
        for (const auto& n : names) {
            auto r = run_inequality_battery(n, trials, g.seed, g.tol);
            std::string part = battery_csv(r);
            if (!csv.empty()) part = part.substr(part.find('\n') + 1);
            csv += part;
            std::cout << (r.pass() ? "PASS " : "FAIL ") << n << ": " << r.failures << " failures / " << trials << '\n';
            if (!r.pass()) status = 1;
        }
        if (!bat_csv.empty()) write_text_file(bat_csv, csv);
    });

    // ---- dist ----------------------------------------------------------------
    auto* dist = app.add_subcommand("dist", "distances between measures and spaces");
    dist->require_subcommand(1);
    std::string d_space, d_mu, d_nu, d_plan, d_x, d_y, d_mode = "exact", d_f, d_g;
    double lambda = 1;
    std::size_t d_budget = 20000;
    auto* d_prok = dist->add_subcommand("prok", "lambda-Prokhorov distance with an optimal subtransport plan");
    d_prok->add_option("--space", d_space)->required();
    d_prok->add_option("--mu", d_mu, "weights (list or JSON file)")->required();
    d_prok->add_option("--nu", d_nu, "weights (list or JSON file)")->required();
    d_prok->add_option("--lambda", lambda)->capture_default_str();
    d_prok->add_option("--plan-csv", d_plan);
    d_prok->callback([&] {
        auto x = load_space(d_space);
        auto r = prokhorov(x, values_arg(d_mu), values_arg(d_nu), lambda);
        emit({{"value", r.value}, {"lambda", lambda}, {"radius", r.plan.radius}, {"deficiency", r.plan.deficiency}}, "");
        if (!d_plan.empty()) write_text_file(d_plan, plan_csv(r.plan));
    });
    auto* d_box = dist->add_subcommand("box", "box distance");
    d_box->add_option("--x", d_x)->required();
    d_box->add_option("--y", d_y)->required();
    d_box->add_option("--mode", d_mode, "exact|bound")->capture_default_str();
    d_box->add_option("--budget", d_budget)->capture_default_str();
    d_box->callback([&] {
        BoxMode m;
        if (d_mode == "exact") m = BoxMode::ExactTiny;
        else if (d_mode == "bound") m = BoxMode::Bound;
        else throw Error(ErrorKind::BadArgument, "mode must be exact or bound");
        auto r = box_distance(load_space(d_x), load_space(d_y), m, d_budget, g.seed);
        emit({{"lower", r.lower}, {"upper", r.upper}, {"exact", r.exact}, {"chunks", r.chunks}}, "");
    });
    auto* d_ky = dist->add_subcommand("ky", "Ky Fan distance between two observables");
    d_ky->add_option("--space", d_space)->required();
    d_ky->add_option("--f", d_f)->required();
    d_ky->add_option("--g", d_g)->required();
    d_ky->callback([&] {
        emit({{"value", ky_fan(load_space(d_space), values_arg(d_f), values_arg(d_g))}}, "");
    });
    auto* d_iso = dist->add_subcommand("iso", "search for an eps-mm-isomorphism");
    d_iso->add_option("--x", d_x)->required();
    d_iso->add_option("--y", d_y)->required();
    d_iso->add_option("--budget", d_budget)->capture_default_str();
    d_iso->callback([&] {
        auto r = epsilon_mm_iso_search(load_space(d_x), load_space(d_y), d_budget, g.seed);
        emit({{"eps", r.eps},
              {"map", r.map},
              {"domain", r.domain},
              {"mass_deficit", r.mass_deficit},
              {"discrepancy", r.discrepancy},
              {"prok", r.prok},
              {"exhaustive", r.exhaustive}},
             "");
    });

    // ---- cert ----------------------------------------------------------------
    std::string c_src, c_tgt, c_map, c_out;
    std::size_t c_budget = 48;
    double c_max = 1;
    auto* cert = app.add_subcommand("cert", "concentration certificate for a map");
    cert->add_option("--source", c_src)->required();
    cert->add_option("--target", c_tgt)->required();
    cert->add_option("--map", c_map, "JSON index array or {\"map\": [...]}")->required();
    cert->add_option("--budget", c_budget)->capture_default_str();
    std::size_t c_max_target = 6;
    cert->add_option("--max-target", c_max_target, "largest target accepted; above 6 the Lip_1(Y) fit skips descent")
        ->capture_default_str();
    cert->add_option("--max-eps", c_max, "exit 1 when epsilon exceeds this")->capture_default_str();
    cert->add_option("-o,--out", c_out);
    cert->callback([&] {
        CertificateOptions co;
        co.budget = c_budget;
        co.seed = g.seed;
        co.max_target = c_max_target;
        auto c = concentration_certificate(load_space(c_src), load_space(c_tgt), map_arg(c_map), co);
        emit({{"epsilon", c.epsilon},
              {"epsilon_lip", c.epsilon_lip},
              {"lip_exact", c.lip_exact},
              {"lip_domain", c.lip_domain},
              {"epsilon_prok", c.epsilon_prok},
              {"epsilon_haus", c.epsilon_haus},
              {"haus_family", c.haus_family},
              {"haus_witness", c.haus_witness},
              {"observables", c.observables},
              {"haus_descent", c.haus_descent}},
             c_out);
        if (c.epsilon > c_max) status = 1;
    });

    // ---- gallery -------------------------------------------------------------
    auto* gal = app.add_subcommand("gallery", "builders for example spaces");
    gal->require_subcommand(1);
    int g_n = 32;
    double g_r = 1, g_s = 2, g_sn = 3, g_t = 2, g_tn = 3, g_a = 1, g_b = 1, g_c = 1, g_w0 = 0.5;
    std::size_t g_N = 2000;
    std::string g_metric = "chordal", g_out, g_fn = "h1";
    bool g_anti = false;
    auto* g_sphere = gal->add_subcommand("sphere", "uniform sample of S^n(r)");
    g_sphere->add_option("--n", g_n)->capture_default_str();
    g_sphere->add_option("--r", g_r)->capture_default_str();
    g_sphere->add_option("--N", g_N)->capture_default_str();
    g_sphere->add_option("--metric", g_metric, "chordal|geodesic")->capture_default_str();
    g_sphere->add_flag("--antipodal", g_anti);
    g_sphere->add_option("-o,--out", g_out);
    g_sphere->callback([&] {
        SphereMetric m;
        if (g_metric == "chordal") m = SphereMetric::Chordal;
        else if (g_metric == "geodesic") m = SphereMetric::Geodesic;
        else throw Error(ErrorKind::BadArgument, "metric must be chordal or geodesic");
        emit(space_to_json(sample_sphere(g_n, g_r, g_N, m, g.seed, g_anti).space), g_out);
    });
    auto* g_two = gal->add_subcommand("two-point", "two points at distance s");
    g_two->add_option("--s", g_s)->capture_default_str();
    g_two->add_option("--w0", g_w0)->capture_default_str();
    g_two->add_option("-o,--out", g_out);
    g_two->callback([&] { emit(space_to_json(two_point(g_s, g_w0)), g_out); });
    auto* g_z = gal->add_subcommand("four-point", "the four-point space Z(alpha, beta, gamma)");
    g_z->add_option("--alpha", g_a)->capture_default_str();
    g_z->add_option("--beta", g_b)->capture_default_str();
    g_z->add_option("--gamma", g_c)->capture_default_str();
    g_z->add_option("-o,--out", g_out);
    g_z->callback([&] { emit(space_to_json(four_point_Z(g_a, g_b, g_c)), g_out); });
    auto* g_ex = gal->add_subcommand("glued-interval", "interval glued to a sphere, with its limit and map");
    g_ex->add_option("--n", g_n)->capture_default_str();
    g_ex->add_option("--N", g_N)->capture_default_str();
    g_ex->add_option("-o,--out", g_out, "output directory")->required();
    g_ex->callback([&] {
        auto e = glued_interval(g_n, g_N, g.seed);
        std::filesystem::create_directories(g_out);
        write_json_file(g_out + "/xn.json", space_to_json(e.xn));
        write_json_file(g_out + "/limit.json", space_to_json(e.limit));
        write_json_file(g_out + "/map.json", json{{"map", e.p}});
    });
    auto* g_c1 = gal->add_subcommand("counterexample1", "1-dim counterexample bundle");
    g_c1->add_option("--fn", g_fn, "unary F_n")->capture_default_str();
    g_c1->add_option("--s", g_s)->capture_default_str();
    g_c1->add_option("--sn", g_sn)->capture_default_str();
    g_c1->add_option("--n", g_n)->capture_default_str();
    g_c1->add_option("--N", g_N)->capture_default_str();
    g_c1->add_option("-o,--out", g_out, "output directory")->required();
    g_c1->callback([&] {
        auto b = build_counterexample_1dim(parse_fn(g_fn), g_s, g_sn, g_n, g_N, g.seed);
        std::filesystem::create_directories(g_out);
        write_json_file(g_out + "/bundle.json", bundle_summary(b));
        write_json_file(g_out + "/xn.json", space_to_json(b.x_n));
        write_json_file(g_out + "/transformed.json", space_to_json(b.transformed));
        write_json_file(g_out + "/y_lim.json", space_to_json(b.y_lim));
        write_json_file(g_out + "/naive_limit.json", space_to_json(b.naive_limit));
        write_json_file(g_out + "/map.json", json{{"map", b.fiber}});
        write_json_file(g_out + "/antipode.json", json{{"map", b.antipode}});
    });
    auto* g_c2 = gal->add_subcommand("counterexample2", "2-dim counterexample bundle");
    g_c2->add_option("--fn", g_fn, "binary F_n")->required();
    g_c2->add_option("--s", g_s)->capture_default_str();
    g_c2->add_option("--t", g_t)->capture_default_str();
    g_c2->add_option("--sn", g_sn)->capture_default_str();
    g_c2->add_option("--tn", g_tn)->capture_default_str();
    g_c2->add_option("--n", g_n)->capture_default_str();
    g_c2->add_option("--N", g_N)->capture_default_str();
    g_c2->add_option("-o,--out", g_out, "output directory")->required();
    g_c2->callback([&] {
        auto b = build_counterexample_2dim(parse_fn(g_fn), g_s, g_t, g_sn, g_tn, g_n, g_N, g.seed);
        std::filesystem::create_directories(g_out);
        write_json_file(g_out + "/bundle.json", bundle_summary(b));
        write_json_file(g_out + "/xn.json", space_to_json(b.x_n));
        write_json_file(g_out + "/yn.json", space_to_json(b.y_n));
        write_json_file(g_out + "/z.json", space_to_json(b.z));
    });

    // ---- experiment ----------------------------------------------------------
    std::string ex_suite, ex_spec, ex_out, ex_save, ex_n, ex_seeds;
    std::size_t ex_size = 0;
    bool ex_nosvg = false;
    auto* exp = app.add_subcommand("experiment", "run an experiment suite");
    exp->add_option("suite", ex_suite, "suite name, or omit with --spec");
    exp->add_option("--spec", ex_spec, "ExperimentSpec JSON");
    exp->add_option("--n", ex_n, "n list");
    exp->add_option("--seeds", ex_seeds, "seed list (default: --seed)");
    exp->add_option("--size", ex_size, "sample size or trial count, 0 = suite default");
    exp->add_option("--out", ex_out, "output directory");
    exp->add_option("--save-spec", ex_save, "write the effective spec as JSON");
    exp->add_flag("--no-svg", ex_nosvg);
    exp->callback([&] {
        ExperimentSpec s;
        if (!ex_spec.empty()) s = spec_from_json(read_json_file(ex_spec));
        if (!ex_suite.empty()) s.suite = ex_suite;
        if (s.suite.empty()) throw Error(ErrorKind::BadSpec, "no suite given");
        if (!ex_n.empty()) {
            s.n_list.clear();
            for (double v : parse_doubles(ex_n)) s.n_list.push_back(static_cast<int>(v));
        }
        if (!ex_seeds.empty()) {
            s.seeds.clear();
            for (double v : parse_doubles(ex_seeds)) s.seeds.push_back(static_cast<std::uint64_t>(v));
        } else if (ex_spec.empty()) {
            s.seeds = {g.seed};
        }
        if (ex_size) s.size = ex_size;
        if (!ex_out.empty()) s.out_dir = ex_out;
        if (ex_nosvg) s.svg = false;
        if (!ex_save.empty()) write_json_file(ex_save, spec_to_json(s));
        auto r = run_suite(s);
        std::cout << r.summary();
        if (s.out_dir.empty()) std::cout << r.csv;
        if (!r.pass()) status = 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return status;
}
