#include "mml/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mml {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadSpec, path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << text;
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(1) + "\n"); }

RawSpace raw_space_from_json(const json& j) {
    RawSpace r;
    try {
        if (j.contains("labels"))
            for (const auto& l : j.at("labels")) r.labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
        if (j.contains("coords")) {
            std::string metric = j.value("metric", std::string("euclidean"));
            CoordMetric m;
            if (metric == "euclidean")
                m = CoordMetric::Euclidean;
            else if (metric == "geodesic_sphere")
                m = CoordMetric::GeodesicSphere;
            else
                throw Error(ErrorKind::BadSpec, "unknown metric " + metric);
            auto coords = j.at("coords").get<std::vector<std::vector<double>>>();
            std::vector<double> w;
            if (j.contains("weight")) w = j.at("weight").get<std::vector<double>>();
            auto labels = r.labels;
            r = raw_from_coords(std::move(coords), m, j.value("radius", 1.0), std::move(w), std::move(labels));
            return r;
        }
        auto rows = j.at("dist").get<std::vector<std::vector<double>>>();
        std::size_t n = rows.size();
        for (const auto& row : rows) {
            if (row.size() != n) throw Error(ErrorKind::BadShape, "distance matrix is not square");
            r.dist.insert(r.dist.end(), row.begin(), row.end());
        }
        r.weight = j.at("weight").get<std::vector<double>>();
        if (r.weight.size() != n) throw Error(ErrorKind::BadShape, "weight length differs from matrix size");
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadSpec, e.what());
    }
    return r;
}

FiniteMMSpace space_from_json(const json& j) { return validate_space(raw_space_from_json(j)); }

FiniteMMSpace load_space(const std::string& path) { return space_from_json(read_json_file(path)); }

json space_to_json(const FiniteMMSpace& x) {
    json j;
    j["labels"] = x.labels();
    json rows = json::array();
    for (std::size_t i = 0; i < x.size(); ++i) rows.push_back(std::vector<double>(x.row(i), x.row(i) + x.size()));
    j["dist"] = std::move(rows);
    j["weight"] = x.weights();
    return j;
}

namespace {

const std::pair<MpfKind, const char*> kKindNames[] = {
    {MpfKind::Lp, "lp"},           {MpfKind::ExpLog, "exp_log"},   {MpfKind::PowerSum, "power_sum"},
    {MpfKind::Pq, "pq"},           {MpfKind::Cyclic, "cyc"},       {MpfKind::NotIsotone, "notisotone"},
    {MpfKind::Mulholland, "mulholland"}, {MpfKind::Piecewise, "piecewise"}, {MpfKind::Sum, "sum"},
    {MpfKind::Compose, "compose"}, {MpfKind::Scale, "scale"},      {MpfKind::MinClamp, "min_clamp"},
    {MpfKind::Table, "custom_table"}, {MpfKind::Identity, "identity"}, {MpfKind::Power, "power"},
    {MpfKind::Affine, "affine"},   {MpfKind::Constant, "constant"}, {MpfKind::Expm1, "expm1"},
    {MpfKind::Sinh, "sinh"},       {MpfKind::Quadratic, "quadratic"}, {MpfKind::H2Tail, "h2_tail"},
};

const char* kind_to_string(MpfKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "?";
}

std::vector<Mpf> children_from(const json& arr) {
    std::vector<Mpf> out;
    for (const auto& c : arr) out.push_back(mpf_from_json(c));
    return out;
}

double pnum(const json& j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf") return fn::inf;
        return std::stod(s);
    }
    return j.get<double>();
}

}  // namespace

Mpf mpf_from_json(const json& j) {
    if (j.is_string()) return parse_fn(j.get<std::string>());
    try {
        std::string kind = j.at("kind").get<std::string>();
        std::size_t arity = j.value("arity", std::size_t{2});
        if (kind == "lp") return fn::lp(pnum(j.at("p")), arity);
        if (kind == "max") return fn::max(arity);
        if (kind == "exp_log") return fn::exp_log(arity);
        if (kind == "power_sum") return fn::power_sum(pnum(j.at("alpha")), arity);
        if (kind == "pq") return fn::pq(pnum(j.at("p")), pnum(j.at("q")), arity);
        if (kind == "cyc") return fn::cyclic(j.value("arity", std::size_t{3}));
        if (kind == "notisotone") return fn::not_isotone();
        if (kind == "mulholland") return make_mulholland(mpf_from_json(j.at("phi")), arity);
        if (kind == "piecewise")
            return fn::piecewise(j.at("breaks").get<std::vector<double>>(), children_from(j.at("segments")));
        if (kind == "sum") return fn::sum(children_from(j.at("terms")));
        if (kind == "compose")
            return fn::compose(mpf_from_json(j.at("outer")), mpf_from_json(j.at("inner")),
                               children_from(j.at("coords")));
        if (kind == "scale") return fn::scale(pnum(j.at("factor")), mpf_from_json(j.at("inner")));
        if (kind == "min_clamp") return fn::min_clamp(mpf_from_json(j.at("inner")), pnum(j.at("cap")));
        if (kind == "custom_table")
            return fn::table(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>(),
                             j.value("interp", std::string("linear")) == "step");
        if (kind == "identity") return fn::identity();
        if (kind == "power") return fn::power(pnum(j.at("alpha")));
        if (kind == "affine") return fn::affine(pnum(j.at("intercept")), pnum(j.at("slope")));
        if (kind == "constant") return fn::constant(pnum(j.at("c")));
        if (kind == "expm1") return fn::expm1();
        if (kind == "sinh") return fn::sinh();
        if (kind == "quadratic") return fn::quadratic(pnum(j.at("a")), pnum(j.at("b")));
        if (kind == "h2_tail") return fn::h2_tail();
        throw Error(ErrorKind::BadSpec, "unknown descriptor kind " + kind);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadSpec, e.what());
    }
}

json mpf_to_json(const Mpf& f) {
    const MpfNode& n = f.node();
    json j;
    j["kind"] = kind_to_string(n.kind);
    auto kids = [&](std::size_t from) {
        json a = json::array();
        for (std::size_t i = from; i < n.children.size(); ++i) a.push_back(mpf_to_json(n.children[i]));
        return a;
    };
    auto p = [](double v) -> json { return std::isinf(v) ? json("inf") : json(v); };
    switch (n.kind) {
        case MpfKind::Lp: j["p"] = p(n.params[0]); j["arity"] = n.arity; break;
        case MpfKind::ExpLog: j["arity"] = n.arity; break;
        case MpfKind::PowerSum: j["alpha"] = n.params[0]; j["arity"] = n.arity; break;
        case MpfKind::Pq: j["p"] = n.params[0]; j["q"] = n.params[1]; j["arity"] = n.arity; break;
        case MpfKind::Cyclic: j["arity"] = n.arity; break;
        case MpfKind::Mulholland: j["phi"] = mpf_to_json(n.children[0]); j["arity"] = n.arity; break;
        case MpfKind::Piecewise: j["breaks"] = n.xs; j["segments"] = kids(0); break;
        case MpfKind::Sum: j["terms"] = kids(0); break;
        case MpfKind::Compose:
            j["outer"] = mpf_to_json(n.children[0]);
            j["inner"] = mpf_to_json(n.children[1]);
            j["coords"] = kids(2);
            break;
        case MpfKind::Scale: j["factor"] = n.params[0]; j["inner"] = mpf_to_json(n.children[0]); break;
        case MpfKind::MinClamp: j["cap"] = n.params[0]; j["inner"] = mpf_to_json(n.children[0]); break;
        case MpfKind::Table: j["x"] = n.xs; j["y"] = n.ys; j["interp"] = n.step ? "step" : "linear"; break;
        case MpfKind::Power: j["alpha"] = n.params[0]; break;
        case MpfKind::Affine: j["intercept"] = n.params[0]; j["slope"] = n.params[1]; break;
        case MpfKind::Constant: j["c"] = n.params[0]; break;
        case MpfKind::Quadratic: j["a"] = n.params[0]; j["b"] = n.params[1]; break;
        default: break;
    }
    return j;
}

std::vector<std::size_t> map_from_json(const json& j) {
    const json& arr = j.is_object() ? j.at("map") : j;
    return arr.get<std::vector<std::size_t>>();
}

std::string fmt12(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace mml
