#include "mml/mpf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mml/io.hpp"

namespace mml {

namespace {

std::shared_ptr<MpfNode> node(MpfKind k, std::size_t arity) {
    auto n = std::make_shared<MpfNode>();
    n->kind = k;
    n->arity = arity;
    return n;
}

Mpf wrap(std::shared_ptr<MpfNode> n) { return Mpf(std::move(n)); }

void require_unary(const Mpf& f, const char* what) {
    if (f.arity() != 1) throw Error(ErrorKind::ArityMismatch, std::string(what) + " must be unary");
}

double eval_node(const MpfNode& n, const double* a);

double eval_unary(const Mpf& f, double s) { return eval_node(f.node(), &s); }

double exp_log(const double* a, std::size_t n) {
    double m = *std::max_element(a, a + n);
    if (m < 30) {
        double acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += std::expm1(a[i]);
        return std::log1p(acc);
    }
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(a[i] - m);
    return m + std::log(acc - static_cast<double>(n - 1) * std::exp(-m));
}

double eval_node(const MpfNode& n, const double* a) {
    const std::size_t N = n.arity;
    switch (n.kind) {
        case MpfKind::Lp: {
            double p = n.params[0];
            if (std::isinf(p)) return *std::max_element(a, a + N);
            if (p == 1) return std::accumulate(a, a + N, 0.0);
            if (p == 2) {
                double acc = 0;
                for (std::size_t i = 0; i < N; ++i) acc += a[i] * a[i];
                return std::sqrt(acc);
            }
            double acc = 0;
            for (std::size_t i = 0; i < N; ++i) acc += std::pow(a[i], p);
            return std::pow(acc, 1.0 / p);
        }
        case MpfKind::ExpLog: return exp_log(a, N);
        case MpfKind::PowerSum: {
            double acc = 0;
            for (std::size_t i = 0; i < N; ++i) acc += std::pow(a[i], n.params[0]);
            return acc;
        }
        case MpfKind::Pq: {
            double acc = 0;
            for (std::size_t i = 0; i < N; ++i) acc += std::pow(a[i], n.params[0]);
            return std::pow(acc, 1.0 / n.params[1]);
        }
        case MpfKind::Cyclic: {
            double best = 0;
            for (std::size_t i = 0; i < N; ++i) best = std::max(best, a[i] + a[(i + 1) % N]);
            return best;
        }
        case MpfKind::NotIsotone: {
            double s = a[0], t = a[1];
            if (s < 1 || t < 1) return std::min(s, 1.0) + std::min(t, 1.0);
            return 2 - std::min({s - 1, t - 1, 1.0});
        }
        case MpfKind::Mulholland: {
            const Mpf& phi = n.children[0];
            double acc = 0;
            for (std::size_t i = 0; i < N; ++i) acc += eval_unary(phi, a[i]);
            return phi.inverse(acc);
        }
        case MpfKind::Piecewise: {
            double s = a[0];
            auto k = static_cast<std::size_t>(std::upper_bound(n.xs.begin(), n.xs.end(), s) - n.xs.begin());
            return eval_unary(n.children[k], s);
        }
        case MpfKind::Sum: {
            double acc = 0;
            for (const auto& c : n.children) acc += eval_node(c.node(), a);
            return acc;
        }
        case MpfKind::Compose: {
            double buf[16];
            std::vector<double> heap;
            double* inner = buf;
            if (N > 16) {
                heap.resize(N);
                inner = heap.data();
            }
            for (std::size_t i = 0; i < N; ++i) inner[i] = eval_unary(n.children[2 + i], a[i]);
            return eval_unary(n.children[0], eval_node(n.children[1].node(), inner));
        }
        case MpfKind::Scale: return n.params[0] * eval_node(n.children[0].node(), a);
        case MpfKind::MinClamp: return std::min(eval_node(n.children[0].node(), a), n.params[0]);
        case MpfKind::Table: {
            double s = a[0];
            if (s <= n.xs.front()) return n.ys.front();
            if (s >= n.xs.back()) return n.ys.back();
            auto k = static_cast<std::size_t>(std::upper_bound(n.xs.begin(), n.xs.end(), s) - n.xs.begin());
            if (n.step) return n.ys[k - 1];
            double x0 = n.xs[k - 1], x1 = n.xs[k];
            return n.ys[k - 1] + (n.ys[k] - n.ys[k - 1]) * (s - x0) / (x1 - x0);
        }
        case MpfKind::Identity: return a[0];
        case MpfKind::Power: return std::pow(a[0], n.params[0]);
        case MpfKind::Affine: return n.params[0] + n.params[1] * a[0];
        case MpfKind::Constant: return n.params[0];
        case MpfKind::Expm1: return std::expm1(a[0]);
        case MpfKind::Sinh: return std::sinh(a[0]);
        case MpfKind::Quadratic: return n.params[0] * a[0] * a[0] + n.params[1] * a[0];
        case MpfKind::H2Tail: {
            double s = a[0];
            double sn = std::sin(s - 1);
            return (1 + s + sn * sn) / (2 * s);
        }
    }
    return 0;
}

}  // namespace

double Mpf::eval_raw(const double* args) const { return eval_node(*node_, args); }

double Mpf::operator()(std::span<const double> args) const {
    if (args.size() != arity())
        throw Error(ErrorKind::ArityMismatch,
                    "expected " + std::to_string(arity()) + " arguments, got " + std::to_string(args.size()));
    for (double v : args)
        if (!(v >= 0)) throw Error(ErrorKind::BadArgument, "arguments must be nonnegative");
    return eval_raw(args.data());
}

double Mpf::operator()(double s) const { return (*this)(std::span<const double>(&s, 1)); }

double Mpf::operator()(double s, double t) const {
    double a[2] = {s, t};
    return (*this)(std::span<const double>(a, 2));
}

double Mpf::inverse(double y) const {
    if (arity() != 1) throw Error(ErrorKind::ArityMismatch, "inverse needs a unary function");
    const MpfNode& n = *node_;
    switch (n.kind) {
        case MpfKind::Identity: return y;
        case MpfKind::Power: return std::pow(y, 1.0 / n.params[0]);
        case MpfKind::Affine:
            if (n.params[1] > 0) return (y - n.params[0]) / n.params[1];
            break;
        case MpfKind::Expm1: return std::log1p(y);
        case MpfKind::Sinh: return std::asinh(y);
        case MpfKind::Quadratic: {
            double qa = n.params[0], qb = n.params[1];
            if (qa == 0 && qb > 0) return y / qb;
            if (qa > 0 && qb >= 0) {
                // Stable root of qa s^2 + qb s - y = 0.
                double disc = std::sqrt(qb * qb + 4 * qa * y);
                return 2 * y / (qb + disc);
            }
            break;
        }
        case MpfKind::Scale:
            if (n.params[0] > 0) return n.children[0].inverse(y / n.params[0]);
            break;
        default: break;
    }
    if (y <= 0) return 0;
    double lo = 0, hi = 1;
    for (int i = 0; i < 2100 && eval_raw(&hi) < y; ++i) {
        lo = hi;
        hi *= 2;
    }
    for (int i = 0; i < 300 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
        double mid = 0.5 * (lo + hi);
        if (eval_raw(&mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace fn {

Mpf lp(double p, std::size_t arity) {
    if (!(p >= 1)) throw Error(ErrorKind::BadArgument, "lp needs p >= 1");
    auto n = node(MpfKind::Lp, arity);
    n->params = {p};
    return wrap(n);
}
Mpf max(std::size_t arity) { return lp(inf, arity); }
Mpf exp_log(std::size_t arity) { return wrap(node(MpfKind::ExpLog, arity)); }
Mpf power_sum(double alpha, std::size_t arity) {
    if (!(alpha > 0 && alpha <= 1)) throw Error(ErrorKind::BadArgument, "power_sum needs alpha in (0,1]");
    auto n = node(MpfKind::PowerSum, arity);
    n->params = {alpha};
    return wrap(n);
}
Mpf pq(double p, double q, std::size_t arity) {
    if (!(p >= 1 && q >= p)) throw Error(ErrorKind::BadArgument, "pq needs 1 <= p <= q");
    auto n = node(MpfKind::Pq, arity);
    n->params = {p, q};
    return wrap(n);
}
Mpf cyclic(std::size_t arity) {
    if (arity < 2) throw Error(ErrorKind::ArityMismatch, "cyclic needs arity >= 2");
    return wrap(node(MpfKind::Cyclic, arity));
}
Mpf not_isotone() { return wrap(node(MpfKind::NotIsotone, 2)); }

Mpf identity() { return wrap(node(MpfKind::Identity, 1)); }
Mpf power(double alpha) {
    auto n = node(MpfKind::Power, 1);
    n->params = {alpha};
    return wrap(n);
}
Mpf affine(double intercept, double slope) {
    auto n = node(MpfKind::Affine, 1);
    n->params = {intercept, slope};
    return wrap(n);
}
Mpf constant(double c) {
    auto n = node(MpfKind::Constant, 1);
    n->params = {c};
    return wrap(n);
}
Mpf expm1() { return wrap(node(MpfKind::Expm1, 1)); }
Mpf sinh() { return wrap(node(MpfKind::Sinh, 1)); }
Mpf quadratic(double a, double b) {
    auto n = node(MpfKind::Quadratic, 1);
    n->params = {a, b};
    return wrap(n);
}
Mpf h2_tail() { return wrap(node(MpfKind::H2Tail, 1)); }

Mpf piecewise(std::vector<double> breaks, std::vector<Mpf> segments) {
    if (segments.size() != breaks.size() + 1)
        throw Error(ErrorKind::BadArgument, "piecewise needs one more segment than breaks");
    for (std::size_t i = 1; i < breaks.size(); ++i)
        if (!(breaks[i] > breaks[i - 1])) throw Error(ErrorKind::BadArgument, "breaks must increase");
    for (const auto& s : segments) require_unary(s, "piecewise segment");
    auto n = node(MpfKind::Piecewise, 1);
    n->xs = std::move(breaks);
    n->children = std::move(segments);
    return wrap(n);
}

Mpf sum(std::vector<Mpf> terms) {
    if (terms.empty()) throw Error(ErrorKind::InconsistentArity, "empty sum");
    for (const auto& t : terms)
        if (t.arity() != terms[0].arity()) throw Error(ErrorKind::InconsistentArity, "sum terms differ in arity");
    auto n = node(MpfKind::Sum, terms[0].arity());
    n->children = std::move(terms);
    return wrap(n);
}

Mpf compose(Mpf outer, Mpf inner, std::vector<Mpf> coords) {
    require_unary(outer, "outer function");
    if (coords.size() != inner.arity())
        throw Error(ErrorKind::InconsistentArity, "need one coordinate function per argument");
    for (const auto& c : coords) require_unary(c, "coordinate function");
    auto n = node(MpfKind::Compose, inner.arity());
    n->children.push_back(std::move(outer));
    n->children.push_back(std::move(inner));
    for (auto& c : coords) n->children.push_back(std::move(c));
    return wrap(n);
}

Mpf scale(double factor, Mpf inner) {
    if (!(factor > 0)) throw Error(ErrorKind::BadArgument, "scale factor must be positive");
    auto n = node(MpfKind::Scale, inner.arity());
    n->params = {factor};
    n->children = {std::move(inner)};
    return wrap(n);
}

Mpf min_clamp(Mpf inner, double cap) {
    if (!(cap > 0)) throw Error(ErrorKind::BadArgument, "clamp must be positive");
    auto n = node(MpfKind::MinClamp, inner.arity());
    n->params = {cap};
    n->children = {std::move(inner)};
    return wrap(n);
}

Mpf table(std::vector<double> x, std::vector<double> y, bool step) {
    if (x.empty() || x.size() != y.size()) throw Error(ErrorKind::BadArgument, "table needs matching x and y");
    if (x.front() != 0) throw Error(ErrorKind::BadArgument, "table must start at 0");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw Error(ErrorKind::BadArgument, "table abscissae must increase");
    auto n = node(MpfKind::Table, 1);
    n->xs = std::move(x);
    n->ys = std::move(y);
    n->step = step;
    return wrap(n);
}

Mpf petrik_phi() {
    return piecewise({1, 2}, {affine(0, 5.0 / 3), affine(-2.0 / 3, 7.0 / 3), power(2)});
}
Mpf petrik() { return make_mulholland(petrik_phi()); }
Mpf h1() { return piecewise({2, 3}, {identity(), affine(4, -1), constant(1)}); }
Mpf h2() { return piecewise({1}, {identity(), h2_tail()}); }

Mpf fn1(int n) {
    double dn = n;
    return piecewise({2, 2 + 1 / dn}, {identity(), affine(4, -1), constant(2 - 1 / dn)});
}
Mpf fn2(int n) {
    double dn = n;
    return piecewise({2, dn + 2, dn + 3, dn + 4},
                     {identity(), constant(2), affine(-dn, 1), affine(dn + 6, -1), constant(2)});
}
Mpf fn3(int n) {
    double dn = n;
    return piecewise({2, dn + 2, dn + 3}, {identity(), constant(2), affine(dn + 4, -1), constant(1)});
}

Mpf separable_sum(std::vector<Mpf> unary) {
    std::size_t k = unary.size();
    return compose(identity(), lp(1, k), std::move(unary));
}

Mpf gn(int family, int n) {
    if (n < 1) throw Error(ErrorKind::BadArgument, "family index must be >= 1");
    Mpf f = family == 1 ? fn1(n) : family == 2 ? fn2(n) : family == 3 ? fn3(n)
                                                  : throw Error(ErrorKind::BadArgument, "family must be 1, 2 or 3");
    return separable_sum({f, f});
}

Mpf g_limit() {
    Mpf c = min_clamp(identity(), 2);
    return separable_sum({c, c});
}

std::vector<Named> gallery() {
    return {
        {"F_1", lp(1)},
        {"F_2", lp(2)},
        {"F_inf", max()},
        {"F_exp", exp_log()},
        {"F_alpha(0.5)", power_sum(0.5)},
        {"F_{2,4}", pq(2, 4)},
        {"Mulholland(sinh)", make_mulholland(sinh())},
        {"Mulholland(s^2+2s)", make_mulholland(quadratic(1, 2))},
        {"Petrik", petrik()},
        {"H_1", h1()},
        {"H_2", h2()},
        {"F_cyc", cyclic(3)},
    };
}

}  // namespace fn

Mpf make_mulholland(Mpf phi, std::size_t arity) {
    require_unary(phi, "phi");
    double z = phi.eval_raw(std::array<double, 1>{0.0}.data());
    if (std::abs(z) > 1e-12) throw Error(ErrorKind::NotIncreasing, "phi(0) != 0");
    const int steps = 4096;
    const double top = 32.0;
    double prev = z;
    for (int k = 1; k <= steps; ++k) {
        double s = top * k / steps;
        double v = phi.eval_raw(&s);
        if (!(v > prev)) {
            std::ostringstream os;
            os << "phi(" << s << ")=" << v << " is not above phi(" << top * (k - 1) / steps << ")=" << prev;
            throw Error(ErrorKind::NotIncreasing, os.str());
        }
        prev = v;
    }
    auto n = std::make_shared<MpfNode>();
    n->kind = MpfKind::Mulholland;
    n->arity = arity;
    n->children = {std::move(phi)};
    return Mpf(std::move(n));
}

Mpf combine(CombineKind kind, const std::vector<Mpf>& parts) {
    switch (kind) {
        case CombineKind::AddF: return fn::sum(parts);
        case CombineKind::Addf:
            for (const auto& p : parts)
                if (p.arity() != 1) throw Error(ErrorKind::InconsistentArity, "add_f parts must be unary");
            return fn::separable_sum(parts);
        case CombineKind::Compose: {
            if (parts.size() < 3) throw Error(ErrorKind::InconsistentArity, "compose needs f, F and coordinate maps");
            std::vector<Mpf> coords(parts.begin() + 2, parts.end());
            return fn::compose(parts[0], parts[1], coords);
        }
    }
    throw Error(ErrorKind::BadArgument, "unknown combinator");
}

namespace {

double num(const std::string& s) {
    if (s == "inf" || s == "infty") return fn::inf;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::BadSpec, "not a number: " + s);
    }
    if (used != s.size()) throw Error(ErrorKind::BadSpec, "not a number: " + s);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

Mpf parse_fn(const std::string& spec) {
    if (!spec.empty() && spec[0] == '@') return mpf_from_json(read_json_file(spec.substr(1)));
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto need = [&] {
        if (arg.empty()) throw Error(ErrorKind::BadSpec, spec + " needs a parameter");
        return arg;
    };
    if (head == "f1") return fn::lp(1);
    if (head == "f2") return fn::lp(2);
    if (head == "finf" || head == "max") return fn::max();
    if (head == "fp" || head == "lp") {
        auto a = split(need(), ',');
        return fn::lp(num(a[0]), a.size() > 1 ? static_cast<std::size_t>(num(a[1])) : 2);
    }
    if (head == "fexp") return fn::exp_log();
    if (head == "falpha") return fn::power_sum(num(need()));
    if (head == "fpq") {
        auto a = split(need(), ',');
        if (a.size() != 2) throw Error(ErrorKind::BadSpec, "fpq:p,q");
        return fn::pq(num(a[0]), num(a[1]));
    }
    if (head == "fcyc") return fn::cyclic(arg.empty() ? 3 : static_cast<std::size_t>(num(arg)));
    if (head == "mul") {
        std::string a = need();
        if (a == "sinh") return make_mulholland(fn::sinh());
        if (a == "quad") return make_mulholland(fn::quadratic(1, 2));
        if (a == "expm1") return make_mulholland(fn::expm1());
        if (a == "petrik") return fn::petrik();
        if (a.rfind("power,", 0) == 0) return make_mulholland(fn::power(num(a.substr(6))));
        throw Error(ErrorKind::BadSpec, "unknown generator " + a);
    }
    if (head == "petrik") return fn::petrik();
    if (head == "h1") return fn::h1();
    if (head == "h2") return fn::h2();
    if (head == "notisotone") return fn::not_isotone();
    if (head == "id" || head == "identity") return fn::identity();
    if (head == "square") return fn::power(2);
    if (head == "power") return fn::power(num(need()));
    if (head == "clamp") return fn::min_clamp(fn::identity(), num(need()));
    if (head == "flim") return fn::min_clamp(fn::identity(), 2);
    if (head == "glim") return fn::g_limit();
    for (int fam = 1; fam <= 3; ++fam) {
        if (head == "fn" + std::to_string(fam) || head == "gn" + std::to_string(fam))
            return family_member(head, static_cast<int>(num(need())));
    }
    throw Error(ErrorKind::BadSpec, "unknown function name " + spec);
}

Mpf family_member(const std::string& family, int n) {
    if (family == "fn1") return fn::fn1(n);
    if (family == "fn2") return fn::fn2(n);
    if (family == "fn3") return fn::fn3(n);
    if (family == "gn1") return fn::gn(1, n);
    if (family == "gn2") return fn::gn(2, n);
    if (family == "gn3") return fn::gn(3, n);
    return parse_fn(family);
}

Mpf family_limit(const std::string& family) {
    if (family == "fn1" || family == "fn2" || family == "fn3") return fn::min_clamp(fn::identity(), 2);
    if (family == "gn1" || family == "gn2" || family == "gn3") return fn::g_limit();
    return parse_fn(family);
}

std::string describe(const Mpf& f) {
    const MpfNode& n = f.node();
    std::ostringstream os;
    auto kids = [&](std::size_t from) {
        for (std::size_t i = from; i < n.children.size(); ++i) os << (i > from ? ", " : "") << describe(n.children[i]);
    };
    switch (n.kind) {
        case MpfKind::Lp: os << "lp(" << n.params[0] << ")"; break;
        case MpfKind::ExpLog: os << "exp_log"; break;
        case MpfKind::PowerSum: os << "power_sum(" << n.params[0] << ")"; break;
        case MpfKind::Pq: os << "pq(" << n.params[0] << "," << n.params[1] << ")"; break;
        case MpfKind::Cyclic: os << "cyc"; break;
        case MpfKind::NotIsotone: os << "notisotone"; break;
        case MpfKind::Mulholland: os << "mulholland(" << describe(n.children[0]) << ")"; break;
        case MpfKind::Piecewise:
            os << "piecewise[";
            for (std::size_t i = 0; i < n.xs.size(); ++i) os << (i ? "," : "") << n.xs[i];
            os << "](";
            kids(0);
            os << ")";
            break;
        case MpfKind::Sum: os << "sum("; kids(0); os << ")"; break;
        case MpfKind::Compose: os << "compose("; kids(0); os << ")"; break;
        case MpfKind::Scale: os << n.params[0] << "*" << describe(n.children[0]); break;
        case MpfKind::MinClamp: os << "min(" << describe(n.children[0]) << "," << n.params[0] << ")"; break;
        case MpfKind::Table: os << "table(" << n.xs.size() << ")"; break;
        case MpfKind::Identity: os << "s"; break;
        case MpfKind::Power: os << "s^" << n.params[0]; break;
        case MpfKind::Affine: os << n.params[0] << "+" << n.params[1] << "s"; break;
        case MpfKind::Constant: os << n.params[0]; break;
        case MpfKind::Expm1: os << "expm1"; break;
        case MpfKind::Sinh: os << "sinh"; break;
        case MpfKind::Quadratic: os << n.params[0] << "s^2+" << n.params[1] << "s"; break;
        case MpfKind::H2Tail: os << "h2_tail"; break;
    }
    return os.str();
}

}  // namespace mml
