#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mml/error.hpp"

namespace mml {

enum class MpfKind {
    // N-ary closed forms
    Lp,         // (sum s_i^p)^(1/p), p = inf gives max
    ExpLog,     // log(sum e^{s_i} - (N-1))
    PowerSum,   // sum s_i^alpha
    Pq,         // (sum s_i^p)^(1/q)
    Cyclic,     // max_i (s_i + s_{i+1 mod N})
    NotIsotone, // binary example that is metric preserving but not isotone
    // combinators
    Mulholland, // phi^{-1}(sum phi(s_i)), child 0 = phi
    Piecewise,  // unary, children = segments on [b_{k-1}, b_k)
    Sum,        // sum of same-arity children
    Compose,    // child0(child1(child2(s_1), ..., child_{N+1}(s_N)))
    Scale,      // c * child0
    MinClamp,   // min(child0, c)
    Table,      // unary tabulated function
    // unary primitives
    Identity,
    Power,      // s^alpha
    Affine,     // a + b s
    Constant,
    Expm1,
    Sinh,
    Quadratic,  // a s^2 + b s
    H2Tail,     // (1 + s + sin^2(s-1)) / (2s)
};

class Mpf;

struct MpfNode {
    MpfKind kind = MpfKind::Identity;
    std::size_t arity = 1;
    std::vector<double> params;
    std::vector<double> xs;  // piecewise breaks / table abscissae
    std::vector<double> ys;  // table ordinates
    bool step = false;       // table: piecewise constant instead of linear
    std::vector<Mpf> children;
};

// Immutable expression tree for an N-ary function on [0,inf)^N.
class Mpf {
public:
    Mpf() = default;
    explicit Mpf(std::shared_ptr<const MpfNode> n) : node_(std::move(n)) {}

    std::size_t arity() const { return node_->arity; }
    const MpfNode& node() const { return *node_; }
    bool valid() const { return static_cast<bool>(node_); }

    // Checked evaluation.
    double operator()(std::span<const double> args) const;
    double operator()(double s) const;
    double operator()(double s, double t) const;

    // Unchecked, for hot loops.
    double eval_raw(const double* args) const;

    // Inverse of a unary increasing function, closed form when known.
    double inverse(double y) const;

private:
    std::shared_ptr<const MpfNode> node_;
};

namespace fn {

inline constexpr double inf = std::numeric_limits<double>::infinity();

Mpf lp(double p, std::size_t arity = 2);
Mpf max(std::size_t arity = 2);
Mpf exp_log(std::size_t arity = 2);
Mpf power_sum(double alpha, std::size_t arity = 2);
Mpf pq(double p, double q, std::size_t arity = 2);
Mpf cyclic(std::size_t arity = 3);
Mpf not_isotone();

Mpf identity();
Mpf power(double alpha);
Mpf affine(double intercept, double slope);
Mpf constant(double c);
Mpf expm1();
Mpf sinh();
Mpf quadratic(double a, double b);
Mpf h2_tail();

Mpf piecewise(std::vector<double> breaks, std::vector<Mpf> segments);
Mpf sum(std::vector<Mpf> terms);
Mpf compose(Mpf outer, Mpf inner, std::vector<Mpf> coords);
Mpf scale(double factor, Mpf inner);
Mpf min_clamp(Mpf inner, double cap);
Mpf table(std::vector<double> x, std::vector<double> y, bool step = false);

// Gallery.
Mpf petrik_phi();
Mpf petrik();
Mpf h1();
Mpf h2();
Mpf fn1(int n);
Mpf fn2(int n);
Mpf fn3(int n);
Mpf gn(int family, int n);        // G_n^i = F_n^i(s) + F_n^i(t)
Mpf g_limit();                    // min(s,2) + min(t,2)
Mpf separable_sum(std::vector<Mpf> unary);

struct Named {
    std::string name;
    Mpf f;
};
// The twelve gallery functions used for triplet screening.
std::vector<Named> gallery();

}  // namespace fn

// phi must be unary, phi(0)=0 and strictly increasing on a sample grid.
Mpf make_mulholland(Mpf phi, std::size_t arity = 2);

enum class CombineKind { AddF, Addf, Compose };
// AddF: sum of same-arity parts. Addf: parts are unary, summed per coordinate.
// Compose: parts = {f, F, f_1, ..., f_N}.
Mpf combine(CombineKind kind, const std::vector<Mpf>& parts);

// Short names used on the command line, e.g. "fp:2", "gn3:5", "h1", "mul:sinh".
Mpf parse_fn(const std::string& name);
// Indexed family by name: "gn1", "gn2", "gn3", "fn1", ..., or any fixed name.
Mpf family_member(const std::string& family, int n);
Mpf family_limit(const std::string& family);

std::string describe(const Mpf& f);

}  // namespace mml
