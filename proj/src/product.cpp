#include "mml/product.hpp"

#include <cmath>
#include <sstream>

#include "mml/invariants.hpp"
#include "mml/mpf_analysis.hpp"

namespace mml {

std::size_t product_index(const std::vector<FiniteMMSpace>& factors, const std::vector<std::size_t>& idx) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < factors.size(); ++k) flat = flat * factors[k].size() + idx[k];
    return flat;
}

std::vector<std::size_t> product_coords(const std::vector<FiniteMMSpace>& factors, std::size_t flat) {
    std::vector<std::size_t> idx(factors.size());
    for (std::size_t k = factors.size(); k-- > 0;) {
        idx[k] = flat % factors[k].size();
        flat /= factors[k].size();
    }
    return idx;
}

ProductView::ProductView(std::vector<FiniteMMSpace> factors, Mpf f) : factors_(std::move(factors)), f_(std::move(f)) {
    if (f_.arity() != factors_.size()) throw Error(ErrorKind::ArityMismatch, "F arity differs from factor count");
    for (const auto& x : factors_) n_ *= x.size();
}

double ProductView::d(std::size_t i, std::size_t j) const {
    double args[16];
    std::vector<double> heap;
    double* a = args;
    if (factors_.size() > 16) {
        heap.resize(factors_.size());
        a = heap.data();
    }
    for (std::size_t k = factors_.size(); k-- > 0;) {
        std::size_t m = factors_[k].size();
        a[k] = factors_[k].d(i % m, j % m);
        i /= m;
        j /= m;
    }
    return f_.eval_raw(a);
}

double ProductView::w(std::size_t i) const {
    double p = 1;
    for (std::size_t k = factors_.size(); k-- > 0;) {
        std::size_t m = factors_[k].size();
        p *= factors_[k].w(i % m);
        i /= m;
    }
    return p;
}

FiniteMMSpace product(const std::vector<FiniteMMSpace>& factors, const Mpf& f, const ProductOptions& opt) {
    if (factors.empty()) throw Error(ErrorKind::ArityMismatch, "no factors");
    if (f.arity() != factors.size()) throw Error(ErrorKind::ArityMismatch, "F arity differs from factor count");
    double count = 1;
    for (const auto& x : factors) count *= static_cast<double>(x.size());
    if (count > static_cast<double>(opt.cap))
        throw Error(ErrorKind::CapExceeded, "product has " + std::to_string(static_cast<long long>(count)) + " points");
    if (opt.triplet_samples > 0) {
        TripletOptions t;
        t.samples = opt.triplet_samples;
        t.seed = opt.seed;
        double horizon = 0;
        for (const auto& x : factors) horizon = std::max(horizon, x.diameter());
        t.horizon = std::max(horizon, 1e-9);
        auto verdict = check_triangle_triplets(f, t);
        if (verdict.violation) throw Error(ErrorKind::MetricViolation, verdict.label() + ": " + verdict.detail());
    }
    ProductView view(factors, f);
    const std::size_t n = view.size();
    RawSpace raw;
    raw.dist.assign(n * n, 0.0);
    raw.weight.resize(n);
    raw.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw.weight[i] = view.w(i);
        auto idx = product_coords(factors, i);
        std::string label;
        for (std::size_t k = 0; k < idx.size(); ++k) label += (k ? "⊗" : "") + factors[k].labels()[idx[k]];
        raw.labels[i] = std::move(label);
        for (std::size_t j = i + 1; j < n; ++j) raw.dist[i * n + j] = raw.dist[j * n + i] = view.d(i, j);
    }
    // Products of weights need not sum to 1 bit-exactly.
    double total = 0;
    for (double w : raw.weight) total += w;
    for (double& w : raw.weight) w /= total;
    ValidateOptions vo;
    vo.cap = opt.cap;
    vo.full_check_limit = opt.full_check_limit;
    try {
        return validate_space(std::move(raw), vo);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::TriangleViolation || e.kind() == ErrorKind::BadShape)
            throw Error(ErrorKind::MetricViolation, e.what());
        throw;
    }
}

FiniteMMSpace metric_transform(const FiniteMMSpace& x, const Mpf& f) {
    if (f.arity() != 1) throw Error(ErrorKind::ArityMismatch, "metric transform needs a unary function");
    RawSpace raw;
    const std::size_t n = x.size();
    raw.labels = x.labels();
    raw.weight = x.weights();
    raw.dist.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = x.d(i, j);
            raw.dist[i * n + j] = raw.dist[j * n + i] = f.eval_raw(&d);
        }
    ValidateOptions vo;
    vo.full_check_limit = 1024;
    try {
        return validate_space(std::move(raw), vo);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::TriangleViolation || e.kind() == ErrorKind::BadShape)
            throw Error(ErrorKind::MetricViolation, e.what());
        throw;
    }
}

std::vector<double> levy_projection(const FiniteMMSpace& x, const FiniteMMSpace& y, double p,
                                    const std::vector<double>& f, Factor which, double tol) {
    const std::size_t nx = x.size(), ny = y.size();
    if (f.size() != nx * ny) throw Error(ErrorKind::HostMismatch, "f must live on X x Y");
    ProductView view({x, y}, fn::lp(p));
    const std::size_t n = nx * ny;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(f[i] - f[j]) > view.d(i, j) + tol) {
                std::ostringstream os;
                os << "|f(" << i << ") - f(" << j << ")| exceeds the l_" << p << " distance";
                throw Error(ErrorKind::NotLipschitz, os.str());
            }
    std::vector<double> g;
    if (which == Factor::First) {
        for (std::size_t a = 0; a < nx; ++a) {
            std::vector<double> fiber(f.begin() + static_cast<std::ptrdiff_t>(a * ny),
                                      f.begin() + static_cast<std::ptrdiff_t>((a + 1) * ny));
            g.push_back(levy_mean_of(fiber, y.weights()));
        }
        if (!is_1lipschitz(x, g, tol)) throw Error(ErrorKind::NotLipschitz, "projection lost the Lipschitz bound");
    } else {
        for (std::size_t b = 0; b < ny; ++b) {
            std::vector<double> fiber(nx);
            for (std::size_t a = 0; a < nx; ++a) fiber[a] = f[a * ny + b];
            g.push_back(levy_mean_of(fiber, x.weights()));
        }
        if (!is_1lipschitz(y, g, tol)) throw Error(ErrorKind::NotLipschitz, "projection lost the Lipschitz bound");
    }
    return g;
}

}  // namespace mml
