#pragma once

#include <cstdint>
#include <vector>

#include "mml/core.hpp"
#include "mml/mpf.hpp"

namespace mml {

struct ProductOptions {
    std::size_t cap = 4096;
    // Triplet screening of F before building; 0 skips it.
    std::size_t triplet_samples = 2000;
    std::uint64_t seed = 7;
    std::size_t full_check_limit = 1024;
};

// Points are tuples with the first factor varying slowest; labels joined with "⊗".
FiniteMMSpace product(const std::vector<FiniteMMSpace>& factors, const Mpf& f, const ProductOptions& opt = {});

// Same points and weights, distances F(d).
FiniteMMSpace metric_transform(const FiniteMMSpace& x, const Mpf& f);

// Tuple index <-> factor indices.
std::size_t product_index(const std::vector<FiniteMMSpace>& factors, const std::vector<std::size_t>& idx);
std::vector<std::size_t> product_coords(const std::vector<FiniteMMSpace>& factors, std::size_t flat);

// Distances of a product without materialising the matrix.
class ProductView {
public:
    ProductView(std::vector<FiniteMMSpace> factors, Mpf f);
    std::size_t size() const { return n_; }
    double d(std::size_t i, std::size_t j) const;
    double w(std::size_t i) const;

private:
    std::vector<FiniteMMSpace> factors_;
    Mpf f_;
    std::size_t n_ = 1;
};

enum class Factor { First, Second };

// g(x) = lm(f(x, .); m_Y) (or the symmetric version for the second factor).
// f lives on X x Y with the l_p product metric and must be 1-Lipschitz there.
std::vector<double> levy_projection(const FiniteMMSpace& x, const FiniteMMSpace& y, double p,
                                    const std::vector<double>& f, Factor which, double tol = 1e-9);

}  // namespace mml
