#pragma once

#include <cstdint>

#include "fkea/alpha.hpp"
#include "fkea/common.hpp"

namespace fkea {

// Exact paths allocate an n-by-n Gram matrix; above this many samples they
// refuse and point at the streaming estimator instead.
inline constexpr std::int64_t kDefaultExactCap = 20000;

struct GaussianKernelSpec {
    double sigma = 0.0;  // bandwidth, same units as embedding coordinates

    void validate() const;
};

// One embedding per row. All entries must be finite; inputs stored in single
// precision are widened to double before any kernel arithmetic.
struct EmbeddingSet {
    RowMat data;

    std::int64_t n() const { return data.rows(); }
    std::int64_t d() const { return data.cols(); }

    // Checks shape and finiteness; names the first offending row on failure.
    void validate() const;
};

// Normalized kernel matrix: entries[i][j] = k(x_i, x_j) / n, so the diagonal
// is 1/n and the trace is 1.
struct GramMatrix {
    Mat entries;

    std::int64_t n() const { return entries.rows(); }
};

// exp(-||x - y||^2 / (2 sigma^2)), in (0, 1], exactly 1 iff x == y bitwise.
double gaussian_kernel(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y,
                       const GaussianKernelSpec& spec);

GramMatrix exact_gram(const EmbeddingSet& e, const GaussianKernelSpec& spec,
                      std::int64_t cap = kDefaultExactCap);

// ((1/n^2) sum_ij k(x_i, x_j)^2)^-1, computed from the kernel double sum
// directly (no Gram matrix held, no eigendecomposition).
double exact_rke(const EmbeddingSet& e, const GaussianKernelSpec& spec,
                 std::int64_t cap = kDefaultExactCap);

// exp of the order-alpha Rényi entropy of the exact Gram spectrum.
double exact_vendi(const EmbeddingSet& e, const GaussianKernelSpec& spec, const Alpha& alpha,
                   std::int64_t cap = kDefaultExactCap);

}  // namespace fkea
