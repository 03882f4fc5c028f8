#include "fkea/kernel.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fkea/entropy.hpp"
#include "fkea/thread.hpp"

namespace fkea {

namespace {
// Fixed work-unit size for parallel Gram construction. Independent of the
// thread count so results are bitwise reproducible however many workers run.
constexpr std::int64_t kGramBlockRows = 256;
}  // namespace

void GaussianKernelSpec::validate() const {
    if (!std::isfinite(sigma) || sigma <= 0.0) {
        raise(errc::invalid_input, "kernel bandwidth sigma must be positive and finite");
    }
}

void EmbeddingSet::validate() const {
    if (n() < 1 || d() < 1) {
        raise(errc::invalid_input, "embedding set must have n >= 1 and d >= 1");
    }
    for (std::int64_t i = 0; i < n(); ++i) {
        if (!data.row(i).allFinite()) {
            raise(errc::data_error, "non-finite value in embedding row " + std::to_string(i));
        }
    }
}

double gaussian_kernel(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y,
                       const GaussianKernelSpec& spec) {
    spec.validate();
    if (x.size() != y.size()) {
        raise(errc::invalid_input, "kernel arguments have dimensions " +
                                       std::to_string(x.size()) + " and " +
                                       std::to_string(y.size()));
    }
    if (!x.allFinite() || !y.allFinite()) {
        raise(errc::data_error, "non-finite value in kernel argument");
    }
    if (x.size() == 0) {
        raise(errc::invalid_input, "kernel arguments must be non-empty");
    }
    // Exact equality short-circuits so k(x, x) is 1 with no round-off.
    if ((x.array() == y.array()).all()) {
        return 1.0;
    }
    const double dist2 = (x - y).squaredNorm();
    return std::exp(-dist2 / (2.0 * spec.sigma * spec.sigma));
}

namespace {

void check_cap(std::int64_t n, std::int64_t cap) {
    if (cap < 1) raise(errc::invalid_input, "exact cap must be >= 1");
    if (n > cap) {
        raise(errc::capacity_error,
              "exact path refused: n = " + std::to_string(n) + " exceeds cap " +
                  std::to_string(cap) + "; use the streaming estimator (fkea score)");
    }
}

// Squared distances x_i to every x_j for rows [row_begin, row_end), via
// ||x||^2 + ||y||^2 - 2 x.y with a clamp at 0 against cancellation.
Mat block_sq_distances(const RowMat& x, const Vec& sqnorms, std::int64_t row_begin,
                       std::int64_t row_end) {
    const std::int64_t rows = row_end - row_begin;
    Mat d2 = -2.0 * (x.middleRows(row_begin, rows) * x.transpose());
    d2.colwise() += sqnorms.segment(row_begin, rows);
    d2.rowwise() += sqnorms.transpose();
    return d2.cwiseMax(0.0);
}

}  // namespace

GramMatrix exact_gram(const EmbeddingSet& e, const GaussianKernelSpec& spec, std::int64_t cap) {
    spec.validate();
    e.validate();
    check_cap(e.n(), cap);

    const std::int64_t n = e.n();
    const double inv_two_sigma2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
    const Vec sqnorms = e.data.rowwise().squaredNorm();

    GramMatrix gram;
    gram.entries.resize(n, n);

    const std::int64_t blocks = (n + kGramBlockRows - 1) / kGramBlockRows;
    parallel_for(blocks, [&](std::int64_t b) {
        const std::int64_t row_begin = b * kGramBlockRows;
        const std::int64_t row_end = std::min(n, row_begin + kGramBlockRows);
        const Mat d2 = block_sq_distances(e.data, sqnorms, row_begin, row_end);
        gram.entries.middleRows(row_begin, row_end - row_begin) =
            (-inv_two_sigma2 * d2).array().exp() / static_cast<double>(n);
    });

    // The diagonal is exactly 1/n by definition; enforce it so duplicate-free
    // data still gets an exactly unit trace. The GEMM can leave (i,j) and
    // (j,i) a few ulp apart, so mirror the lower triangle to make the matrix
    // symmetric bitwise, not just to round-off.
    gram.entries.diagonal().setConstant(1.0 / static_cast<double>(n));
    for (std::int64_t j = 1; j < n; ++j) {
        for (std::int64_t i = 0; i < j; ++i) {
            gram.entries(i, j) = gram.entries(j, i);
        }
    }
    return gram;
}

double exact_rke(const EmbeddingSet& e, const GaussianKernelSpec& spec, std::int64_t cap) {
    spec.validate();
    e.validate();
    check_cap(e.n(), cap);

    const std::int64_t n = e.n();
    const double inv_sigma2 = 1.0 / (spec.sigma * spec.sigma);
    const Vec sqnorms = e.data.rowwise().squaredNorm();

    // Per-block partial sums combined in block order, so the total does not
    // depend on how blocks were scheduled across threads.
    const std::int64_t blocks = (n + kGramBlockRows - 1) / kGramBlockRows;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, [&](std::int64_t b) {
        const std::int64_t row_begin = b * kGramBlockRows;
        const std::int64_t row_end = std::min(n, row_begin + kGramBlockRows);
        Mat d2 = block_sq_distances(e.data, sqnorms, row_begin, row_end);
        // Self-distances are 0 by definition; the GEMM route leaves them a
        // few ulp off, so pin them before exponentiating (k(x,x)^2 = 1).
        for (std::int64_t i = row_begin; i < row_end; ++i) {
            d2(i - row_begin, i) = 0.0;
        }
        partial[b] = (-inv_sigma2 * d2).array().exp().sum();
    });

    double total = 0.0;
    for (double p : partial) total += p;
    const double mean_sq = total / (static_cast<double>(n) * static_cast<double>(n));
    return 1.0 / mean_sq;
}

double exact_vendi(const EmbeddingSet& e, const GaussianKernelSpec& spec, const Alpha& alpha,
                   std::int64_t cap) {
    alpha.validate();
    const GramMatrix gram = exact_gram(e, spec, cap);
    const EigenSpectrum spectrum = eigenvalues_sym(gram.entries);
    return score_from_spectrum(spectrum, alpha);
}

}  // namespace fkea
