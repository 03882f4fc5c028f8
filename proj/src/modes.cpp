#include "fkea/modes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fkea {

namespace {

constexpr std::int64_t kScoreChunkRows = 2048;

bool ranks_before(const ModeEntry& a, const ModeEntry& b, bool by_abs) {
    const double ka = by_abs ? std::abs(a.score) : a.score;
    const double kb = by_abs ? std::abs(b.score) : b.score;
    if (ka != kb) return ka > kb;
    return a.sample_index < b.sample_index;  // ties: lower index first
}

}  // namespace

ModeBasis top_eigenvectors(const ProxyCovariance& cov, std::int64_t t) {
    const std::int64_t m = cov.feature_dim();
    if (t < 1 || t > m) {
        raise(errc::invalid_input,
              "mode count " + std::to_string(t) + " out of range [1, " + std::to_string(m) + "]");
    }
    if (cov.samples_seen < 1) {
        raise(errc::invalid_input, "accumulator has seen no samples");
    }

    // Solve on the unnormalized sum: same eigenvectors, eigenvalues scaled by
    // the sample count. Skipping the normalized copy matters at large 2r,
    // where each extra matrix costs (2r)^2 doubles.
    const double inv_n = 1.0 / static_cast<double>(cov.samples_seen);
    Eigen::SelfAdjointEigenSolver<Mat> solver(cov.sum_matrix);
    if (solver.info() != Eigen::Success) {
        raise(errc::numeric_error, "symmetric eigensolver did not converge");
    }

    ModeBasis mb;
    mb.t = t;
    mb.fingerprint = cov.fingerprint;
    mb.eigenvalues.resize(t);
    mb.eigenvectors.resize(m, t);

    // Solver output is ascending; modes are the top of the spectrum.
    for (std::int64_t i = 0; i < t; ++i) {
        const std::int64_t src = m - 1 - i;
        const double lambda = solver.eigenvalues()[src] * inv_n;
        mb.eigenvalues[i] = std::max(0.0, lambda);
        Vec v = solver.eigenvectors().col(src);

        // Canonical orientation: the largest-magnitude component is made
        // positive, since the solver's sign choice is arbitrary.
        Eigen::Index peak = 0;
        v.cwiseAbs().maxCoeff(&peak);
        if (v[peak] < 0.0) v = -v;
        mb.eigenvectors.col(i) = v;

        const double residual = ((cov.sum_matrix * v) * inv_n - lambda * v).norm();
        if (residual > 1e-7) {
            raise(errc::numeric_error, "eigenpair " + std::to_string(i) +
                                           " residual " + std::to_string(residual) +
                                           " exceeds 1e-7");
        }
    }
    return mb;
}

double mode_score(const FourierBasis& basis, const ModeBasis& mb, std::int64_t mode_index,
                  const Eigen::Ref<const Vec>& x) {
    if (mode_index < 0 || mode_index >= mb.t) {
        raise(errc::invalid_input, "mode index " + std::to_string(mode_index) +
                                       " out of range [0, " + std::to_string(mb.t) + ")");
    }
    if (2 * basis.r != mb.eigenvectors.rows()) {
        raise(errc::invalid_input, "mode basis does not match this Fourier basis size");
    }
    return feature_map(basis, x).dot(mb.eigenvectors.col(mode_index));
}

ModeRanker::ModeRanker(const FourierBasis& basis, const ModeBasis& mb, std::int64_t k,
                       bool rank_by_abs)
    : basis_(basis), mb_(mb), k_(k), rank_by_abs_(rank_by_abs) {
    if (k < 1) {
        raise(errc::invalid_input, "top-k must be >= 1");
    }
    if (2 * basis.r != mb.eigenvectors.rows()) {
        raise(errc::invalid_input, "mode basis does not match this Fourier basis size");
    }
    candidates_.resize(mb.t);
}

void ModeRanker::consume(const EmbeddingSet& batch) {
    batch.validate();
    if (batch.d() != basis_.d) {
        raise(errc::invalid_input, "ranked batch dimension does not match basis");
    }

    EmbeddingSet chunk;
    for (std::int64_t begin = 0; begin < batch.n(); begin += kScoreChunkRows) {
        const std::int64_t count = std::min(kScoreChunkRows, batch.n() - begin);
        chunk.data = batch.data.middleRows(begin, count);
        const RowMat phi = feature_matrix(basis_, chunk);
        const Mat scores = phi * mb_.eigenvectors;  // count x t

        for (std::int64_t mode = 0; mode < mb_.t; ++mode) {
            auto& pool = candidates_[mode];
            for (std::int64_t i = 0; i < count; ++i) {
                pool.push_back({next_index_ + begin + i, scores(i, mode)});
            }
            // Keep the pool bounded: shrink back to the current top k once
            // it grows past a small multiple.
            if (static_cast<std::int64_t>(pool.size()) > 4 * k_) {
                std::nth_element(pool.begin(), pool.begin() + k_, pool.end(),
                                 [&](const ModeEntry& a, const ModeEntry& b) {
                                     return ranks_before(a, b, rank_by_abs_);
                                 });
                pool.resize(k_);
            }
        }
    }
    next_index_ += batch.n();
}

ModeReport ModeRanker::finish() {
    ModeReport report;
    report.n_scored = next_index_;
    report.modes.resize(mb_.t);
    for (std::int64_t mode = 0; mode < mb_.t; ++mode) {
        auto& pool = candidates_[mode];
        std::sort(pool.begin(), pool.end(), [&](const ModeEntry& a, const ModeEntry& b) {
            return ranks_before(a, b, rank_by_abs_);
        });
        const std::int64_t keep = std::min<std::int64_t>(k_, pool.size());
        report.modes[mode].eigenvalue = mb_.eigenvalues[mode];
        report.modes[mode].top.assign(pool.begin(), pool.begin() + keep);
        pool.clear();
    }
    return report;
}

ModeReport rank_modes(const EmbeddingSet& e, const FourierBasis& basis, const ModeBasis& mb,
                      std::int64_t k, bool rank_by_abs) {
    e.validate();
    if (k > e.n()) {
        raise(errc::invalid_input, "top-k " + std::to_string(k) + " exceeds sample count " +
                                       std::to_string(e.n()));
    }
    ModeRanker ranker(basis, mb, k, rank_by_abs);
    ranker.consume(e);
    return ranker.finish();
}

}  // namespace fkea
