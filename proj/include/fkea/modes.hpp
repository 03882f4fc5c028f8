#pragma once

#include <cstdint>
#include <vector>

#include "fkea/common.hpp"
#include "fkea/entropy.hpp"
#include "fkea/rff.hpp"

namespace fkea {

// Top eigenpairs of the normalized proxy covariance. Eigenvectors are
// orthonormal columns of length 2r, each oriented so its largest-magnitude
// component is positive (eigensolvers only determine sign up to a flip, and
// reports must not depend on which one the solver picked).
struct ModeBasis {
    std::int64_t t = 0;
    Vec eigenvalues;   // top t, descending
    Mat eigenvectors;  // 2r x t, column i pairs with eigenvalues[i]
    std::uint64_t fingerprint = 0;
};

ModeBasis top_eigenvectors(const ProxyCovariance& cov, std::int64_t t);

// Likelihood-style score of sample x under mode i: the inner product of the
// sample's Fourier feature with eigenvector i. Averaging its square over the
// accumulated set recovers eigenvalue i (Rayleigh quotient identity).
double mode_score(const FourierBasis& basis, const ModeBasis& mb, std::int64_t mode_index,
                  const Eigen::Ref<const Vec>& x);

struct ModeEntry {
    std::int64_t sample_index = 0;
    double score = 0.0;
};

struct ModeRanking {
    double eigenvalue = 0.0;
    std::vector<ModeEntry> top;  // descending score; ties by lower index
};

struct ModeReport {
    std::vector<ModeRanking> modes;
    std::int64_t n_scored = 0;
};

// For each mode, the k samples of e with the largest scores (raw scores by
// default; rank_by_abs ranks by |score| instead). Streams over e in fixed
// chunks keeping only per-mode top-k candidates.
ModeReport rank_modes(const EmbeddingSet& e, const FourierBasis& basis, const ModeBasis& mb,
                      std::int64_t k, bool rank_by_abs = false);

// Incremental form of rank_modes for batch-at-a-time input (file streaming).
class ModeRanker {
public:
    ModeRanker(const FourierBasis& basis, const ModeBasis& mb, std::int64_t k,
               bool rank_by_abs = false);

    void consume(const EmbeddingSet& batch);
    ModeReport finish();

private:
    const FourierBasis& basis_;
    const ModeBasis& mb_;
    std::int64_t k_;
    bool rank_by_abs_;
    std::int64_t next_index_ = 0;
    std::vector<std::vector<ModeEntry>> candidates_;  // per mode, unsorted pool
};

}  // namespace fkea
