#pragma once

#include <cstdint>
#include <string>

#include "fkea/common.hpp"
#include "fkea/kernel.hpp"

namespace fkea {

// Frequencies omega_1..omega_r (one per row) drawn iid from the Gaussian
// kernel's spectral density N(0, sigma^-2 I_d). Regenerating with the same
// (d, r, sigma, seed) reproduces the matrix bit-exactly: the generator is
// Rng (documented in rng.hpp) and rows are filled in row-major order.
struct FourierBasis {
    std::int64_t r = 0;
    std::int64_t d = 0;
    Mat omegas;  // r x d
    double sigma = 0.0;
    std::uint64_t seed = 0;

    std::int64_t feature_dim() const { return 2 * r; }
};

FourierBasis sample_fourier_basis(std::int64_t d, std::int64_t r, const GaussianKernelSpec& spec,
                                  std::uint64_t seed);

// FNV-1a hash of (d, r, sigma bit pattern, seed, RNG algorithm id); two
// accumulators merge only if these match.
std::uint64_t basis_fingerprint(const FourierBasis& basis);

// Feature map for one sample: [cos(w_1.x), sin(w_1.x), ..., cos(w_r.x),
// sin(w_r.x)] / sqrt(r). The interleaved cos/sin layout is a contract (mode
// extraction indexes into it); the vector always has unit Euclidean norm.
Vec feature_map(const FourierBasis& basis, const Eigen::Ref<const Vec>& x);

// Feature maps for every row of e, one per row of the result (n x 2r).
RowMat feature_matrix(const FourierBasis& basis, const EmbeddingSet& e);

// Streaming sum of feature outer products. Stored unnormalized (plus the
// sample count) so partial accumulators merge exactly; normalized on read.
struct ProxyCovariance {
    std::int64_t r = 0;
    std::int64_t samples_seen = 0;
    Mat sum_matrix;  // 2r x 2r, symmetric
    std::uint64_t fingerprint = 0;

    std::int64_t feature_dim() const { return 2 * r; }
};

ProxyCovariance make_accumulator(const FourierBasis& basis);

// sum_matrix += sum over batch rows of phi(x) phi(x)^T; samples_seen +=
// batch.n(). Peak extra memory is a fixed-size feature chunk, independent of
// how many samples have been streamed.
void accumulate(ProxyCovariance& cov, const EmbeddingSet& batch, const FourierBasis& basis);

ProxyCovariance merge(const ProxyCovariance& a, const ProxyCovariance& b);

// sum_matrix / samples_seen; trace is 1 within round-off.
Mat normalized_covariance(const ProxyCovariance& cov);

// Checkpoint file: magic/version header, then (fingerprint, r, samples_seen,
// upper triangle of sum_matrix) little-endian in double precision.
void save_checkpoint(const ProxyCovariance& cov, const std::string& path);
ProxyCovariance load_checkpoint(const std::string& path);

}  // namespace fkea
