#include "fkea/rff.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "fkea/rng.hpp"
#include "fkea/thread.hpp"

namespace fkea {

namespace {

// Fixed work-unit sizes. These control parallel grain only; they are
// independent of the thread count, which keeps every floating-point result
// bitwise identical no matter how many workers execute the units.
constexpr std::int64_t kChunkRows = 2048;   // samples per accumulation chunk
constexpr std::int64_t kFillRows = 256;     // rows per feature-fill task
constexpr std::int64_t kBandWidth = 128;    // covariance rows per band task

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
}

void fnv1a_u64(std::uint64_t& h, std::uint64_t v) {
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    fnv1a(h, bytes, 8);
}

// Computes Fourier features for the given samples into phi (rows x 2r,
// row-major), parallel over fixed row blocks.
void fill_features(const FourierBasis& basis, const Eigen::Ref<const RowMat>& samples,
                   RowMat& phi) {
    const std::int64_t rows = samples.rows();
    const std::int64_t r = basis.r;
    const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));

    const std::int64_t blocks = (rows + kFillRows - 1) / kFillRows;
    parallel_for(blocks, [&](std::int64_t b) {
        const std::int64_t begin = b * kFillRows;
        const std::int64_t count = std::min(kFillRows, rows - begin);
        // Projections omega_j . x for the block, then interleaved cos/sin.
        RowMat proj = samples.middleRows(begin, count) * basis.omegas.transpose();
        for (std::int64_t i = 0; i < count; ++i) {
            const double* p = proj.data() + i * r;
            double* out = phi.data() + (begin + i) * 2 * r;
            for (std::int64_t j = 0; j < r; ++j) {
                out[2 * j] = std::cos(p[j]) * inv_sqrt_r;
                out[2 * j + 1] = std::sin(p[j]) * inv_sqrt_r;
            }
        }
    });
}

void require_same_basis(const ProxyCovariance& cov, const FourierBasis& basis) {
    if (cov.fingerprint != basis_fingerprint(basis)) {
        raise(errc::basis_mismatch,
              "accumulator was built from a different Fourier basis (fingerprint mismatch)");
    }
}

}  // namespace

FourierBasis sample_fourier_basis(std::int64_t d, std::int64_t r, const GaussianKernelSpec& spec,
                                  std::uint64_t seed) {
    spec.validate();
    if (d < 1 || r < 1) {
        raise(errc::invalid_input, "sample_fourier_basis needs d >= 1 and r >= 1");
    }

    FourierBasis basis;
    basis.r = r;
    basis.d = d;
    basis.sigma = spec.sigma;
    basis.seed = seed;
    basis.omegas.resize(r, d);

    // Spectral density of the Gaussian kernel: N(0, sigma^-2 I). Row-major
    // fill order is part of the reproducibility contract.
    Rng rng(seed);
    const double scale = 1.0 / spec.sigma;
    for (std::int64_t i = 0; i < r; ++i) {
        for (std::int64_t j = 0; j < d; ++j) {
            basis.omegas(i, j) = scale * rng.normal();
        }
    }
    return basis;
}

std::uint64_t basis_fingerprint(const FourierBasis& basis) {
    std::uint64_t h = kFnvOffset;
    fnv1a_u64(h, static_cast<std::uint64_t>(basis.d));
    fnv1a_u64(h, static_cast<std::uint64_t>(basis.r));
    fnv1a_u64(h, std::bit_cast<std::uint64_t>(basis.sigma));
    fnv1a_u64(h, basis.seed);
    fnv1a(h, Rng::kAlgorithmId, std::strlen(Rng::kAlgorithmId));
    return h;
}

Vec feature_map(const FourierBasis& basis, const Eigen::Ref<const Vec>& x) {
    if (x.size() != basis.d) {
        raise(errc::invalid_input, "feature_map: sample has dimension " +
                                       std::to_string(x.size()) + ", basis expects " +
                                       std::to_string(basis.d));
    }
    if (!x.allFinite()) {
        raise(errc::data_error, "feature_map: non-finite sample");
    }

    const Vec proj = basis.omegas * x;
    const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(basis.r));
    Vec out(2 * basis.r);
    for (std::int64_t j = 0; j < basis.r; ++j) {
        out[2 * j] = std::cos(proj[j]) * inv_sqrt_r;
        out[2 * j + 1] = std::sin(proj[j]) * inv_sqrt_r;
    }
    return out;
}

RowMat feature_matrix(const FourierBasis& basis, const EmbeddingSet& e) {
    e.validate();
    if (e.d() != basis.d) {
        raise(errc::invalid_input, "feature_matrix: dimension mismatch");
    }
    RowMat phi(e.n(), 2 * basis.r);
    fill_features(basis, e.data, phi);
    return phi;
}

ProxyCovariance make_accumulator(const FourierBasis& basis) {
    ProxyCovariance cov;
    cov.r = basis.r;
    cov.samples_seen = 0;
    cov.sum_matrix = Mat::Zero(2 * basis.r, 2 * basis.r);
    cov.fingerprint = basis_fingerprint(basis);
    return cov;
}

void accumulate(ProxyCovariance& cov, const EmbeddingSet& batch, const FourierBasis& basis) {
    require_same_basis(cov, basis);
    batch.validate();
    if (batch.d() != basis.d) {
        raise(errc::invalid_input, "accumulate: batch dimension " + std::to_string(batch.d()) +
                                       " does not match basis dimension " +
                                       std::to_string(basis.d));
    }

    const std::int64_t n = batch.n();
    const std::int64_t m = 2 * basis.r;
    const std::int64_t bands = (m + kBandWidth - 1) / kBandWidth;

    RowMat phi(std::min(kChunkRows, n), m);
    for (std::int64_t begin = 0; begin < n; begin += kChunkRows) {
        const std::int64_t count = std::min(kChunkRows, n - begin);
        fill_features(basis, batch.data.middleRows(begin, count), phi);

        // Row-major phi (count x m) viewed as column-major (m x count) is
        // the transposed feature block; each band task owns a disjoint row
        // strip of the lower triangle of sum_matrix.
        Eigen::Map<const Mat> ft(phi.data(), m, count);
        parallel_for(bands, [&](std::int64_t b) {
            const std::int64_t a = b * kBandWidth;
            const std::int64_t w = std::min(kBandWidth, m - a);
            if (a > 0) {
                cov.sum_matrix.block(a, 0, w, a).noalias() +=
                    ft.middleRows(a, w) * ft.topRows(a).transpose();
            }
            cov.sum_matrix.block(a, a, w, w).noalias() +=
                ft.middleRows(a, w) * ft.middleRows(a, w).transpose();
        });
    }

    // The lower triangle is authoritative; mirror it so the stored matrix is
    // exactly symmetric.
    for (std::int64_t j = 0; j < m; ++j) {
        for (std::int64_t i = j + 1; i < m; ++i) {
            cov.sum_matrix(j, i) = cov.sum_matrix(i, j);
        }
    }
    cov.samples_seen += n;
}

ProxyCovariance merge(const ProxyCovariance& a, const ProxyCovariance& b) {
    if (a.fingerprint != b.fingerprint) {
        raise(errc::basis_mismatch, "cannot merge accumulators with different basis fingerprints");
    }
    if (a.r != b.r) {
        raise(errc::basis_mismatch, "cannot merge accumulators of different sizes");
    }
    ProxyCovariance out;
    out.r = a.r;
    out.samples_seen = a.samples_seen + b.samples_seen;
    out.sum_matrix = a.sum_matrix + b.sum_matrix;
    out.fingerprint = a.fingerprint;
    return out;
}

Mat normalized_covariance(const ProxyCovariance& cov) {
    if (cov.samples_seen < 1) {
        raise(errc::invalid_input, "accumulator is empty");
    }
    return cov.sum_matrix / static_cast<double>(cov.samples_seen);
}

namespace {

constexpr char kCheckpointMagic[4] = {'F', 'K', 'C', 'P'};
constexpr std::uint32_t kCheckpointVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_doubles_le(std::ofstream& out, const double* values, std::int64_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values), count * 8);
    } else {
        for (std::int64_t i = 0; i < count; ++i) {
            write_u64(out, std::bit_cast<std::uint64_t>(values[i]));
        }
    }
}

void read_doubles_le(std::ifstream& in, double* values, std::int64_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(values), count * 8);
    } else {
        for (std::int64_t i = 0; i < count; ++i) {
            values[i] = std::bit_cast<double>(read_u64(in));
        }
    }
}

}  // namespace

void save_checkpoint(const ProxyCovariance& cov, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(errc::io_error, "cannot open checkpoint file for writing: " + path);
    }
    out.write(kCheckpointMagic, 4);
    write_u32(out, kCheckpointVersion);
    write_u64(out, cov.fingerprint);
    write_u64(out, static_cast<std::uint64_t>(cov.r));
    write_u64(out, static_cast<std::uint64_t>(cov.samples_seen));

    const std::int64_t m = cov.feature_dim();
    std::vector<double> row;
    for (std::int64_t i = 0; i < m; ++i) {
        row.resize(m - i);
        for (std::int64_t j = i; j < m; ++j) row[j - i] = cov.sum_matrix(i, j);
        write_doubles_le(out, row.data(), static_cast<std::int64_t>(row.size()));
    }
    if (!out) {
        raise(errc::io_error, "failed writing checkpoint: " + path);
    }
}

ProxyCovariance load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(errc::io_error, "cannot open checkpoint file: " + path);
    }
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
        raise(errc::format_error, "not a checkpoint file (bad magic): " + path);
    }
    const std::uint32_t version = read_u32(in);
    if (version != kCheckpointVersion) {
        raise(errc::format_error,
              "unsupported checkpoint version " + std::to_string(version) + ": " + path);
    }

    ProxyCovariance cov;
    cov.fingerprint = read_u64(in);
    cov.r = static_cast<std::int64_t>(read_u64(in));
    cov.samples_seen = static_cast<std::int64_t>(read_u64(in));
    if (!in || cov.r < 1 || cov.samples_seen < 0) {
        raise(errc::format_error, "corrupt checkpoint header: " + path);
    }

    const std::int64_t m = cov.feature_dim();
    cov.sum_matrix.resize(m, m);
    std::vector<double> row;
    for (std::int64_t i = 0; i < m; ++i) {
        row.resize(m - i);
        read_doubles_le(in, row.data(), static_cast<std::int64_t>(row.size()));
        if (!in) {
            raise(errc::format_error, "truncated checkpoint payload: " + path);
        }
        for (std::int64_t j = i; j < m; ++j) {
            cov.sum_matrix(i, j) = row[j - i];
            cov.sum_matrix(j, i) = row[j - i];
        }
    }
    return cov;
}

}  // namespace fkea
