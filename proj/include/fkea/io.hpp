#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "fkea/common.hpp"
#include "fkea/entropy.hpp"
#include "fkea/kernel.hpp"
#include "fkea/modes.hpp"

namespace fkea {

// Canonical embedding file, all integers little-endian:
//   bytes 0..3   magic "FKEA"
//   bytes 4..7   version, unsigned 32-bit, currently 1
//   bytes 8..15  n, unsigned 64-bit
//   bytes 16..19 d, unsigned 32-bit
//   byte  20     dtype: 0 = 32-bit float, 1 = 64-bit float
//   byte  21...  n*d values, row-major
// Files named *.csv are instead parsed as headerless CSV, one sample per row.
enum class Dtype : std::uint8_t { f32 = 0, f64 = 1 };

inline constexpr std::int64_t kDefaultBatchRows = 8192;

EmbeddingSet read_embeddings(const std::string& path);
void write_embeddings(const std::string& path, const EmbeddingSet& e, Dtype dtype = Dtype::f32);

// Sequential batch reader over either file format; used wherever the full
// set must not be resident (scoring and mode ranking streams).
class EmbeddingReader {
public:
    explicit EmbeddingReader(const std::string& path);

    std::int64_t n() const { return n_; }
    std::int64_t d() const { return d_; }

    // Returns up to max_rows next samples; empty set at end of input.
    EmbeddingSet next_batch(std::int64_t max_rows = kDefaultBatchRows);
    void reset();

    // Advances past count rows without validating them (checkpoint resume).
    void skip_rows(std::int64_t count);

private:
    void open_and_parse_header();

    std::string path_;
    bool csv_ = false;
    std::ifstream stream_;
    Dtype dtype_ = Dtype::f32;
    std::int64_t n_ = 0;
    std::int64_t d_ = 0;
    std::int64_t rows_read_ = 0;
    std::streamoff payload_start_ = 0;
};

struct MixtureSpec {
    std::int64_t t = 1;               // cluster count
    std::int64_t n_per_cluster = 1;
    std::int64_t d = 1;
    double center_separation = 1.0;   // minimum distance between any two centers
    double cluster_std = 1.0;         // isotropic per-coordinate std within a cluster
    std::uint64_t seed = 0;

    void validate() const;
};

struct LabeledSet {
    EmbeddingSet points;              // cluster 0's rows first, then cluster 1's, ...
    std::vector<std::int32_t> labels; // one per row
    Mat centers;                      // t x d planted centers
};

// t isotropic Gaussian clusters. Centers are drawn uniformly from a fixed
// box and redrawn (bounded retries) until all pairwise distances reach
// center_separation; identical specs always produce identical data.
LabeledSet gen_mixture(const MixtureSpec& spec);

void write_labels_csv(const std::string& path, const std::vector<std::int32_t>& labels);

// Reports serialize with stable key order and shortest-round-trip number
// formatting, so equal reports produce equal bytes and parsing returns every
// score bit-exactly. See README for the JSON schema.
enum class ReportFormat { json, csv };

void write_diversity_report(const DiversityReport& report, const std::string& path,
                            ReportFormat format);
std::string diversity_report_json(const DiversityReport& report);

struct ModeReportContext {
    std::int64_t n = 0;
    std::int64_t d = 0;
    double sigma = 0.0;
    std::string sigma_source = "user";
    std::int64_t rff_dim = 0;
    std::uint64_t seed = 0;
    bool rank_by_abs = false;
};

void write_mode_report(const ModeReport& report, const ModeReportContext& ctx,
                       const std::string& path, ReportFormat format);
std::string mode_report_json(const ModeReport& report, const ModeReportContext& ctx);

}  // namespace fkea
