#include "fkea/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <vector>

#include <json.hpp>

#include "fkea/rng.hpp"

namespace fkea {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'F', 'K', 'E', 'A'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::streamoff kHeaderBytes = 21;

bool has_csv_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv";
}

std::uint32_t load_u32le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

std::uint64_t load_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

void store_u32le(unsigned char* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

void store_u64le(unsigned char* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

// Shortest decimal representation that parses back to the same double; used
// for CSV cells (JSON numbers get the same treatment from the serializer).
std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trim_cr(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
}

}  // namespace

void EmbeddingReader::open_and_parse_header() {
    stream_.open(path_, std::ios::binary);
    if (!stream_) {
        raise(errc::io_error, "cannot open embedding file: " + path_);
    }

    if (csv_) {
        // Pre-scan: row count and field count (no header row in the format).
        std::string line;
        std::int64_t rows = 0;
        std::int64_t fields = 0;
        while (std::getline(stream_, line)) {
            line = trim_cr(line);
            if (line.empty()) continue;
            if (rows == 0) {
                fields = 1 + std::count(line.begin(), line.end(), ',');
            }
            ++rows;
        }
        if (rows == 0) {
            raise(errc::format_error, "CSV file has no data rows: " + path_);
        }
        n_ = rows;
        d_ = fields;
        stream_.clear();
        stream_.seekg(0);
        payload_start_ = 0;
        return;
    }

    stream_.seekg(0, std::ios::end);
    const std::streamoff file_size = stream_.tellg();
    stream_.seekg(0);
    if (file_size < kHeaderBytes) {
        raise(errc::format_error, "truncated header in " + path_ + ": file has " +
                                      std::to_string(file_size) + " bytes, header needs " +
                                      std::to_string(kHeaderBytes));
    }

    unsigned char header[kHeaderBytes];
    stream_.read(reinterpret_cast<char*>(header), kHeaderBytes);
    if (std::memcmp(header, kMagic, 4) != 0) {
        raise(errc::format_error, "bad magic at byte offset 0 in " + path_);
    }
    const std::uint32_t version = load_u32le(header + 4);
    if (version != kFormatVersion) {
        raise(errc::format_error, "unsupported version " + std::to_string(version) +
                                      " at byte offset 4 in " + path_);
    }
    const std::uint64_t n = load_u64le(header + 8);
    const std::uint32_t d = load_u32le(header + 16);
    const std::uint8_t dtype = header[20];
    if (dtype > 1) {
        raise(errc::format_error,
              "unknown dtype code " + std::to_string(dtype) + " at byte offset 20 in " + path_);
    }
    if (n == 0 || d == 0) {
        raise(errc::format_error, "declared empty embedding set (n=" + std::to_string(n) +
                                      ", d=" + std::to_string(d) + ") in " + path_);
    }

    const unsigned width = dtype == 0 ? 4 : 8;
    const unsigned __int128 expected =
        static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(d) * width;
    const unsigned __int128 actual = static_cast<unsigned __int128>(file_size - kHeaderBytes);
    if (expected != actual) {
        raise(errc::format_error,
              "payload length mismatch in " + path_ + ": header declares " +
                  std::to_string(n) + "x" + std::to_string(d) + " (" +
                  std::to_string(static_cast<std::uint64_t>(expected)) +
                  " bytes after offset " + std::to_string(kHeaderBytes) + "), file has " +
                  std::to_string(static_cast<std::uint64_t>(actual)));
    }

    dtype_ = static_cast<Dtype>(dtype);
    n_ = static_cast<std::int64_t>(n);
    d_ = static_cast<std::int64_t>(d);
    payload_start_ = kHeaderBytes;
}

EmbeddingReader::EmbeddingReader(const std::string& path)
    : path_(path), csv_(has_csv_extension(path)) {
    open_and_parse_header();
}

void EmbeddingReader::reset() {
    stream_.clear();
    stream_.seekg(payload_start_);
    rows_read_ = 0;
}

void EmbeddingReader::skip_rows(std::int64_t count) {
    if (count < 0 || count > n_ - rows_read_) {
        raise(errc::invalid_input, "cannot skip " + std::to_string(count) + " rows, only " +
                                       std::to_string(n_ - rows_read_) + " remain");
    }
    if (csv_) {
        std::string line;
        std::int64_t skipped = 0;
        while (skipped < count && std::getline(stream_, line)) {
            if (!trim_cr(line).empty()) ++skipped;
        }
        if (skipped < count) {
            raise(errc::format_error, "CSV shrank while skipping rows: " + path_);
        }
    } else {
        const std::int64_t width = dtype_ == Dtype::f32 ? 4 : 8;
        stream_.seekg(static_cast<std::streamoff>(count) * d_ * width, std::ios::cur);
    }
    rows_read_ += count;
}

EmbeddingSet EmbeddingReader::next_batch(std::int64_t max_rows) {
    if (max_rows < 1) {
        raise(errc::invalid_input, "batch size must be >= 1");
    }
    EmbeddingSet out;
    const std::int64_t remaining = n_ - rows_read_;
    const std::int64_t count = std::min(max_rows, remaining);
    if (count <= 0) {
        out.data.resize(0, d_);
        return out;
    }
    out.data.resize(count, d_);

    if (csv_) {
        std::string line;
        std::int64_t row = 0;
        while (row < count && std::getline(stream_, line)) {
            line = trim_cr(line);
            if (line.empty()) continue;
            const char* p = line.data();
            const char* end = p + line.size();
            for (std::int64_t col = 0; col < d_; ++col) {
                double v = 0.0;
                auto res = std::from_chars(p, end, v);
                if (res.ec != std::errc()) {
                    raise(errc::format_error, "unparseable value in CSV row " +
                                                  std::to_string(rows_read_ + row) + " of " +
                                                  path_);
                }
                out.data(row, col) = v;
                p = res.ptr;
                if (col + 1 < d_) {
                    if (p >= end || *p != ',') {
                        raise(errc::format_error,
                              "CSV row " + std::to_string(rows_read_ + row) + " of " + path_ +
                                  " has fewer than " + std::to_string(d_) + " fields");
                    }
                    ++p;
                }
            }
            if (p != end) {
                raise(errc::format_error, "CSV row " + std::to_string(rows_read_ + row) +
                                              " of " + path_ + " has more than " +
                                              std::to_string(d_) + " fields");
            }
            ++row;
        }
        if (row < count) {
            raise(errc::format_error, "CSV shrank while reading: " + path_);
        }
    } else if (dtype_ == Dtype::f64) {
        static_assert(std::endian::native == std::endian::little,
                      "payload byte-swapping for big-endian hosts is not implemented");
        stream_.read(reinterpret_cast<char*>(out.data.data()), count * d_ * 8);
        if (!stream_) {
            raise(errc::io_error, "read failed at row " + std::to_string(rows_read_) + " of " +
                                      path_);
        }
    } else {
        std::vector<float> buf(static_cast<std::size_t>(count * d_));
        stream_.read(reinterpret_cast<char*>(buf.data()), count * d_ * 4);
        if (!stream_) {
            raise(errc::io_error, "read failed at row " + std::to_string(rows_read_) + " of " +
                                      path_);
        }
        for (std::int64_t i = 0; i < count * d_; ++i) {
            out.data.data()[i] = static_cast<double>(buf[i]);
        }
    }

    for (std::int64_t i = 0; i < count; ++i) {
        if (!out.data.row(i).allFinite()) {
            raise(errc::data_error, "non-finite value in embedding row " +
                                        std::to_string(rows_read_ + i) + " of " + path_);
        }
    }
    rows_read_ += count;
    return out;
}

EmbeddingSet read_embeddings(const std::string& path) {
    EmbeddingReader reader(path);
    EmbeddingSet out;
    out.data.resize(reader.n(), reader.d());
    std::int64_t row = 0;
    while (true) {
        EmbeddingSet batch = reader.next_batch(kDefaultBatchRows);
        if (batch.n() == 0) break;
        out.data.middleRows(row, batch.n()) = batch.data;
        row += batch.n();
    }
    return out;
}

void write_embeddings(const std::string& path, const EmbeddingSet& e, Dtype dtype) {
    e.validate();
    if (has_csv_extension(path)) {
        std::ofstream out(path, std::ios::trunc);
        if (!out) raise(errc::io_error, "cannot open for writing: " + path);
        for (std::int64_t i = 0; i < e.n(); ++i) {
            for (std::int64_t j = 0; j < e.d(); ++j) {
                if (j) out << ',';
                out << fmt_double(e.data(i, j));
            }
            out << '\n';
        }
        if (!out) raise(errc::io_error, "failed writing " + path);
        return;
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_error, "cannot open for writing: " + path);

    unsigned char header[kHeaderBytes];
    std::memcpy(header, kMagic, 4);
    store_u32le(header + 4, kFormatVersion);
    store_u64le(header + 8, static_cast<std::uint64_t>(e.n()));
    store_u32le(header + 16, static_cast<std::uint32_t>(e.d()));
    header[20] = static_cast<unsigned char>(dtype);
    out.write(reinterpret_cast<const char*>(header), kHeaderBytes);

    static_assert(std::endian::native == std::endian::little,
                  "payload byte-swapping for big-endian hosts is not implemented");
    if (dtype == Dtype::f64) {
        out.write(reinterpret_cast<const char*>(e.data.data()), e.n() * e.d() * 8);
    } else {
        std::vector<float> buf(static_cast<std::size_t>(e.n() * e.d()));
        for (std::int64_t i = 0; i < e.n() * e.d(); ++i) {
            const float v = static_cast<float>(e.data.data()[i]);
            if (!std::isfinite(v)) {
                raise(errc::data_error,
                      "value does not fit 32-bit float at flat index " + std::to_string(i));
            }
            buf[i] = v;
        }
        out.write(reinterpret_cast<const char*>(buf.data()), e.n() * e.d() * 4);
    }
    if (!out) raise(errc::io_error, "failed writing " + path);
}

void MixtureSpec::validate() const {
    if (t < 1) raise(errc::invalid_input, "mixture needs t >= 1 clusters");
    if (n_per_cluster < 1) raise(errc::invalid_input, "mixture needs n_per_cluster >= 1");
    if (d < 1) raise(errc::invalid_input, "mixture needs d >= 1");
    if (!(center_separation > 0.0) || !std::isfinite(center_separation)) {
        raise(errc::invalid_input, "center_separation must be positive");
    }
    if (!(cluster_std > 0.0) || !std::isfinite(cluster_std)) {
        raise(errc::invalid_input, "cluster_std must be positive");
    }
}

LabeledSet gen_mixture(const MixtureSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // Centers: uniform draws from a fixed box, redropped wholesale until all
    // pairwise distances reach the separation. The box half-width grows with
    // t^(1/d) so the demanded packing stays feasible when it can be.
    const double half_width =
        3.0 * spec.center_separation * std::pow(static_cast<double>(spec.t), 1.0 / spec.d);
    constexpr int kMaxAttempts = 128;

    Mat centers(spec.t, spec.d);
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
        for (std::int64_t i = 0; i < spec.t; ++i) {
            for (std::int64_t j = 0; j < spec.d; ++j) {
                centers(i, j) = rng.uniform(-half_width, half_width);
            }
        }
        placed = true;
        for (std::int64_t i = 0; i < spec.t && placed; ++i) {
            for (std::int64_t j = i + 1; j < spec.t; ++j) {
                if ((centers.row(i) - centers.row(j)).norm() < spec.center_separation) {
                    placed = false;
                    break;
                }
            }
        }
    }
    if (!placed) {
        raise(errc::generation_error,
              "could not place " + std::to_string(spec.t) + " centers pairwise >= " +
                  fmt_double(spec.center_separation) + " apart in dimension " +
                  std::to_string(spec.d) + " after " + std::to_string(kMaxAttempts) +
                  " attempts");
    }

    LabeledSet out;
    out.centers = centers;
    const std::int64_t n = spec.t * spec.n_per_cluster;
    out.points.data.resize(n, spec.d);
    out.labels.resize(static_cast<std::size_t>(n));
    std::int64_t row = 0;
    for (std::int64_t c = 0; c < spec.t; ++c) {
        for (std::int64_t i = 0; i < spec.n_per_cluster; ++i, ++row) {
            for (std::int64_t j = 0; j < spec.d; ++j) {
                out.points.data(row, j) = centers(c, j) + spec.cluster_std * rng.normal();
            }
            out.labels[static_cast<std::size_t>(row)] = static_cast<std::int32_t>(c);
        }
    }
    return out;
}

void write_labels_csv(const std::string& path, const std::vector<std::int32_t>& labels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(errc::io_error, "cannot open for writing: " + path);
    out << "label\n";
    for (std::int32_t label : labels) out << label << '\n';
    if (!out) raise(errc::io_error, "failed writing " + path);
}

namespace {

ordered_json provenance_json(const DiversityReport& report) {
    ordered_json p;
    p["n"] = report.n;
    p["d"] = report.d;
    p["sigma"] = report.sigma;
    p["sigma_source"] = report.sigma_source;
    if (report.rff_dim) {
        p["rff_dim"] = *report.rff_dim;
    } else {
        p["rff_dim"] = nullptr;
    }
    if (report.seed) {
        p["seed"] = *report.seed;
    } else {
        p["seed"] = nullptr;
    }
    p["version"] = kVersion;
    return p;
}

void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(errc::io_error, "cannot open for writing: " + path);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) raise(errc::io_error, "failed writing " + path);
}

}  // namespace

std::string diversity_report_json(const DiversityReport& report) {
    ordered_json j;
    j["schema"] = "fkea-report/1";
    j["kind"] = "diversity";
    j["method"] = report.method;
    j["provenance"] = provenance_json(report);
    if (report.bound) {
        j["bound"] = ordered_json{{"delta", report.bound_delta}, {"epsilon", *report.bound}};
    } else {
        j["bound"] = nullptr;
    }
    ordered_json scores;
    for (const auto& [alpha, score] : report.scores) {
        scores[alpha.token] = score;
    }
    j["scores"] = scores;
    j["rke"] = report.rke;
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

void write_diversity_report(const DiversityReport& report, const std::string& path,
                            ReportFormat format) {
    if (format == ReportFormat::json) {
        write_text_file(path, diversity_report_json(report));
        return;
    }
    std::string body = "alpha,score\n";
    for (const auto& [alpha, score] : report.scores) {
        body += alpha.token;
        body += ',';
        body += fmt_double(score);
        body += '\n';
    }
    write_text_file(path, body);
}

std::string mode_report_json(const ModeReport& report, const ModeReportContext& ctx) {
    ordered_json j;
    j["schema"] = "fkea-modes/1";
    j["kind"] = "modes";
    ordered_json p;
    p["n"] = ctx.n;
    p["d"] = ctx.d;
    p["sigma"] = ctx.sigma;
    p["sigma_source"] = ctx.sigma_source;
    p["rff_dim"] = ctx.rff_dim;
    p["seed"] = ctx.seed;
    p["version"] = kVersion;
    j["provenance"] = p;
    j["ranked_by"] = ctx.rank_by_abs ? "abs_score" : "score";

    ordered_json modes = ordered_json::array();
    for (std::size_t i = 0; i < report.modes.size(); ++i) {
        ordered_json m;
        m["mode"] = i;
        m["eigenvalue"] = report.modes[i].eigenvalue;
        ordered_json samples = ordered_json::array();
        for (const ModeEntry& entry : report.modes[i].top) {
            samples.push_back(ordered_json{{"index", entry.sample_index}, {"score", entry.score}});
        }
        m["samples"] = samples;
        modes.push_back(m);
    }
    j["modes"] = modes;
    return j.dump(2) + "\n";
}

void write_mode_report(const ModeReport& report, const ModeReportContext& ctx,
                       const std::string& path, ReportFormat format) {
    if (format == ReportFormat::json) {
        write_text_file(path, mode_report_json(report, ctx));
        return;
    }
    std::string body = "mode,rank,sample_index,score,eigenvalue\n";
    for (std::size_t i = 0; i < report.modes.size(); ++i) {
        const auto& mode = report.modes[i];
        for (std::size_t rank = 0; rank < mode.top.size(); ++rank) {
            body += std::to_string(i) + ',' + std::to_string(rank) + ',' +
                    std::to_string(mode.top[rank].sample_index) + ',' +
                    fmt_double(mode.top[rank].score) + ',' + fmt_double(mode.eigenvalue) + '\n';
        }
    }
    write_text_file(path, body);
}

}  // namespace fkea
