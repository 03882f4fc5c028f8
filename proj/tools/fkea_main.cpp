// fkea: diversity scores for embedding collections.
//
// score  - streaming random-Fourier-feature estimator (VENDI_alpha, RKE)
// exact  - dense Gram-matrix baseline for verification at small n
// modes  - top covariance eigenvectors with per-mode sample rankings
// sweep  - CSV convergence/cluster-count sweeps
// gen    - synthetic Gaussian-mixture embedding files

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fkea/entropy.hpp"
#include "fkea/io.hpp"
#include "fkea/kernel.hpp"
#include "fkea/modes.hpp"
#include "fkea/rff.hpp"
#include "fkea/thread.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int resolve_threads(std::optional<int> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("FKEA_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (...) {
            fkea::raise(fkea::errc::invalid_input,
                        std::string("FKEA_THREADS is not an integer: ") + env);
        }
    }
    return fkea::max_threads();  // hardware default
}

std::vector<fkea::Alpha> parse_alphas(const std::string& csv) {
    std::vector<fkea::Alpha> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) out.push_back(fkea::Alpha::parse(token));
    }
    if (out.empty()) {
        fkea::raise(fkea::errc::invalid_input, "alpha list is empty");
    }
    return out;
}

fkea::ReportFormat parse_format(const std::string& name) {
    if (name == "json") return fkea::ReportFormat::json;
    if (name == "csv") return fkea::ReportFormat::csv;
    fkea::raise(fkea::errc::invalid_input, "unknown report format '" + name + "'");
}

// Median pairwise distance over the first min(n, 1000) rows; the "lower
// middle" element of the sorted i<j distance list.
double median_heuristic_sigma(fkea::EmbeddingReader& reader) {
    fkea::EmbeddingSet sample = reader.next_batch(1000);
    reader.reset();
    const std::int64_t m = sample.n();
    if (m < 2) {
        fkea::raise(fkea::errc::invalid_input,
                    "median heuristic needs at least 2 samples");
    }
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = i + 1; j < m; ++j) {
            dists.push_back((sample.data.row(i) - sample.data.row(j)).norm());
        }
    }
    std::nth_element(dists.begin(), dists.begin() + (dists.size() - 1) / 2, dists.end());
    const double median = dists[(dists.size() - 1) / 2];
    if (!(median > 0.0)) {
        fkea::raise(fkea::errc::invalid_input,
                    "median pairwise distance is 0 (identical samples); pass --sigma instead");
    }
    return median;
}

constexpr double kBoundDelta = 0.05;

struct CommonOptions {
    std::string input;
    std::optional<double> sigma;
    std::string sigma_heuristic;
    std::int64_t rff_dim = 16000;
    std::string alphas = "1,1.5,2,inf";
    std::uint64_t seed = 0;
    std::int64_t batch = fkea::kDefaultBatchRows;
    std::optional<int> threads;
    std::string output;
    std::string format = "json";
};

void add_sigma_flags(CLI::App* cmd, CommonOptions& opt) {
    auto* sigma = cmd->add_option("--sigma", opt.sigma,
                                  "Gaussian kernel bandwidth (coordinate units)");
    auto* heur = cmd->add_option("--sigma-heuristic", opt.sigma_heuristic,
                                 "compute sigma from data; only value: median "
                                 "(median pairwise distance over a 1000-row subsample)");
    sigma->excludes(heur);
    heur->excludes(sigma);
}

// Resolves sigma from --sigma or --sigma-heuristic median.
double resolve_sigma(const CommonOptions& opt, fkea::EmbeddingReader& reader,
                     std::string& source_out) {
    if (opt.sigma) {
        source_out = "user";
        return *opt.sigma;
    }
    if (opt.sigma_heuristic.empty()) {
        fkea::raise(fkea::errc::invalid_input,
                    "sigma is required: pass --sigma or --sigma-heuristic median");
    }
    if (opt.sigma_heuristic != "median") {
        fkea::raise(fkea::errc::invalid_input,
                    "unknown sigma heuristic '" + opt.sigma_heuristic + "' (only: median)");
    }
    source_out = "median-heuristic";
    return median_heuristic_sigma(reader);
}

std::int64_t checked_r(std::int64_t rff_dim) {
    if (rff_dim < 2 || rff_dim % 2 != 0) {
        fkea::raise(fkea::errc::invalid_input,
                    "--rff-dim must be an even number >= 2 (it is the 2r feature count)");
    }
    return rff_dim / 2;
}

void print_scores(const fkea::DiversityReport& report) {
    std::cout << "n: " << report.n << "  d: " << report.d << "\n";
    std::cout << "sigma: " << report.sigma << " (" << report.sigma_source << ")\n";
    if (report.rff_dim) {
        std::cout << "rff_dim: " << *report.rff_dim << "  seed: " << *report.seed << "\n";
    }
    for (const auto& [alpha, score] : report.scores) {
        std::cout << "vendi(alpha=" << alpha.token << "): " << score << "\n";
    }
    std::cout << "rke: " << report.rke << "\n";
    if (report.bound) {
        std::cout << "spectrum error bound (delta=" << report.bound_delta
                  << "): " << *report.bound << "\n";
    }
    for (const auto& w : report.warnings) {
        std::cout << "warning: " << w << "\n";
    }
    const auto& t = report.timings;
    std::cout << "timings: read " << t.read_seconds << "s  accumulate " << t.accumulate_seconds
              << "s  solve " << t.solve_seconds << "s  total " << t.total_seconds << "s\n";
}

void spectrum_warnings(const fkea::EigenSpectrum& spectrum, std::vector<std::string>& out) {
    if (spectrum.clamp_warning()) {
        std::ostringstream msg;
        msg << "eigensolver produced negative mass beyond round-off: min eigenvalue "
            << spectrum.min_raw << ", clamped mass " << spectrum.clamped_mass;
        out.push_back(msg.str());
    }
}

// ---- score ----------------------------------------------------------------

struct ScoreOptions : CommonOptions {
    std::string checkpoint_in;
    std::string checkpoint_out;
};

int run_score(const ScoreOptions& opt) {
    fkea::set_max_threads(resolve_threads(opt.threads));
    const auto start = Clock::now();

    fkea::EmbeddingReader reader(opt.input);
    const std::int64_t r = checked_r(opt.rff_dim);
    const std::vector<fkea::Alpha> alphas = parse_alphas(opt.alphas);

    fkea::DiversityReport report;
    report.method = "fkea";
    report.n = reader.n();
    report.d = reader.d();
    report.sigma = resolve_sigma(opt, reader, report.sigma_source);
    report.rff_dim = opt.rff_dim;
    report.seed = opt.seed;

    const fkea::GaussianKernelSpec spec{report.sigma};
    const fkea::FourierBasis basis = fkea::sample_fourier_basis(reader.d(), r, spec, opt.seed);

    fkea::ProxyCovariance cov;
    if (!opt.checkpoint_in.empty()) {
        cov = fkea::load_checkpoint(opt.checkpoint_in);
        if (cov.fingerprint != fkea::basis_fingerprint(basis)) {
            fkea::raise(fkea::errc::basis_mismatch,
                        "checkpoint was accumulated under a different basis "
                        "(d/rff-dim/sigma/seed must match)");
        }
        if (cov.samples_seen > reader.n()) {
            fkea::raise(fkea::errc::data_error,
                        "checkpoint has seen more samples than the input holds");
        }
        reader.skip_rows(cov.samples_seen);
    } else {
        cov = fkea::make_accumulator(basis);
    }

    double read_seconds = 0.0;
    double accumulate_seconds = 0.0;
    while (true) {
        const auto t0 = Clock::now();
        fkea::EmbeddingSet batch = reader.next_batch(opt.batch);
        read_seconds += seconds_since(t0);
        if (batch.n() == 0) break;
        const auto t1 = Clock::now();
        fkea::accumulate(cov, batch, basis);
        accumulate_seconds += seconds_since(t1);
    }

    if (!opt.checkpoint_out.empty()) {
        fkea::save_checkpoint(cov, opt.checkpoint_out);
    }

    const auto t2 = Clock::now();
    report.rke = fkea::fkea_rke(cov);
    // Normalize in place rather than through normalized_covariance: at the
    // default 2r the sum matrix is large, and the eigensolver keeps its own
    // copy, so avoiding a second full-size buffer halves peak memory here.
    cov.sum_matrix /= static_cast<double>(cov.samples_seen);
    const fkea::EigenSpectrum spectrum = fkea::eigenvalues_sym(cov.sum_matrix);
    cov.sum_matrix.resize(0, 0);
    for (const fkea::Alpha& alpha : alphas) {
        report.scores.emplace_back(alpha, fkea::score_from_spectrum(spectrum, alpha));
    }
    report.timings.solve_seconds = seconds_since(t2);

    spectrum_warnings(spectrum, report.warnings);
    report.bound = fkea::theorem_bound(reader.n(), r, kBoundDelta);
    report.bound_delta = kBoundDelta;
    report.timings.read_seconds = read_seconds;
    report.timings.accumulate_seconds = accumulate_seconds;
    report.timings.total_seconds = seconds_since(start);

    if (!opt.output.empty()) {
        fkea::write_diversity_report(report, opt.output, parse_format(opt.format));
    }
    print_scores(report);
    return 0;
}

// ---- exact ----------------------------------------------------------------

struct ExactOptions : CommonOptions {
    std::int64_t cap = fkea::kDefaultExactCap;
};

int run_exact(const ExactOptions& opt) {
    fkea::set_max_threads(resolve_threads(opt.threads));
    const auto start = Clock::now();

    fkea::EmbeddingReader reader(opt.input);
    if (reader.n() > opt.cap) {
        fkea::raise(fkea::errc::capacity_error,
                    "exact path refused: n = " + std::to_string(reader.n()) + " exceeds cap " +
                        std::to_string(opt.cap) + "; use fkea score");
    }
    const std::vector<fkea::Alpha> alphas = parse_alphas(opt.alphas);

    fkea::DiversityReport report;
    report.method = "exact";
    report.n = reader.n();
    report.d = reader.d();
    report.sigma = resolve_sigma(opt, reader, report.sigma_source);

    const auto t0 = Clock::now();
    const fkea::EmbeddingSet e = fkea::read_embeddings(opt.input);
    report.timings.read_seconds = seconds_since(t0);

    const fkea::GaussianKernelSpec spec{report.sigma};
    const auto t1 = Clock::now();
    const fkea::GramMatrix gram = fkea::exact_gram(e, spec, opt.cap);
    const fkea::EigenSpectrum spectrum = fkea::eigenvalues_sym(gram.entries);
    for (const fkea::Alpha& alpha : alphas) {
        report.scores.emplace_back(alpha, fkea::score_from_spectrum(spectrum, alpha));
    }
    report.rke = fkea::exact_rke(e, spec, opt.cap);
    report.timings.solve_seconds = seconds_since(t1);

    spectrum_warnings(spectrum, report.warnings);
    report.timings.total_seconds = seconds_since(start);

    if (!opt.output.empty()) {
        fkea::write_diversity_report(report, opt.output, parse_format(opt.format));
    }
    print_scores(report);
    return 0;
}

// ---- modes ----------------------------------------------------------------

struct ModesOptions : CommonOptions {
    std::int64_t top_t = 10;
    std::int64_t top_k = 25;
    bool rank_by_abs = false;
};

int run_modes(const ModesOptions& opt) {
    fkea::set_max_threads(resolve_threads(opt.threads));

    fkea::EmbeddingReader reader(opt.input);
    const std::int64_t r = checked_r(opt.rff_dim);

    fkea::ModeReportContext ctx;
    ctx.n = reader.n();
    ctx.d = reader.d();
    ctx.sigma = resolve_sigma(opt, reader, ctx.sigma_source);
    ctx.rff_dim = opt.rff_dim;
    ctx.seed = opt.seed;
    ctx.rank_by_abs = opt.rank_by_abs;

    if (opt.top_k > reader.n()) {
        fkea::raise(fkea::errc::invalid_input,
                    "--top-k exceeds the sample count " + std::to_string(reader.n()));
    }

    const fkea::GaussianKernelSpec spec{ctx.sigma};
    const fkea::FourierBasis basis = fkea::sample_fourier_basis(reader.d(), r, spec, opt.seed);

    // Pass 1: covariance. Pass 2: mode scores and rankings.
    fkea::ProxyCovariance cov = fkea::make_accumulator(basis);
    while (true) {
        fkea::EmbeddingSet batch = reader.next_batch(opt.batch);
        if (batch.n() == 0) break;
        fkea::accumulate(cov, batch, basis);
    }

    const fkea::ModeBasis mb = fkea::top_eigenvectors(cov, opt.top_t);

    reader.reset();
    fkea::ModeRanker ranker(basis, mb, opt.top_k, opt.rank_by_abs);
    while (true) {
        fkea::EmbeddingSet batch = reader.next_batch(opt.batch);
        if (batch.n() == 0) break;
        ranker.consume(batch);
    }
    const fkea::ModeReport report = ranker.finish();

    if (!opt.output.empty()) {
        fkea::write_mode_report(report, ctx, opt.output, parse_format(opt.format));
    } else {
        std::cout << fkea::mode_report_json(report, ctx);
    }
    return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepOptions : CommonOptions {
    std::string r_list;
    int seeds = 5;
    bool class_sweep = false;
    std::int64_t t_max = 10;
    std::int64_t n_per_cluster = 200;
    std::int64_t mix_d = 1;
    double separation = 50.0;
    double cluster_std = 1.0;
    std::int64_t cap = fkea::kDefaultExactCap;
};

// FKEA spectrum via the n x n feature Gram (1/n) Phi Phi^T, which shares the
// covariance's nonzero eigenvalues but keeps the solve at size n.
fkea::EigenSpectrum fkea_spectrum_small(const fkea::EmbeddingSet& e,
                                        const fkea::FourierBasis& basis) {
    const fkea::RowMat phi = fkea::feature_matrix(basis, e);
    fkea::Mat gram = phi * phi.transpose();
    gram /= static_cast<double>(e.n());
    // The product above is symmetric only to round-off; make it exact.
    for (std::int64_t j = 0; j < gram.cols(); ++j) {
        for (std::int64_t i = j + 1; i < gram.rows(); ++i) {
            gram(j, i) = gram(i, j);
        }
    }
    return fkea::eigenvalues_sym(gram);
}

int run_sweep(const SweepOptions& opt) {
    fkea::set_max_threads(resolve_threads(opt.threads));
    if (opt.output.empty()) {
        fkea::raise(fkea::errc::invalid_input, "sweep requires --output for the CSV");
    }
    const std::vector<fkea::Alpha> alphas = parse_alphas(opt.alphas);

    std::string csv = "parameter,seed,alpha,score,error_vs_exact,bound\n";
    auto emit = [&csv](std::int64_t parameter, std::uint64_t seed, const std::string& alpha,
                       double score, double error, double bound) {
        std::ostringstream row;
        row.precision(17);
        row << parameter << ',' << seed << ',' << alpha << ',' << score << ',' << error << ','
            << bound << '\n';
        csv += row.str();
    };

    if (opt.class_sweep) {
        // Cluster-count sweep on synthetic mixtures; exact scores on the same
        // data are the error reference.
        if (opt.t_max < 1) {
            fkea::raise(fkea::errc::invalid_input, "--t-max must be >= 1");
        }
        if (!opt.sigma) {
            fkea::raise(fkea::errc::invalid_input, "class sweep requires --sigma");
        }
        const fkea::GaussianKernelSpec spec{*opt.sigma};
        const std::int64_t r = checked_r(opt.rff_dim);

        for (std::int64_t t = 1; t <= opt.t_max; ++t) {
            fkea::MixtureSpec mix;
            mix.t = t;
            mix.n_per_cluster = opt.n_per_cluster;
            mix.d = opt.mix_d;
            mix.center_separation = opt.separation;
            mix.cluster_std = opt.cluster_std;
            mix.seed = opt.seed + static_cast<std::uint64_t>(t);
            const fkea::LabeledSet data = fkea::gen_mixture(mix);

            const fkea::FourierBasis basis =
                fkea::sample_fourier_basis(mix.d, r, spec, opt.seed);
            const fkea::EigenSpectrum fkea_spec = fkea_spectrum_small(data.points, basis);
            const fkea::GramMatrix gram = fkea::exact_gram(data.points, spec, opt.cap);
            const fkea::EigenSpectrum exact_spec = fkea::eigenvalues_sym(gram.entries);
            const double bound = fkea::theorem_bound(data.points.n(), r, kBoundDelta);

            for (const fkea::Alpha& alpha : alphas) {
                const double score = fkea::score_from_spectrum(fkea_spec, alpha);
                const double exact = fkea::score_from_spectrum(exact_spec, alpha);
                emit(t, opt.seed, alpha.token, score, std::abs(score - exact) / exact, bound);
            }
        }
    } else {
        if (opt.r_list.empty()) {
            fkea::raise(fkea::errc::invalid_input,
                        "sweep needs --r-list or --class-sweep");
        }
        fkea::EmbeddingReader reader(opt.input);
        if (reader.n() > opt.cap) {
            fkea::raise(fkea::errc::capacity_error,
                        "r sweep needs the exact baseline: n = " + std::to_string(reader.n()) +
                            " exceeds cap " + std::to_string(opt.cap));
        }
        CommonOptions sigma_opt = opt;
        std::string sigma_source;
        const double sigma = resolve_sigma(sigma_opt, reader, sigma_source);
        const fkea::GaussianKernelSpec spec{sigma};

        std::vector<std::int64_t> r_values;
        std::stringstream ss(opt.r_list);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (token.empty()) continue;
            try {
                r_values.push_back(std::stoll(token));
            } catch (...) {
                fkea::raise(fkea::errc::invalid_input, "bad r value '" + token + "'");
            }
            if (r_values.back() < 1) {
                fkea::raise(fkea::errc::invalid_input, "r values must be >= 1");
            }
        }
        if (r_values.empty() || opt.seeds < 1) {
            fkea::raise(fkea::errc::invalid_input, "r sweep needs r values and --seeds >= 1");
        }

        const fkea::EmbeddingSet e = fkea::read_embeddings(opt.input);
        const fkea::GramMatrix gram = fkea::exact_gram(e, spec, opt.cap);
        const fkea::EigenSpectrum exact_spec = fkea::eigenvalues_sym(gram.entries);

        for (std::int64_t r : r_values) {
            const double bound = fkea::theorem_bound(e.n(), r, kBoundDelta);
            for (int s = 0; s < opt.seeds; ++s) {
                const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(s);
                const fkea::FourierBasis basis = fkea::sample_fourier_basis(e.d(), r, spec, seed);
                const fkea::EigenSpectrum fkea_spec = fkea_spectrum_small(e, basis);
                const double err = fkea::spectrum_error(exact_spec, fkea_spec);
                for (const fkea::Alpha& alpha : alphas) {
                    emit(r, seed, alpha.token, fkea::score_from_spectrum(fkea_spec, alpha), err,
                         bound);
                }
            }
        }
    }

    std::ofstream out(opt.output, std::ios::binary | std::ios::trunc);
    if (!out) {
        fkea::raise(fkea::errc::io_error, "cannot open for writing: " + opt.output);
    }
    out << csv;
    if (!out) {
        fkea::raise(fkea::errc::io_error, "failed writing " + opt.output);
    }
    std::cout << "wrote " << opt.output << "\n";
    return 0;
}

// ---- gen ------------------------------------------------------------------

struct GenOptions {
    std::int64_t t = 1;
    std::int64_t n_per_cluster = 1;
    std::int64_t d = 1;
    double separation = 1.0;
    double cluster_std = 1.0;
    std::uint64_t seed = 0;
    std::string output;
    std::string labels;
    std::string dtype = "f32";
};

int run_gen(const GenOptions& opt) {
    fkea::MixtureSpec mix;
    mix.t = opt.t;
    mix.n_per_cluster = opt.n_per_cluster;
    mix.d = opt.d;
    mix.center_separation = opt.separation;
    mix.cluster_std = opt.cluster_std;
    mix.seed = opt.seed;

    fkea::Dtype dtype;
    if (opt.dtype == "f32") {
        dtype = fkea::Dtype::f32;
    } else if (opt.dtype == "f64") {
        dtype = fkea::Dtype::f64;
    } else {
        fkea::raise(fkea::errc::invalid_input, "--dtype must be f32 or f64");
    }

    const fkea::LabeledSet data = fkea::gen_mixture(mix);
    fkea::write_embeddings(opt.output, data.points, dtype);
    if (!opt.labels.empty()) {
        fkea::write_labels_csv(opt.labels, data.labels);
    }
    std::cout << "wrote " << data.points.n() << " x " << data.points.d() << " samples to "
              << opt.output << "\n";
    return 0;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_input = true) {
    if (with_input) {
        cmd->add_option("--input", opt.input, "embedding file (.fkea binary or .csv)")
            ->required();
    }
    cmd->add_option("--rff-dim", opt.rff_dim, "Fourier feature count 2r (even)")
        ->capture_default_str();
    cmd->add_option("--alphas", opt.alphas, "comma-separated Renyi orders")
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "basis RNG seed")->capture_default_str();
    cmd->add_option("--batch", opt.batch, "rows per streamed batch")->capture_default_str();
    cmd->add_option("--threads", opt.threads, "worker threads (default: FKEA_THREADS or cores)");
    cmd->add_option("--output", opt.output, "report file path");
    cmd->add_option("--format", opt.format, "report format: json or csv")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diversity scores for embedding collections via random Fourier features"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("fkea ") + fkea::kVersion);

    ScoreOptions score_opt;
    auto* score = app.add_subcommand("score", "streaming FKEA diversity scores");
    add_common_flags(score, score_opt);
    add_sigma_flags(score, score_opt);
    score->add_option("--checkpoint-in", score_opt.checkpoint_in,
                      "resume accumulation from this checkpoint");
    score->add_option("--checkpoint-out", score_opt.checkpoint_out,
                      "write the finished accumulator here");

    ExactOptions exact_opt;
    auto* exact = app.add_subcommand("exact", "exact Gram-matrix baseline scores");
    add_common_flags(exact, exact_opt);
    add_sigma_flags(exact, exact_opt);
    exact->add_option("--cap", exact_opt.cap, "largest n the exact path accepts")
        ->capture_default_str();

    ModesOptions modes_opt;
    auto* modes = app.add_subcommand("modes", "top modes with ranked samples");
    add_common_flags(modes, modes_opt);
    add_sigma_flags(modes, modes_opt);
    modes->add_option("--top-t", modes_opt.top_t, "number of modes")->capture_default_str();
    modes->add_option("--top-k", modes_opt.top_k, "samples listed per mode")
        ->capture_default_str();
    modes->add_flag("--rank-by-abs", modes_opt.rank_by_abs,
                    "rank samples by |score| instead of raw score");

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "convergence / cluster-count sweeps to CSV");
    add_common_flags(sweep, sweep_opt, false);
    sweep->add_option("--input", sweep_opt.input, "embedding file (r sweeps)");
    add_sigma_flags(sweep, sweep_opt);
    sweep->add_option("--r-list", sweep_opt.r_list, "comma-separated r values to sweep");
    sweep->add_option("--seeds", sweep_opt.seeds, "basis seeds per r value")
        ->capture_default_str();
    sweep->add_flag("--class-sweep", sweep_opt.class_sweep,
                    "sweep planted cluster count t = 1..t-max on synthetic mixtures");
    sweep->add_option("--t-max", sweep_opt.t_max, "largest cluster count")
        ->capture_default_str();
    sweep->add_option("--n-per-cluster", sweep_opt.n_per_cluster, "samples per cluster")
        ->capture_default_str();
    sweep->add_option("--mix-d", sweep_opt.mix_d, "mixture dimension")->capture_default_str();
    sweep->add_option("--separation", sweep_opt.separation, "minimum center separation")
        ->capture_default_str();
    sweep->add_option("--cluster-std", sweep_opt.cluster_std, "within-cluster std")
        ->capture_default_str();
    sweep->add_option("--cap", sweep_opt.cap, "largest n the exact baseline accepts")
        ->capture_default_str();

    GenOptions gen_opt;
    auto* gen = app.add_subcommand("gen", "generate synthetic mixture embeddings");
    gen->add_option("--t", gen_opt.t, "cluster count")->capture_default_str();
    gen->add_option("--n-per-cluster", gen_opt.n_per_cluster, "samples per cluster")
        ->capture_default_str();
    gen->add_option("--d", gen_opt.d, "dimension")->capture_default_str();
    gen->add_option("--separation", gen_opt.separation, "minimum center separation")
        ->capture_default_str();
    gen->add_option("--std", gen_opt.cluster_std, "within-cluster std")->capture_default_str();
    gen->add_option("--seed", gen_opt.seed, "generator seed")->capture_default_str();
    gen->add_option("--output", gen_opt.output, "embedding file to write")->required();
    gen->add_option("--labels", gen_opt.labels, "labels CSV to write");
    gen->add_option("--dtype", gen_opt.dtype, "payload precision: f32 or f64")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "fkea: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*score) return run_score(score_opt);
        if (*exact) return run_exact(exact_opt);
        if (*modes) return run_modes(modes_opt);
        if (*sweep) return run_sweep(sweep_opt);
        if (*gen) return run_gen(gen_opt);
    } catch (const fkea::Error& e) {
        std::cerr << "fkea: " << e.what() << "\n";
        return fkea::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "fkea: internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
