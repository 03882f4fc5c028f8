#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fkea/alpha.hpp"
#include "fkea/common.hpp"
#include "fkea/rff.hpp"

namespace fkea {

// Descending, nonnegative, renormalized to sum 1. clamped_mass records how
// much negative round-off mass the solve produced; a matrix that is PSD in
// exact arithmetic should only yield negatives within a few ulp, so either a
// single eigenvalue below -1e-9 or total clamped mass of 1e-6 marks the
// spectrum as suspect.
struct EigenSpectrum {
    Vec values;
    std::int64_t source_dim = 0;
    double clamped_mass = 0.0;
    double min_raw = 0.0;  // most negative eigenvalue before clamping

    bool clamp_warning() const { return clamped_mass >= 1e-6 || min_raw < -1e-9; }
};

// Full spectrum of a symmetric matrix, clamped at zero and renormalized.
// Asymmetry beyond 1e-10 (relative to the largest entry) is rejected.
EigenSpectrum eigenvalues_sym(const Mat& m);

// H_alpha = (1/(1-alpha)) log(sum_i lambda_i^alpha), natural log. alpha = 1
// is the Shannon limit -sum lambda log lambda (0 log 0 := 0); alpha = inf is
// -log(lambda_max).
double renyi_entropy(const EigenSpectrum& s, const Alpha& alpha);

// exp(H_alpha), the effective number of distinct samples under order alpha.
double score_from_spectrum(const EigenSpectrum& s, const Alpha& alpha);

// exp(H_alpha) of the proxy covariance spectrum.
double fkea_vendi(const ProxyCovariance& cov, const Alpha& alpha);

// Inverse squared Frobenius norm of the normalized proxy covariance; equals
// fkea_vendi(cov, 2) without the eigendecomposition.
double fkea_rke(const ProxyCovariance& cov);

// Eigenvalue-vector L2 error bound sqrt(8 ln(n / (2 delta)) / r), holding
// with probability at least 1 - delta over the basis draw. The log term is
// clamped at 0 (for n < 2 delta the formula has nothing to say).
double theorem_bound(std::int64_t n, std::int64_t r, double delta);

// L2 distance between descending spectra, the shorter zero-padded.
double spectrum_error(const EigenSpectrum& exact, const EigenSpectrum& approx);

struct ReportTimings {
    double read_seconds = 0.0;
    double accumulate_seconds = 0.0;
    double solve_seconds = 0.0;
    double total_seconds = 0.0;
};

// Scores per requested order plus provenance. Timings live here for the
// stdout summary but are never serialized (report files must be
// reproducible byte for byte).
struct DiversityReport {
    std::vector<std::pair<Alpha, double>> scores;
    double rke = 0.0;

    std::string method;  // "fkea" or "exact"
    std::int64_t n = 0;
    std::int64_t d = 0;
    double sigma = 0.0;
    std::string sigma_source = "user";
    std::optional<std::int64_t> rff_dim;    // fkea only
    std::optional<std::uint64_t> seed;      // fkea only
    std::optional<double> bound;            // theorem_bound at delta below
    double bound_delta = 0.05;
    std::vector<std::string> warnings;

    ReportTimings timings;
};

}  // namespace fkea
