#include "fkea/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fkea {

EigenSpectrum eigenvalues_sym(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        raise(errc::invalid_input, "eigenvalues_sym expects a non-empty square matrix");
    }
    if (!m.allFinite()) {
        raise(errc::data_error, "eigenvalues_sym: matrix has non-finite entries");
    }
    double asym = 0.0;
    for (std::int64_t j = 0; j < m.cols(); ++j) {
        for (std::int64_t i = j + 1; i < m.rows(); ++i) {
            asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
        }
    }
    if (asym > 1e-10) {
        raise(errc::invalid_input,
              "eigenvalues_sym: asymmetry " + std::to_string(asym) + " exceeds 1e-10");
    }

    Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        raise(errc::numeric_error, "symmetric eigensolver did not converge");
    }

    // Eigen returns ascending order; the spectrum contract is descending.
    EigenSpectrum s;
    s.source_dim = m.rows();
    s.values = solver.eigenvalues().reverse();

    s.min_raw = s.values.minCoeff();
    s.clamped_mass = 0.0;
    for (std::int64_t i = 0; i < s.values.size(); ++i) {
        if (s.values[i] < 0.0) {
            s.clamped_mass -= s.values[i];
            s.values[i] = 0.0;
        }
    }

    const double total = s.values.sum();
    if (!(total > 0.0)) {
        raise(errc::numeric_error, "spectrum has no positive mass after clamping");
    }
    s.values /= total;
    return s;
}

double renyi_entropy(const EigenSpectrum& s, const Alpha& alpha) {
    alpha.validate();
    if (s.values.size() < 1) {
        raise(errc::invalid_input, "empty spectrum");
    }

    double h = 0.0;
    if (alpha.infinite) {
        h = -std::log(s.values[0]);
    } else if (alpha.is_one()) {
        // Shannon limit, with 0 log 0 := 0.
        for (std::int64_t i = 0; i < s.values.size(); ++i) {
            const double v = s.values[i];
            if (v > 0.0) h -= v * std::log(v);
        }
    } else {
        double powersum = 0.0;
        for (std::int64_t i = 0; i < s.values.size(); ++i) {
            const double v = s.values[i];
            if (v > 0.0) powersum += std::pow(v, alpha.value);
        }
        h = std::log(powersum) / (1.0 - alpha.value);
    }
    // A unit-mass spectrum has nonnegative entropy; round-off may dip a hair
    // below zero on degenerate inputs.
    return std::max(h, 0.0);
}

double score_from_spectrum(const EigenSpectrum& s, const Alpha& alpha) {
    return std::exp(renyi_entropy(s, alpha));
}

double fkea_vendi(const ProxyCovariance& cov, const Alpha& alpha) {
    alpha.validate();
    const Mat c = normalized_covariance(cov);
    return score_from_spectrum(eigenvalues_sym(c), alpha);
}

double fkea_rke(const ProxyCovariance& cov) {
    if (cov.samples_seen < 1) {
        raise(errc::invalid_input, "accumulator is empty");
    }
    const double n = static_cast<double>(cov.samples_seen);
    const double frob2 = cov.sum_matrix.squaredNorm() / (n * n);
    return 1.0 / frob2;
}

double theorem_bound(std::int64_t n, std::int64_t r, double delta) {
    if (n < 1 || r < 1) {
        raise(errc::invalid_input, "theorem_bound needs n >= 1 and r >= 1");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
        raise(errc::invalid_input, "theorem_bound needs 0 < delta < 1");
    }
    // Degenerate n < 2*delta would make the log negative; the bound is
    // vacuously 0 there.
    const double log_term = std::max(0.0, std::log(static_cast<double>(n) / (2.0 * delta)));
    return std::sqrt(8.0 * log_term / static_cast<double>(r));
}

double spectrum_error(const EigenSpectrum& exact, const EigenSpectrum& approx) {
    const std::int64_t len = std::max(exact.values.size(), approx.values.size());
    double sum = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
        const double a = i < exact.values.size() ? exact.values[i] : 0.0;
        const double b = i < approx.values.size() ? approx.values[i] : 0.0;
        sum += (a - b) * (a - b);
    }
    return std::sqrt(sum);
}

}  // namespace fkea
