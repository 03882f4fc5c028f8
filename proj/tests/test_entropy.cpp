#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fkea/entropy.hpp"
#include "fkea/kernel.hpp"
#include "fkea/rff.hpp"
#include "fkea/rng.hpp"

namespace {

fkea::EmbeddingSet random_set(std::int64_t n, std::int64_t d, std::uint64_t seed) {
    fkea::Rng rng(seed);
    fkea::EmbeddingSet e;
    e.data.resize(n, d);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < d; ++j) e.data(i, j) = rng.normal();
    }
    return e;
}

fkea::EigenSpectrum spectrum_of(std::initializer_list<double> values) {
    fkea::EigenSpectrum s;
    s.values.resize(static_cast<std::int64_t>(values.size()));
    std::int64_t i = 0;
    for (double v : values) s.values(i++) = v;
    s.source_dim = s.values.size();
    return s;
}

// Independent eigenvalue oracle: cyclic Jacobi rotations, a different
// algorithm family from the tridiagonalization the library uses.
std::vector<double> jacobi_eigenvalues(fkea::Mat m) {
    const std::int64_t n = m.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        }
        if (off < 1e-28) break;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                if (m(p, q) == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::int64_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::int64_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> eigs(n);
    for (std::int64_t i = 0; i < n; ++i) eigs[i] = m(i, i);
    std::sort(eigs.begin(), eigs.end(), std::greater<>());
    return eigs;
}

fkea::ProxyCovariance accumulate_all(const fkea::EmbeddingSet& e,
                                     const fkea::FourierBasis& basis) {
    fkea::ProxyCovariance cov = fkea::make_accumulator(basis);
    fkea::accumulate(cov, e, basis);
    return cov;
}

}  // namespace

TEST_CASE("renyi entropy matches hand-computed values") {
    const fkea::EigenSpectrum s = spectrum_of({0.7, 0.3});
    CHECK(fkea::renyi_entropy(s, fkea::Alpha::finite(2.0)) ==
          doctest::Approx(0.5447271754416722).epsilon(1e-15));
    CHECK(fkea::renyi_entropy(s, fkea::Alpha::finite(1.0)) ==
          doctest::Approx(0.6108643020548935).epsilon(1e-15));
    CHECK(fkea::renyi_entropy(s, fkea::Alpha::finite(0.5)) ==
          doctest::Approx(0.650508505098256).epsilon(1e-15));
    CHECK(fkea::renyi_entropy(s, fkea::Alpha::infinity()) ==
          doctest::Approx(0.35667494393873245).epsilon(1e-15));
}

TEST_CASE("renyi entropy of a point mass is zero at every order") {
    const fkea::EigenSpectrum s = spectrum_of({1.0, 0.0, 0.0});
    for (double a : {0.3, 0.9, 1.0, 1.7, 2.0, 5.0}) {
        CHECK(fkea::renyi_entropy(s, fkea::Alpha::finite(a)) == 0.0);
    }
    CHECK(fkea::renyi_entropy(s, fkea::Alpha::infinity()) == 0.0);
}

TEST_CASE("renyi entropy of a uniform spectrum is log m at every order") {
    for (int m : {2, 5, 16}) {
        fkea::EigenSpectrum s;
        s.values = fkea::Vec::Constant(m, 1.0 / m);
        s.source_dim = m;
        const double expected = std::log(static_cast<double>(m));
        for (double a : {0.5, 1.0, 1.5, 2.0}) {
            CHECK(fkea::renyi_entropy(s, fkea::Alpha::finite(a)) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
        CHECK(fkea::renyi_entropy(s, fkea::Alpha::infinity()) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("orders within the alpha=1 window take the Shannon limit") {
    const fkea::EigenSpectrum s = spectrum_of({0.6, 0.25, 0.15});
    const double shannon = fkea::renyi_entropy(s, fkea::Alpha::finite(1.0));
    CHECK(fkea::renyi_entropy(s, fkea::Alpha::finite(1.0 + 1e-10)) == shannon);
    CHECK(fkea::renyi_entropy(s, fkea::Alpha::finite(1.0 - 1e-10)) == shannon);
}

TEST_CASE("non-positive orders are rejected") {
    CHECK_THROWS_AS(fkea::Alpha::finite(0.0).validate(), fkea::Error);
    CHECK_THROWS_AS(fkea::Alpha::finite(-2.0).validate(), fkea::Error);
    CHECK_THROWS_AS(fkea::Alpha::parse("0"), fkea::Error);
    CHECK_THROWS_AS(fkea::Alpha::parse("nope"), fkea::Error);
    CHECK(fkea::Alpha::parse("inf").infinite);
    CHECK(fkea::Alpha::parse("1.5").value == 1.5);
}

TEST_CASE("eigenvalues of a scaled identity are uniform") {
    const int m = 12;
    const fkea::Mat id = fkea::Mat::Identity(m, m) / m;
    const fkea::EigenSpectrum s = fkea::eigenvalues_sym(id);
    REQUIRE(s.values.size() == m);
    for (int i = 0; i < m; ++i) {
        CHECK(s.values(i) == doctest::Approx(1.0 / m).epsilon(1e-14));
    }
    CHECK(s.clamped_mass == 0.0);
}

TEST_CASE("eigenvalues of a unit-trace rank-1 matrix are a point mass") {
    fkea::Rng rng(4);
    fkea::Vec v(9);
    for (int i = 0; i < 9; ++i) v(i) = rng.normal();
    v /= v.norm();
    const fkea::Mat m = v * v.transpose();
    const fkea::EigenSpectrum s = fkea::eigenvalues_sym(m);
    CHECK(s.values(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < 9; ++i) {
        CHECK(std::abs(s.values(i)) <= 1e-12);
    }
}

TEST_CASE("eigenvalues match an independent Jacobi-rotation oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        fkea::Rng rng(300 + seed);
        fkea::Mat a(8, 8);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) a(i, j) = rng.normal();
        }
        fkea::Mat psd = a * a.transpose();
        psd /= psd.trace();
        for (int j = 0; j < 8; ++j) {
            for (int i = j + 1; i < 8; ++i) psd(j, i) = psd(i, j);
        }

        const fkea::EigenSpectrum s = fkea::eigenvalues_sym(psd);
        const std::vector<double> oracle = jacobi_eigenvalues(psd);
        REQUIRE(s.values.size() == 8);
        for (int i = 0; i < 8; ++i) {
            CHECK(s.values(i) == doctest::Approx(oracle[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("spectra come back sorted, clamped, and unit-sum") {
    const fkea::EmbeddingSet e = random_set(30, 4, 88);
    const fkea::GramMatrix g = fkea::exact_gram(e, fkea::GaussianKernelSpec{0.9});
    const fkea::EigenSpectrum s = fkea::eigenvalues_sym(g.entries);
    for (std::int64_t i = 1; i < s.values.size(); ++i) {
        CHECK(s.values(i) <= s.values(i - 1));
    }
    CHECK(s.values.minCoeff() >= 0.0);
    CHECK(s.values.sum() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("asymmetric input is rejected") {
    fkea::Mat m = fkea::Mat::Identity(4, 4);
    m(1, 2) = 1e-6;
    try {
        fkea::eigenvalues_sym(m);
        FAIL("expected an input error");
    } catch (const fkea::Error& err) {
        CHECK(err.code() == fkea::errc::invalid_input);
    }
}

TEST_CASE("negative eigenvalues clamp silently inside the round-off window") {
    fkea::Mat m = fkea::Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1e-11;
    const fkea::EigenSpectrum s = fkea::eigenvalues_sym(m);
    CHECK(s.values(1) == 0.0);
    CHECK_FALSE(s.clamp_warning());
}

TEST_CASE("negative eigenvalues beyond round-off raise the warning flag") {
    fkea::Mat m = fkea::Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1e-5;
    const fkea::EigenSpectrum s = fkea::eigenvalues_sym(m);
    CHECK(s.values.minCoeff() >= 0.0);
    CHECK(s.values.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.clamp_warning());
}

TEST_CASE("theorem bound evaluates the closed form") {
    CHECK(fkea::theorem_bound(10000, 8000, 0.05) ==
          doctest::Approx(0.10729830131446737).epsilon(1e-15));
    // n/(2*delta) = 1 makes the log term vanish.
    CHECK(fkea::theorem_bound(1, 1, 0.5) == 0.0);
}

TEST_CASE("doubling r divides the bound by sqrt(2)") {
    const double b1 = fkea::theorem_bound(5000, 1000, 0.05);
    const double b2 = fkea::theorem_bound(5000, 2000, 0.05);
    CHECK(b2 == doctest::Approx(b1 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("theorem bound validates its arguments") {
    CHECK_THROWS_AS(fkea::theorem_bound(100, 100, 0.0), fkea::Error);
    CHECK_THROWS_AS(fkea::theorem_bound(100, 100, 1.0), fkea::Error);
    CHECK_THROWS_AS(fkea::theorem_bound(100, 100, -0.1), fkea::Error);
    CHECK_THROWS_AS(fkea::theorem_bound(0, 100, 0.05), fkea::Error);
    CHECK_THROWS_AS(fkea::theorem_bound(100, 0, 0.05), fkea::Error);
}

TEST_CASE("spectrum error handles padding and hand cases") {
    const fkea::EigenSpectrum a = spectrum_of({1.0});
    const fkea::EigenSpectrum b = spectrum_of({0.5, 0.5});
    const fkea::EigenSpectrum c = spectrum_of({1.0, 0.0, 0.0});
    CHECK(fkea::spectrum_error(a, a) == 0.0);
    CHECK(fkea::spectrum_error(a, c) == 0.0);
    CHECK(fkea::spectrum_error(a, b) ==
          doctest::Approx(0.7071067811865476).epsilon(1e-15));
    CHECK(fkea::spectrum_error(b, a) == fkea::spectrum_error(a, b));
}

TEST_CASE("a single sample scores one at every order") {
    const fkea::EmbeddingSet e = random_set(1, 6, 9);
    const fkea::FourierBasis basis =
        fkea::sample_fourier_basis(6, 32, fkea::GaussianKernelSpec{1.0}, 5);
    const fkea::ProxyCovariance cov = accumulate_all(e, basis);
    CHECK(fkea::fkea_rke(cov) == doctest::Approx(1.0).epsilon(1e-12));
    // Orders below 1 amplify the ~1e-17 dust the eigensolver leaves in the
    // zero eigenvalues, hence the looser tolerance there.
    CHECK(fkea::fkea_vendi(cov, fkea::Alpha::finite(0.5)) ==
          doctest::Approx(1.0).epsilon(1e-6));
    for (double a : {1.0, 2.0, 7.0}) {
        CHECK(fkea::fkea_vendi(cov, fkea::Alpha::finite(a)) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(fkea::fkea_vendi(cov, fkea::Alpha::infinity()) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("duplicating one sample leaves the scores at one") {
    fkea::EmbeddingSet e;
    e.data.resize(7, 3);
    fkea::Rng rng(21);
    fkea::Vec x(3);
    for (int j = 0; j < 3; ++j) x(j) = rng.normal();
    for (int i = 0; i < 7; ++i) e.data.row(i) = x.transpose();
    const fkea::FourierBasis basis =
        fkea::sample_fourier_basis(3, 40, fkea::GaussianKernelSpec{0.5}, 77);
    const fkea::ProxyCovariance cov = accumulate_all(e, basis);
    CHECK(fkea::fkea_rke(cov) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("RKE equals the order-2 score on arbitrary accumulators") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto n = static_cast<std::int64_t>(10 + 31 * seed);
        const fkea::EmbeddingSet e = random_set(n, 5, 500 + seed);
        const fkea::FourierBasis basis =
            fkea::sample_fourier_basis(5, 64, fkea::GaussianKernelSpec{1.1}, seed);
        const fkea::ProxyCovariance cov = accumulate_all(e, basis);
        const double rke = fkea::fkea_rke(cov);
        const double vendi2 = fkea::fkea_vendi(cov, fkea::Alpha::finite(2.0));
        CHECK(rke == doctest::Approx(vendi2).epsilon(1e-8));
    }
}

TEST_CASE("scores stay in range and fall as alpha grows") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const std::int64_t n = 40;
        const std::int64_t r = 24;
        const fkea::EmbeddingSet e = random_set(n, 4, 600 + seed);
        const fkea::FourierBasis basis =
            fkea::sample_fourier_basis(4, r, fkea::GaussianKernelSpec{0.8}, seed);
        const fkea::ProxyCovariance cov = accumulate_all(e, basis);

        const double cap = static_cast<double>(std::min(n, 2 * r));
        double previous = cap + 1.0;
        for (double a : {0.5, 1.0, 1.5, 2.0, 4.0}) {
            const double score = fkea::fkea_vendi(cov, fkea::Alpha::finite(a));
            CHECK(score >= 1.0);
            CHECK(score <= cap * (1.0 + 1e-9));
            CHECK(score <= previous * (1.0 + 1e-12));
            previous = score;
        }
    }
}

TEST_CASE("empty accumulators are rejected") {
    const fkea::FourierBasis basis =
        fkea::sample_fourier_basis(3, 16, fkea::GaussianKernelSpec{1.0}, 1);
    const fkea::ProxyCovariance cov = fkea::make_accumulator(basis);
    CHECK_THROWS_AS(fkea::fkea_rke(cov), fkea::Error);
    CHECK_THROWS_AS(fkea::fkea_vendi(cov, fkea::Alpha::finite(2.0)), fkea::Error);
}

TEST_CASE("streaming RKE tracks the exact score on random data") {
    // n = 500, 2r = 16,000, sigma = median pairwise distance; the streaming
    // estimate must land within 2% of the dense baseline.
    const fkea::EmbeddingSet e = random_set(500, 8, 2026);
    std::vector<double> dists;
    for (int i = 0; i < 500; ++i) {
        for (int j = i + 1; j < 500; ++j) {
            dists.push_back((e.data.row(i) - e.data.row(j)).norm());
        }
    }
    std::nth_element(dists.begin(), dists.begin() + (dists.size() - 1) / 2, dists.end());
    const double sigma = dists[(dists.size() - 1) / 2];
    const fkea::GaussianKernelSpec spec{sigma};

    const fkea::FourierBasis basis = fkea::sample_fourier_basis(8, 8000, spec, 3);
    const fkea::ProxyCovariance cov = accumulate_all(e, basis);
    const double approx = fkea::fkea_rke(cov);
    const double exact = fkea::exact_rke(e, spec);
    CHECK(std::abs(approx - exact) / exact < 0.02);
}

TEST_CASE("streaming order-1.5 score tracks the exact score on random data") {
    // Same spectrum as the full covariance, solved at size n via the feature
    // Gram (1/n) Phi Phi^T, keeping this test fast at 2r = 16,000.
    const fkea::EmbeddingSet e = random_set(1000, 6, 31);
    std::vector<double> dists;
    for (int i = 0; i < 200; ++i) {
        for (int j = i + 1; j < 200; ++j) {
            dists.push_back((e.data.row(i) - e.data.row(j)).norm());
        }
    }
    std::nth_element(dists.begin(), dists.begin() + (dists.size() - 1) / 2, dists.end());
    const fkea::GaussianKernelSpec spec{dists[(dists.size() - 1) / 2]};

    const fkea::FourierBasis basis = fkea::sample_fourier_basis(6, 8000, spec, 12);
    const fkea::RowMat phi = fkea::feature_matrix(basis, e);
    fkea::Mat gram = phi * phi.transpose();
    gram /= 1000.0;
    for (int j = 0; j < 1000; ++j) {
        for (int i = j + 1; i < 1000; ++i) gram(j, i) = gram(i, j);
    }
    const fkea::Alpha alpha = fkea::Alpha::finite(1.5);
    const double approx = fkea::score_from_spectrum(fkea::eigenvalues_sym(gram), alpha);
    const double exact = fkea::exact_vendi(e, spec, alpha);
    CHECK(std::abs(approx - exact) / exact < 0.02);
}

TEST_CASE("spectrum error obeys the bound and shrinks with r") {
    // Cut-down convergence check; the full-size sweep lives in the
    // acceptance suite.
    const fkea::EmbeddingSet e = random_set(200, 4, 77);
    const fkea::GaussianKernelSpec spec{1.5};
    const fkea::GramMatrix g = fkea::exact_gram(e, spec);
    const fkea::EigenSpectrum exact = fkea::eigenvalues_sym(g.entries);

    std::vector<double> medians;
    for (std::int64_t r : {64, 256}) {
        const double bound = fkea::theorem_bound(200, r, 0.05);
        std::vector<double> errors;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const fkea::FourierBasis basis = fkea::sample_fourier_basis(4, r, spec, seed);
            const fkea::ProxyCovariance cov = accumulate_all(e, basis);
            const fkea::EigenSpectrum approx =
                fkea::eigenvalues_sym(fkea::normalized_covariance(cov));
            const double err = fkea::spectrum_error(exact, approx);
            CHECK(err <= bound);
            errors.push_back(err);
        }
        std::sort(errors.begin(), errors.end());
        medians.push_back(errors[4]);
    }
    CHECK(medians[1] <= medians[0]);
}
