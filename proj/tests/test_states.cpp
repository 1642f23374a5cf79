#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qpt/pom.hpp"
#include "qpt/states.hpp"
#include "support.hpp"

using namespace qpt;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) {
    return (a - b).max_abs();
}

// Reduced state of qubit 1 (trace over qubit 2).
Mat reduced_first(const Mat& rho) {
    Mat r(2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) r(i, k) += rho(2 * i + j, 2 * k + j);
    return r;
}

Mat reduced_second(const Mat& rho) {
    Mat r(2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) r(i, k) += rho(2 * j + i, 2 * j + k);
    return r;
}

int numerical_rank(const Mat& rho) {
    const EigenSystem es = eig_hermitian(rho);
    int rank = 0;
    for (int k = 0; k < es.dim; ++k)
        if (es.values[k] > 1e-12) ++rank;
    return rank;
}

}  // namespace

TEST_CASE("Bell states are pure projectors with the right matrix elements") {
    const DensityMatrix rho0 = bell_state(BellState::psi_minus);
    CHECK(purity(rho0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(rho0.matrix()(1, 1).real() == doctest::Approx(0.5));
    CHECK(rho0.matrix()(1, 2).real() == doctest::Approx(-0.5));
    CHECK(rho0.matrix()(1, 2).imag() == doctest::Approx(0.0));

    // Pauli expansion: rho_0 = (1 - sx x sx - sy x sy - sz x sz) / 4.
    Mat expansion = Mat::identity(4);
    expansion -= kron(pauli_x(), pauli_x());
    expansion -= kron(pauli_y(), pauli_y());
    expansion -= kron(pauli_z(), pauli_z());
    expansion *= cplx(0.25);
    CHECK(max_abs_diff(rho0.matrix(), expansion) < 1e-14);
}

TEST_CASE("squared Heisenberg-Weyl operators cycle the Bell states") {
    const Mat x2 = kron(pauli_x(), Mat::identity(2));
    const Mat z2 = kron(Mat::identity(2), pauli_z());
    const Mat rho0 = bell_state(BellState::psi_minus).matrix();
    const Mat rhox = bell_state(BellState::phi_minus).matrix();
    const Mat rhoy = bell_state(BellState::phi_plus).matrix();
    const Mat rhoz = bell_state(BellState::psi_plus).matrix();
    CHECK(max_abs_diff(x2 * rho0 * x2, rhox) < 1e-12);
    CHECK(max_abs_diff(z2 * rhox * z2, rhoy) < 1e-12);
    CHECK(max_abs_diff(x2 * rhoy * x2, rhoz) < 1e-12);
    CHECK(max_abs_diff(z2 * rhoz * z2, rho0) < 1e-12);
}

TEST_CASE("purity of reference states") {
    CHECK(purity(DensityMatrix::maximally_mixed()) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(purity(bell_state(BellState::phi_plus)) == doctest::Approx(1.0).epsilon(1e-14));

    // rho = rho_0/2 + 1/8: purity 1/4 + 2 (1/2)(1/2)(1/4) + (1/4)(1/4) = 0.4375
    Mat mix = bell_state(BellState::psi_minus).matrix() * cplx(0.5) +
              Mat::identity(4) * cplx(0.125);
    CHECK(purity(DensityMatrix(mix)) == doctest::Approx(0.4375).epsilon(1e-13));
}

TEST_CASE("sampled states are valid and respect the requested rank") {
    RngStream rng(99);
    EnsembleSpec spec;

    spec.kind = EnsembleKind::unbiased_mixed;
    spec.rank = 4;
    for (int i = 0; i < 50; ++i) {
        const DensityMatrix rho = random_state(spec, rng);
        CHECK(std::abs(rho.matrix().trace() - cplx(1.0)) < 1e-12);
        CHECK(min_eigenvalue(rho.matrix()) >= -1e-12);
        CHECK(numerical_rank(rho.matrix()) <= 4);
    }

    spec.kind = EnsembleKind::pure;
    spec.rank = 1;
    for (int i = 0; i < 50; ++i) {
        const DensityMatrix rho = random_state(spec, rng);
        CHECK(numerical_rank(rho.matrix()) == 1);
        CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-12));
    }

    spec.kind = EnsembleKind::biased_mixed;
    spec.rank = 2;
    spec.mean(0, 0) = 3.0;
    for (int i = 0; i < 20; ++i) CHECK(numerical_rank(random_state(spec, rng).matrix()) <= 2);
}

TEST_CASE("invalid ensemble ranks are rejected") {
    RngStream rng(1);
    EnsembleSpec spec;
    spec.kind = EnsembleKind::pure;
    spec.rank = 2;
    CHECK_THROWS_AS(random_state(spec, rng), std::invalid_argument);
    spec.kind = EnsembleKind::unbiased_mixed;
    spec.rank = 3;
    CHECK_THROWS_AS(random_state(spec, rng), std::invalid_argument);
    spec.kind = EnsembleKind::biased_mixed;
    spec.rank = 5;
    CHECK_THROWS_AS(random_state(spec, rng), std::invalid_argument);
}

TEST_CASE("maximally entangled draws have maximally mixed margins") {
    RngStream rng(7);
    EnsembleSpec spec;
    spec.kind = EnsembleKind::max_entangled;
    for (int i = 0; i < 30; ++i) {
        const DensityMatrix rho = random_state(spec, rng);
        CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-12));
        const Mat half = Mat::identity(2) * cplx(0.5);
        CHECK(max_abs_diff(reduced_first(rho.matrix()), half) < 1e-10);
        CHECK(max_abs_diff(reduced_second(rho.matrix()), half) < 1e-10);
    }
}

TEST_CASE("unbiased sample mean purity matches an independent construction") {
    constexpr int kDraws = 10000;
    RngStream rng(314159);
    EnsembleSpec spec;  // unbiased_mixed, rank 4
    double mean_impl = 0.0, m2_impl = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double p = purity(random_state(spec, rng));
        const double delta = p - mean_impl;
        mean_impl += delta / (i + 1);
        m2_impl += delta * (p - mean_impl);
    }

    // Oracle: same Y Y^+/tr construction, written directly against the
    // standard library RNG.
    std::mt19937_64 gen(271828);
    std::normal_distribution<double> dist(0.0, 1.0);
    double mean_oracle = 0.0, m2_oracle = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        cplx y[4][4];
        for (auto& row : y)
            for (auto& e : row) e = cplx(dist(gen), dist(gen));
        cplx w[4][4];
        double tr = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                cplx s = 0.0;
                for (int k = 0; k < 4; ++k) s += y[a][k] * std::conj(y[b][k]);
                w[a][b] = s;
                if (a == b) tr += s.real();
            }
        double tr2 = 0.0;
        for (auto& row : w)
            for (auto& e : row) tr2 += std::norm(e);
        const double p = tr2 / (tr * tr);
        const double delta = p - mean_oracle;
        mean_oracle += delta / (i + 1);
        m2_oracle += delta * (p - mean_oracle);
    }

    const double se = std::sqrt(m2_impl / kDraws / kDraws + m2_oracle / kDraws / kDraws);
    CHECK(std::abs(mean_impl - mean_oracle) < 3.0 * se);
}

TEST_CASE("unbiased ensemble is unitarily invariant in distribution") {
    // Compare <00|rho|00> between plain draws and draws conjugated by a fixed
    // two-qubit unitary; a biased ensemble would separate these. (Purity
    // itself is conjugation-invariant per sample, so it has no power here.)
    constexpr int kDraws = 10000;
    RngStream rng_w(5150);
    const Mat w = kron(haar_unitary_2x2(rng_w), haar_unitary_2x2(rng_w));

    EnsembleSpec spec;
    RngStream rng_a(111), rng_b(222);
    std::vector<double> plain, conjugated;
    plain.reserve(kDraws);
    conjugated.reserve(kDraws);
    for (int i = 0; i < kDraws; ++i) {
        plain.push_back(random_state(spec, rng_a).matrix()(0, 0).real());
        const Mat r = w * random_state(spec, rng_b).matrix() * w.adjoint();
        conjugated.push_back(r(0, 0).real());
    }
    // 1% critical value for n = m = 1e4: 1.628 sqrt(2/1e4).
    CHECK(test_support::ks_statistic(plain, conjugated) < 0.02302);
}

TEST_CASE("identical spec and seed reproduce identical states") {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::max_entangled;
    RngStream a(4242), b(4242);
    for (int i = 0; i < 10; ++i) {
        const Mat ma = random_state(spec, a).matrix();
        const Mat mb = random_state(spec, b).matrix();
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                CHECK(ma(r, c).real() == mb(r, c).real());
                CHECK(ma(r, c).imag() == mb(r, c).imag());
            }
    }
}

TEST_CASE("concurrence of reference kets") {
    CHECK(concurrence_pure({1.0, 0.0, 0.0, 0.0}) == doctest::Approx(0.0));
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(concurrence_pure({0.0, s, -s, 0.0}) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(concurrence_pure(appleby_fiducial()) ==
          doctest::Approx(std::sqrt(2.0 / 5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(concurrence_pure({1.0, 1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("concurrence is invariant under local unitaries") {
    RngStream rng(31337);
    EnsembleSpec spec;
    spec.kind = EnsembleKind::pure;
    spec.rank = 1;
    for (int i = 0; i < 20; ++i) {
        // top eigenvector of a random pure state as a normalized ket
        const EigenSystem es = eig_hermitian(random_state(spec, rng).matrix());
        Ket4 psi;
        for (int k = 0; k < 4; ++k) psi[k] = es.vectors(k, 0);
        const Mat uv = kron(haar_unitary_2x2(rng), haar_unitary_2x2(rng));
        CHECK(concurrence_pure(mat_vec(uv, psi)) ==
              doctest::Approx(concurrence_pure(psi)).epsilon(1e-10));
    }
}

TEST_CASE("biased-mean calibration reaches the requested purity tail") {
    RngStream rng(8080);
    const Mat m = calibrate_biased_mean(0.8, 0.9, rng);
    CHECK(m(0, 0).real() > 0.0);

    // Fresh validation sample; allow 3 binomial standard errors around the
    // calibrated confidence.
    EnsembleSpec spec;
    spec.kind = EnsembleKind::biased_mixed;
    spec.rank = 4;
    spec.mean = m;
    RngStream fresh(999);
    constexpr int kDraws = 10000;
    int above = 0;
    double mean_purity_biased = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double p = purity(random_state(spec, fresh));
        mean_purity_biased += p / kDraws;
        if (p > 0.8) ++above;
    }
    const double se = std::sqrt(0.9 * 0.1 / kDraws);
    CHECK(static_cast<double>(above) / kDraws > 0.9 - 3.0 * se);

    // Unbiased full-rank draws are dominated by low-purity states.
    EnsembleSpec unbiased;
    RngStream fresh2(1000);
    int above_unbiased = 0;
    double mean_purity_unbiased = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double p = purity(random_state(unbiased, fresh2));
        mean_purity_unbiased += p / kDraws;
        if (p > 0.8) ++above_unbiased;
    }
    CHECK(static_cast<double>(above_unbiased) / kDraws < 0.01);

    // Doubling the bias scale does not lower the mean purity.
    spec.mean(0, 0) *= 2.0;
    RngStream fresh3(1001);
    double mean_purity_doubled = 0.0;
    for (int i = 0; i < kDraws; ++i) mean_purity_doubled += purity(random_state(spec, fresh3)) / kDraws;
    CHECK(mean_purity_doubled >= mean_purity_biased);
    CHECK(mean_purity_biased > mean_purity_unbiased);
}

TEST_CASE("calibration rejects unreachable targets") {
    RngStream rng(1);
    CHECK_THROWS_AS(calibrate_biased_mean(0.2, 0.9, rng), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_biased_mean(0.8, 1.5, rng), std::invalid_argument);
}

TEST_CASE("flat real export round-trips") {
    RngStream rng(2);
    EnsembleSpec spec;
    const DensityMatrix rho = random_state(spec, rng);
    const DensityMatrix back = state_from_reals(state_to_reals(rho));
    CHECK(max_abs_diff(rho.matrix(), back.matrix()) == 0.0);
}

TEST_CASE("density matrix constructor rejects invalid input") {
    Mat not_unit_trace = Mat::identity(4);
    CHECK_THROWS_AS(DensityMatrix{not_unit_trace}, std::invalid_argument);

    Mat negative = Mat::identity(4) * cplx(0.5);
    negative(2, 2) = -0.25;
    negative(3, 3) = 0.25;
    CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);

    Mat non_hermitian = Mat::identity(4) * cplx(0.25);
    non_hermitian(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix{non_hermitian}, std::invalid_argument);
}
