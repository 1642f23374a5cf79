#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qpt/estimate.hpp"
#include "qpt/metrics.hpp"
#include "qpt/rng.hpp"
#include "support.hpp"

using namespace qpt;

namespace {

FrequencyVector to_freq(const std::array<double, 16>& p) {
    FrequencyVector f;
    for (int j = 0; j < 16; ++j) f[j] = p[j];
    return f;
}

DensityMatrix random_full_rank(RngStream& rng) {
    EnsembleSpec spec;  // unbiased_mixed rank 4
    return random_state(spec, rng);
}

}  // namespace

TEST_CASE("raw-data inversion of exact probabilities recovers the state") {
    const DensityMatrix mixed = DensityMatrix::maximally_mixed();
    for (const Pom& pom : {product_pom(), sic_pom()}) {
        const RdEstimate rd = rd_estimate(pom, to_freq(probabilities(pom, mixed)));
        CHECK(rd.physical);
        CHECK((rd.matrix - mixed.matrix()).max_abs() < 1e-12);
    }

    RngStream rng(64);
    for (const Pom& pom : {product_pom(), sic_pom()}) {
        for (int trial = 0; trial < 20; ++trial) {
            const DensityMatrix rho = random_full_rank(rng);
            const RdEstimate rd = rd_estimate(pom, to_freq(probabilities(pom, rho)));
            CHECK(trace_distance(rd.matrix, rho.matrix()) < 1e-10);
        }
    }
}

TEST_CASE("raw-data estimates of a Bell state are mostly unphysical") {
    const Pom pom = product_pom();
    const DensityMatrix singlet = bell_state(BellState::psi_minus);
    int unphysical = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const ClickRecord rec = simulate_clicks(pom, singlet, 1000, 90000 + seed);
        if (!rd_estimate(pom, frequencies(rec)).physical) ++unphysical;
    }
    CHECK(unphysical > 90);
}

TEST_CASE("raw-data estimates keep unit trace") {
    const Pom pom = sic_pom();
    RngStream rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const ClickRecord rec = simulate_clicks(pom, random_full_rank(rng), 500, rng.next_u64());
        const RdEstimate rd = rd_estimate(pom, frequencies(rec));
        CHECK(std::abs(rd.matrix.trace() - cplx(1.0)) < 1e-10);
        CHECK(rd.matrix.is_hermitian());
    }
}

TEST_CASE("log-likelihood reference values") {
    const Pom pom = sic_pom();
    const DensityMatrix mixed = DensityMatrix::maximally_mixed();
    FrequencyVector uniform;
    uniform.fill(1.0 / 16.0);
    const long long n = 1200;
    CHECK(log_likelihood(pom, uniform, n, mixed) ==
          doctest::Approx(static_cast<double>(n) * std::log(1.0 / 16.0)).epsilon(1e-12));
}

TEST_CASE("exact frequencies maximize the log-likelihood") {
    const Pom pom = product_pom();
    RngStream rng(321);
    const DensityMatrix rho = random_full_rank(rng);
    const FrequencyVector f = to_freq(probabilities(pom, rho));
    const double at_truth = log_likelihood(pom, f, 1000, rho);
    for (int trial = 0; trial < 20; ++trial)
        CHECK(log_likelihood(pom, f, 1000, random_full_rank(rng)) <= at_truth + 1e-9);
}

TEST_CASE("zero-frequency cells contribute nothing even at zero probability") {
    const Pom pom = product_pom();
    const DensityMatrix singlet = bell_state(BellState::psi_minus);
    const auto p = probabilities(pom, singlet);
    const FrequencyVector f = to_freq(p);  // p_mm = 0 exactly
    const double value = log_likelihood(pom, f, 600, singlet);
    double expected = 0.0;
    for (int j = 0; j < 16; ++j)
        if (f[j] > 0.0) expected += f[j] * std::log(p[j]);
    expected *= 600.0;
    CHECK(std::isfinite(value));
    CHECK(value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("R operator vanishes at the exact-probability state") {
    RngStream rng(55);
    for (const Pom& pom : {product_pom(), sic_pom()}) {
        const DensityMatrix rho = random_full_rank(rng);
        const Mat r = ml_r_operator(pom, to_freq(probabilities(pom, rho)), rho);
        CHECK(r.max_abs() < 1e-10);
    }
}

TEST_CASE("R operator at the maximally mixed state has the closed form") {
    // tr(Pi/4) = 1/16 for every outcome, so R = 16 sum_j f_j Pi_j - 1.
    const Pom pom = sic_pom();
    RngStream rng(66);
    const ClickRecord rec = simulate_clicks(pom, random_full_rank(rng), 2000, 8888);
    const FrequencyVector f = frequencies(rec);
    const Mat r = ml_r_operator(pom, f, DensityMatrix::maximally_mixed());
    Mat expected(4);
    for (int j = 0; j < 16; ++j) expected += (16.0 * f[j]) * pom.outcomes[j];
    expected -= Mat::identity(4);
    CHECK((r - expected).max_abs() < 1e-12);
}

TEST_CASE("R operator ignores zero-frequency cells regardless of denominator") {
    const Pom pom = product_pom();
    const DensityMatrix singlet = bell_state(BellState::psi_minus);
    FrequencyVector f{};
    f[1] = 0.5;
    f[2] = 0.5;  // everything else zero, including cells with p = 0
    const Mat r = ml_r_operator(pom, f, singlet);
    Mat expected(4);
    const auto p = probabilities(pom, singlet);
    expected += (f[1] / p[1]) * pom.outcomes[1];
    expected += (f[2] / p[2]) * pom.outcomes[2];
    expected -= Mat::identity(4);
    CHECK((r - expected).max_abs() < 1e-12);
}

TEST_CASE("noiseless frequencies drive ML back to the true state") {
    RngStream rng(4040);
    for (const Pom& pom : {product_pom(), sic_pom()}) {
        for (int trial = 0; trial < 10; ++trial) {
            const DensityMatrix rho = random_full_rank(rng);
            const MlResult res = ml_estimate(pom, to_freq(probabilities(pom, rho)), 1000);
            CHECK(res.converged);
            CHECK(trace_distance(res.estimate.matrix(), rho.matrix()) < 1e-6);
        }
    }
}

TEST_CASE("ML equals RD whenever RD is physical") {
    RngStream rng(7777);
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 30; ++trial) {
        const Pom& pom = (trial % 2 == 0) ? product_pom() : sic_pom();
        const DensityMatrix rho = random_full_rank(rng);
        const ClickRecord rec = simulate_clicks(pom, rho, 4000, rng.next_u64());
        const FrequencyVector f = frequencies(rec);
        const RdEstimate rd = rd_estimate(pom, f);
        if (!rd.physical) continue;
        ++tested;
        const MlResult ml = ml_estimate(pom, f, rec.total);
        CHECK(ml.converged);
        CHECK(trace_distance(ml.estimate.matrix(), rd.matrix) < 1e-6);
    }
    CHECK(tested == 30);
}

TEST_CASE("ML iterates stay physical and the likelihood never decreases") {
    RngStream rng(1234);
    MlConfig cfg;
    cfg.validate_iterates = true;
    for (int trial = 0; trial < 20; ++trial) {
        const Pom& pom = (trial % 2 == 0) ? product_pom() : sic_pom();
        EnsembleSpec spec;
        if (trial % 3 == 0) {
            spec.kind = EnsembleKind::pure;
            spec.rank = 1;
        }
        const DensityMatrix rho = random_state(spec, rng);
        const ClickRecord rec = simulate_clicks(pom, rho, 600 + 100 * trial, rng.next_u64());
        const MlResult res = ml_estimate(pom, frequencies(rec), rec.total, cfg);

        CHECK(res.converged);
        CHECK(res.min_iterate_eigenvalue >= -1e-10);
        CHECK(res.max_trace_error <= 1e-10);
        for (std::size_t k = 1; k < res.loglik_trace.size(); ++k)
            CHECK(res.loglik_trace[k] >= res.loglik_trace[k - 1]);
    }
}

TEST_CASE("ML exits immediately at a fixed point") {
    const Pom pom = sic_pom();
    RngStream rng(9);
    const DensityMatrix rho = random_full_rank(rng);
    const FrequencyVector f = to_freq(probabilities(pom, rho));
    const MlResult res = ml_estimate(pom, f, 1000, MlConfig{}, &rho);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.final_stop_metric < 1e-8);
}

TEST_CASE("hitting the iteration cap flags the result instead of throwing") {
    const Pom pom = product_pom();
    const DensityMatrix singlet = bell_state(BellState::psi_minus);
    const ClickRecord rec = simulate_clicks(pom, singlet, 3000, 13);
    MlConfig cfg;
    cfg.max_iterations = 2;
    const MlResult res = ml_estimate(pom, frequencies(rec), rec.total, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 2);
}

TEST_CASE("Bell-state ML estimate lands in the expected distance band") {
    const Pom pom = product_pom();
    const DensityMatrix singlet = bell_state(BellState::psi_minus);
    double avg = 0.0;
    const int runs = 10;
    for (int r = 0; r < runs; ++r) {
        const ClickRecord rec = simulate_clicks(pom, singlet, 6000, 500 + r);
        const MlResult res = ml_estimate(pom, frequencies(rec), rec.total);
        CHECK(res.converged);
        CHECK(purity(res.estimate) <= 1.0 + 1e-12);
        avg += trace_distance(res.estimate.matrix(), singlet.matrix()) / runs;
    }
    CHECK(avg > 0.005);
    CHECK(avg < 0.1);
}
