#include "qpt/estimate.hpp"

#include <cmath>
#include <limits>

namespace qpt {

RdEstimate rd_estimate(const Pom& pom, const FrequencyVector& freq) {
    Mat m(4);
    for (int j = 0; j < 16; ++j) m += freq[j] * pom.duals[j];
    RdEstimate rd;
    rd.matrix = hermitize(m);
    rd.min_eig = min_eigenvalue(rd.matrix);
    rd.physical = rd.min_eig >= tol::state_positivity;
    return rd;
}

namespace {

double loglik_from_probs(const FrequencyVector& freq, const std::array<double, 16>& p, long long n,
                         double floor, int* floor_hits) {
    double s = 0.0;
    for (int j = 0; j < 16; ++j) {
        if (freq[j] <= 0.0) continue;  // 0 log 0 = 0
        double pj = p[j];
        if (pj < floor) {
            pj = floor;
            if (floor_hits) ++*floor_hits;
        }
        s += freq[j] * std::log(pj);
    }
    return static_cast<double>(n) * s;
}

Mat r_from_probs(const Pom& pom, const FrequencyVector& freq, const std::array<double, 16>& p,
                 double floor, int* floor_hits) {
    Mat r(4);
    for (int j = 0; j < 16; ++j) {
        if (freq[j] <= 0.0) continue;
        double pj = p[j];
        if (pj < floor) {
            pj = floor;
            if (floor_hits) ++*floor_hits;
        }
        r += (freq[j] / pj) * pom.outcomes[j];
    }
    r -= Mat::identity(4);
    return r;
}

}  // namespace

double log_likelihood(const Pom& pom, const FrequencyVector& freq, long long n, const DensityMatrix& rho) {
    const MlConfig defaults;
    return loglik_from_probs(freq, probabilities(pom, rho), n, defaults.probability_floor, nullptr);
}

Mat ml_r_operator(const Pom& pom, const FrequencyVector& freq, const DensityMatrix& rho) {
    const MlConfig defaults;
    return r_from_probs(pom, freq, probabilities(pom, rho), defaults.probability_floor, nullptr);
}

MlResult ml_estimate(const Pom& pom, const FrequencyVector& freq, long long n,
                     const MlConfig& cfg, const DensityMatrix* start) {
    MlResult res;
    Mat rho = start ? start->matrix() : DensityMatrix::maximally_mixed().matrix();

    std::array<double, 16> probs = outcome_probabilities(pom, rho);
    // Absolute log-likelihood of the start; accepted steps accumulate exact
    // per-step gains on top of it, which keeps the recorded trace monotone.
    double loglik = loglik_from_probs(freq, probs, n, cfg.probability_floor, &res.floor_activations);
    res.loglik_trace.push_back(loglik);
    res.min_iterate_eigenvalue = std::numeric_limits<double>::infinity();
    if (cfg.validate_iterates) {
        res.min_iterate_eigenvalue = min_eigenvalue(rho);
        res.max_trace_error = std::abs(rho.trace() - cplx(1.0));
    }

    // One update step is rho(eps) = (1+eps R) rho (1+eps R) / trace
    //                             = (rho + eps S1 + eps^2 S2) / t(eps)
    // with S1 = R rho + rho R, S2 = R rho R. The per-outcome traces of S1 and
    // S2 give the candidate probabilities in closed form,
    //   p_j(eps) = (p_j + eps a1_j + eps^2 a2_j) / t(eps),
    // so the likelihood gain is evaluated through log1p of the relative
    // probability changes, without the cancellation of differencing two full
    // log sums. Gains below the rounding floor of the likelihood do not count
    // as improvement.
    Mat s1(4), s2(4);
    std::array<double, 16> a1{}, a2{};
    double t1 = 0.0, t2 = 0.0;
    const double gain_floor =
        8.0 * std::numeric_limits<double>::epsilon() *
        (1.0 + std::abs(loglik / static_cast<double>(n)));

    auto gain = [&](double eps) {
        const double t = 1.0 + eps * t1 + eps * eps * t2;
        if (!(t > 0.0) || !std::isfinite(t)) return -std::numeric_limits<double>::infinity();
        double g = 0.0;
        for (int j = 0; j < 16; ++j) {
            if (freq[j] <= 0.0) continue;
            const double pj = std::max(probs[j], cfg.probability_floor);
            // p_j(eps)/p_j - 1, free of the p_j(eps) - p_j cancellation
            const double q = (eps * a1[j] + eps * eps * a2[j] - pj * (eps * t1 + eps * eps * t2)) /
                             (pj * t);
            if (q <= -1.0) return -std::numeric_limits<double>::infinity();
            g += freq[j] * std::log1p(q);
        }
        return g;
    };

    auto record_iterate = [&](double step_gain) {
        loglik += static_cast<double>(n) * step_gain;
        ++res.iterations;
        res.loglik_trace.push_back(loglik);
        if (cfg.validate_iterates) {
            res.min_iterate_eigenvalue = std::min(res.min_iterate_eigenvalue, min_eigenvalue(rho));
            res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - cplx(1.0)));
        }
    };

    auto apply_step = [&](double eps, double step_gain) {
        Mat m = rho;
        m += eps * s1;
        m += (eps * eps) * s2;
        m *= cplx(1.0 / m.trace().real());
        rho = hermitize(m);
        probs = outcome_probabilities(pom, rho);
        record_iterate(step_gain);
    };

    // Fallback direction for ill-conditioned interior maximizers, where the
    // multiplicative update moves eigenvalues only in proportion to their own
    // size and can exhaust its useful step range far from the optimum: a
    // damped straight-line step toward the linear-inversion matrix
    // sigma = sum_j f_j P_j. The likelihood is concave along the segment and
    // sigma is the exact maximizer whenever it is physical, so an accepted
    // mixture (still gated on likelihood ascent and positivity) repairs
    // precisely the directions the eps family cannot reach.
    Mat sigma(4);
    std::array<double, 16> sigma_probs{};
    double sigma_min_eig = 0.0;
    bool have_sigma = false;
    auto try_mixture = [&]() {
        if (!have_sigma) {
            for (int j = 0; j < 16; ++j) sigma += freq[j] * pom.duals[j];
            sigma = hermitize(sigma);
            sigma_probs = outcome_probabilities(pom, sigma);
            sigma_min_eig = min_eigenvalue(sigma);
            have_sigma = true;
        }
        // lambda_min((1-b) rho + b sigma) >= (1-b) lambda_min(rho) + b lambda_min(sigma)
        const double rho_min_eig = std::max(0.0, min_eigenvalue(rho));
        double beta = 1.0;
        for (int h = 0; h < 24; ++h, beta *= 0.5) {
            if ((1.0 - beta) * rho_min_eig + beta * sigma_min_eig < 0.0) continue;
            double g = 0.0;
            bool ok = true;
            for (int j = 0; j < 16 && ok; ++j) {
                if (freq[j] <= 0.0) continue;
                const double pj = std::max(probs[j], cfg.probability_floor);
                const double q = beta * (sigma_probs[j] - probs[j]) / pj;
                if (q <= -1.0)
                    ok = false;
                else
                    g += freq[j] * std::log1p(q);
            }
            if (!ok || g <= gain_floor) continue;
            Mat cand = rho;
            cand *= cplx(1.0 - beta);
            cand += cplx(beta) * sigma;
            rho = hermitize(cand);
            probs = outcome_probabilities(pom, rho);
            record_iterate(g);
            return true;
        }
        return false;
    };

    double metric = std::numeric_limits<double>::infinity();
    while (true) {
        const Mat r = r_from_probs(pom, freq, probs, cfg.probability_floor, &res.floor_activations);
        const Mat r_rho = r * rho;
        metric = trace_norm(r_rho);
        if (metric < cfg.stop_threshold) {
            res.converged = true;
            break;
        }
        if (res.iterations >= cfg.max_iterations) {
            res.converged = false;
            break;
        }

        // Periodic mixture attempt; settles physical-inversion cases at once.
        if (res.iterations % 25 == 0 && try_mixture()) continue;

        s1 = r_rho + r_rho.adjoint();
        s2 = hermitize(r_rho * r);
        t1 = 2.0 * r_rho.trace().real();
        t2 = s2.trace().real();
        for (int j = 0; j < 16; ++j) {
            if (freq[j] <= 0.0) continue;
            a1[j] = trace_product_real(s1, pom.outcomes[j]);
            a2[j] = trace_product_real(s2, pom.outcomes[j]);
        }

        const double ea = cfg.trial_epsilon_a;
        const double eb = cfg.trial_epsilon_b;
        const double gain_a = gain(ea);
        const double gain_b = gain(eb);

        bool stepped = false;
        if (std::isfinite(gain_a) && std::isfinite(gain_b)) {
            // Quadratic through (0,0), (ea, gain_a), (eb, gain_b).
            const double ga = gain_a / ea;
            const double gb = gain_b / eb;
            const double curvature = (gb - ga) / (eb - ea);
            const double slope = ga - curvature * ea;
            if (curvature < 0.0) {
                const double eps_star = -slope / (2.0 * curvature);
                if (eps_star > 0.0) {
                    const double eps = std::min(eps_star, cfg.epsilon_cap);
                    const double g = gain(eps);
                    if (g > gain_floor) {
                        apply_step(eps, g);
                        stepped = true;
                    }
                }
            }
        }
        if (!stepped) {
            if (gain_a > gain_floor && gain_a >= gain_b) {
                apply_step(ea, gain_a);
                stepped = true;
            } else if (gain_b > gain_floor) {
                apply_step(eb, gain_b);
                stepped = true;
            }
        }
        if (!stepped) {
            double eps = ea;
            for (int h = 0; h < 20 && !stepped; ++h) {
                eps *= 0.5;
                const double g = gain(eps);
                if (g > gain_floor) {
                    apply_step(eps, g);
                    stepped = true;
                }
            }
        }
        if (!stepped) stepped = try_mixture();
        if (!stepped) {
            // Nothing improves the likelihood; the maximizer is reached to
            // working precision.
            res.converged = true;
            break;
        }
    }

    res.final_stop_metric = metric;
    res.estimate = DensityMatrix(rho);
    return res;
}

}  // namespace qpt
