#pragma once

#include <array>
#include <vector>

#include "qpt/pom.hpp"
#include "qpt/simulate.hpp"
#include "qpt/states.hpp"

namespace qpt {

/// Linear inversion of frequencies through the dual operators. Hermitian and
/// unit trace by construction, but not necessarily positive.
struct RdEstimate {
    Mat matrix = Mat(4);
    double min_eig = 0.0;
    bool physical = false;  // min_eig >= -1e-10
};

RdEstimate rd_estimate(const Pom& pom, const FrequencyVector& freq);

struct MlConfig {
    double stop_threshold = 1e-8;  // on tr|R rho|
    int max_iterations = 5000;
    double trial_epsilon_a = 0.1;
    double trial_epsilon_b = 0.5;
    double epsilon_cap = 10.0;
    double probability_floor = 1e-12;
    bool validate_iterates = false;  // per-iterate eigenvalue/trace bookkeeping (tests)
};

struct MlResult {
    DensityMatrix estimate = DensityMatrix::maximally_mixed();
    int iterations = 0;             // accepted updates
    double final_stop_metric = 0.0;
    bool converged = false;
    std::vector<double> loglik_trace;  // initial value plus one entry per accepted update
    int floor_activations = 0;         // cells with freq > 0 whose probability hit the floor
    double min_iterate_eigenvalue = 0.0;  // filled when validate_iterates
    double max_trace_error = 0.0;         // filled when validate_iterates
};

/// N * sum_j freq_j log p_j with 0 log 0 = 0 and probabilities floored at
/// cfg-style 1e-12 when the corresponding frequency is positive.
double log_likelihood(const Pom& pom, const FrequencyVector& freq, long long n, const DensityMatrix& rho);

/// R = sum_j freq_j Pi_j / tr(rho Pi_j) - 1, skipping zero-frequency cells.
Mat ml_r_operator(const Pom& pom, const FrequencyVector& freq, const DensityMatrix& rho);

/// Iterates rho <- (1+eps R) rho (1+eps R) / tr(...), choosing eps each step
/// from a quadratic interpolation of the log-likelihood through eps = 0 and
/// two trial values, with fallbacks that keep the likelihood non-decreasing.
/// Stops when tr|R rho| drops below the threshold, when no step can improve
/// the likelihood any further, or at the iteration cap (flagged non-converged).
MlResult ml_estimate(const Pom& pom, const FrequencyVector& freq, long long n,
                     const MlConfig& cfg = {}, const DensityMatrix* start = nullptr);

}  // namespace qpt
