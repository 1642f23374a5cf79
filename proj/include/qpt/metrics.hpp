#pragma once

#include <utility>
#include <vector>

#include "qpt/linalg.hpp"
#include "qpt/states.hpp"

namespace qpt {

/// Trace-class distance D = tr|rho - sigma| / 2. Accepts any Hermitian
/// unit-trace operators, so raw-data estimates with negative eigenvalues
/// score the same way as physical states.
double trace_distance(const Mat& rho, const Mat& sigma);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Least-squares fit of D_avg = a / N^c, done as ordinary least squares on
/// (log N, log D). residual_rms is the RMS misfit in log space.
struct PowerLawFit {
    double a = 0.0;
    double c = 0.0;
    int n_points = 0;
    double residual_rms = 0.0;
};

PowerLawFit fit_power_law(const std::vector<std::pair<long long, double>>& points);

/// N needed for the fitted law to reach d_thr: (a / d_thr)^(1/c).
double n_to_threshold(const PowerLawFit& fit, double d_thr);

/// eta = N(product) / N(SIC) at the benchmark distance; eta < 1 means the
/// product measurement reaches the threshold with fewer copies.
struct EtaReport {
    double eta = 0.0;
    double n_prod_thr = 0.0;
    double n_sic_thr = 0.0;
    double d_thr = 0.0;
};

EtaReport eta(const PowerLawFit& prod_fit, const PowerLawFit& sic_fit, double d_thr);

}  // namespace qpt
