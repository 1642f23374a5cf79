#include "qpt/metrics.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qpt {

double trace_distance(const Mat& rho, const Mat& sigma) {
    if (!rho.is_hermitian() || !sigma.is_hermitian())
        throw std::invalid_argument("trace_distance: inputs must be Hermitian");
    return 0.5 * trace_norm(rho - sigma);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    return trace_distance(rho.matrix(), sigma.matrix());
}

PowerLawFit fit_power_law(const std::vector<std::pair<long long, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
    std::set<long long> seen;
    for (const auto& [n, d] : points) {
        if (n < 1) throw std::invalid_argument("fit_power_law: N must be positive");
        if (!(d > 0.0)) throw std::invalid_argument("fit_power_law: distances must be positive");
        if (!seen.insert(n).second) throw std::invalid_argument("fit_power_law: duplicate N");
    }

    const double m = static_cast<double>(points.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [n, d] : points) {
        mean_x += std::log(static_cast<double>(n));
        mean_y += std::log(d);
    }
    mean_x /= m;
    mean_y /= m;

    double sxx = 0.0, sxy = 0.0;
    for (const auto& [n, d] : points) {
        const double dx = std::log(static_cast<double>(n)) - mean_x;
        const double dy = std::log(d) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    const double slope = sxy / sxx;
    const double intercept = mean_y - slope * mean_x;

    PowerLawFit fit;
    fit.c = -slope;
    fit.a = std::exp(intercept);
    fit.n_points = static_cast<int>(points.size());
    if (!(fit.c > 0.0)) throw std::domain_error("fit_power_law: fitted exponent is not positive");

    double ss = 0.0;
    for (const auto& [n, d] : points) {
        const double r = std::log(d) - (intercept + slope * std::log(static_cast<double>(n)));
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / m);
    return fit;
}

double n_to_threshold(const PowerLawFit& fit, double d_thr) {
    if (!(d_thr > 0.0)) throw std::invalid_argument("n_to_threshold: threshold must be positive");
    if (!(fit.c > 0.0)) throw std::domain_error("n_to_threshold: exponent must be positive");
    return std::pow(fit.a / d_thr, 1.0 / fit.c);
}

EtaReport eta(const PowerLawFit& prod_fit, const PowerLawFit& sic_fit, double d_thr) {
    EtaReport rep;
    rep.d_thr = d_thr;
    rep.n_prod_thr = n_to_threshold(prod_fit, d_thr);
    rep.n_sic_thr = n_to_threshold(sic_fit, d_thr);
    rep.eta = rep.n_prod_thr / rep.n_sic_thr;
    return rep;
}

}  // namespace qpt
