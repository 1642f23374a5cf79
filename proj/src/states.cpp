#include "qpt/states.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qpt {

DensityMatrix::DensityMatrix(const Mat& m) : m_(m) {
    if (m.dim() != 2 && m.dim() != 4) throw std::invalid_argument("DensityMatrix: bad dimension");
    if (!m.all_finite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
    if (!m.is_hermitian()) throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace() - cplx(1.0)) > tol::state_trace)
        throw std::invalid_argument("DensityMatrix: trace differs from 1");
    if (min_eigenvalue(m) < tol::state_positivity)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    return DensityMatrix(Mat::identity(dim) * cplx(1.0 / dim));
}

DensityMatrix DensityMatrix::from_pure(const Ket4& ket) {
    return DensityMatrix(outer(ket, ket));
}

double purity(const DensityMatrix& rho) {
    return trace_product_real(rho.matrix(), rho.matrix());
}

namespace {

Ket4 bell_ket(BellState which) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (which) {
        case BellState::psi_minus: return {0.0, s, -s, 0.0};
        case BellState::phi_minus: return {s, 0.0, 0.0, -s};
        case BellState::phi_plus: return {s, 0.0, 0.0, s};
        case BellState::psi_plus: return {0.0, s, s, 0.0};
    }
    throw std::invalid_argument("bell_state: unknown label");
}

}  // namespace

DensityMatrix bell_state(BellState which) {
    return DensityMatrix::from_pure(bell_ket(which));
}

const char* bell_label(BellState which) {
    switch (which) {
        case BellState::psi_minus: return "psi_minus";
        case BellState::phi_minus: return "phi_minus";
        case BellState::phi_plus: return "phi_plus";
        case BellState::psi_plus: return "psi_plus";
    }
    return "?";
}

double concurrence_pure(const Ket4& psi) {
    double norm_sq = 0.0;
    for (const cplx& c : psi) norm_sq += std::norm(c);
    if (std::abs(norm_sq - 1.0) > 1e-10)
        throw std::invalid_argument("concurrence_pure: ket is not normalized");
    const Mat yy = kron(pauli_y(), pauli_y());
    Ket4 conj_psi;
    for (int i = 0; i < 4; ++i) conj_psi[i] = std::conj(psi[i]);
    const Ket4 w = mat_vec(yy, conj_psi);
    cplx overlap = 0.0;
    for (int i = 0; i < 4; ++i) overlap += std::conj(psi[i]) * w[i];
    return std::abs(overlap);
}

const char* ensemble_kind_label(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::unbiased_mixed: return "unbiased_mixed";
        case EnsembleKind::biased_mixed: return "biased_mixed";
        case EnsembleKind::pure: return "pure";
        case EnsembleKind::max_entangled: return "max_entangled";
        case EnsembleKind::bell: return "bell";
        case EnsembleKind::fixed: return "fixed";
    }
    return "?";
}

EnsembleKind ensemble_kind_from_label(const std::string& s) {
    if (s == "unbiased_mixed") return EnsembleKind::unbiased_mixed;
    if (s == "biased_mixed") return EnsembleKind::biased_mixed;
    if (s == "pure") return EnsembleKind::pure;
    if (s == "max_entangled") return EnsembleKind::max_entangled;
    if (s == "bell") return EnsembleKind::bell;
    if (s == "fixed") return EnsembleKind::fixed;
    throw std::invalid_argument("unknown ensemble kind: " + s);
}

namespace {

// Y Y^+ / tr for a 4 x r complex Gaussian matrix offset by the mean columns.
// Draw order is fixed (row-major, real before imaginary) for reproducibility.
DensityMatrix wishart_state(int rank, const Mat& mean, bool biased, RngStream& rng) {
    cplx y[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < rank; ++j) {
            const cplx m = biased ? mean(i, j) : cplx(0.0);
            y[i][j] = cplx(m.real() + rng.normal(), m.imag() + rng.normal());
        }
    Mat w(4);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            cplx s = 0.0;
            for (int j = 0; j < rank; ++j) s += y[i][j] * std::conj(y[k][j]);
            w(i, k) = s;
        }
    const double t = w.trace().real();
    w *= cplx(1.0 / t);
    return DensityMatrix(hermitize(w));
}

}  // namespace

Mat haar_unitary_2x2(RngStream& rng) {
    cplx g[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) g[i][j] = cplx(rng.normal(), rng.normal());

    // Gram-Schmidt with norm-positive diagonal gives the invariant measure.
    double n1 = std::sqrt(std::norm(g[0][0]) + std::norm(g[1][0]));
    cplx q1[2] = {g[0][0] / n1, g[1][0] / n1};
    cplx r12 = std::conj(q1[0]) * g[0][1] + std::conj(q1[1]) * g[1][1];
    cplx w[2] = {g[0][1] - r12 * q1[0], g[1][1] - r12 * q1[1]};
    double n2 = std::sqrt(std::norm(w[0]) + std::norm(w[1]));
    Mat u(2);
    u(0, 0) = q1[0];
    u(1, 0) = q1[1];
    u(0, 1) = w[0] / n2;
    u(1, 1) = w[1] / n2;
    return u;
}

DensityMatrix random_state(const EnsembleSpec& spec, RngStream& rng) {
    switch (spec.kind) {
        case EnsembleKind::unbiased_mixed:
            if (spec.rank != 4) throw std::invalid_argument("unbiased_mixed requires rank 4");
            return wishart_state(4, spec.mean, false, rng);
        case EnsembleKind::biased_mixed:
            if (spec.rank < 1 || spec.rank > 4) throw std::invalid_argument("biased_mixed rank out of range");
            return wishart_state(spec.rank, spec.mean, true, rng);
        case EnsembleKind::pure:
            if (spec.rank != 1) throw std::invalid_argument("pure requires rank 1");
            return wishart_state(1, spec.mean, false, rng);
        case EnsembleKind::max_entangled: {
            const Mat u = haar_unitary_2x2(rng);
            const Mat v = haar_unitary_2x2(rng);
            const double s = 1.0 / std::sqrt(2.0);
            const Ket4 phi_plus = {s, 0.0, 0.0, s};
            return DensityMatrix::from_pure(mat_vec(kron(u, v), phi_plus));
        }
        case EnsembleKind::bell:
            return bell_state(spec.bell);
        case EnsembleKind::fixed:
            return DensityMatrix(spec.fixed_state);
    }
    throw std::invalid_argument("random_state: unknown ensemble kind");
}

Mat calibrate_biased_mean(double target_purity, double confidence, RngStream& rng) {
    if (!(target_purity > 0.25 && target_purity < 1.0))
        throw std::invalid_argument("calibrate_biased_mean: target purity must be in (0.25, 1)");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("calibrate_biased_mean: confidence must be in (0, 1)");

    constexpr int kSamples = 10000;
    // Common random numbers: one base Ginibre sample reused across scales, so
    // the empirical exceedance probability is a deterministic, monotone-ish
    // function of the bias scale s.
    std::vector<std::array<cplx, 16>> base(kSamples);
    for (auto& y : base)
        for (auto& e : y) e = cplx(rng.normal(), rng.normal());

    auto exceed_fraction = [&](double s) {
        int count = 0;
        for (const auto& y : base) {
            cplx w[4][4];
            double tr = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int k = i; k < 4; ++k) {
                    cplx acc = 0.0;
                    for (int j = 0; j < 4; ++j) {
                        cplx yi = y[4 * i + j];
                        cplx yk = y[4 * k + j];
                        if (i == 0 && j == 0) yi += s;
                        if (k == 0 && j == 0) yk += s;
                        acc += yi * std::conj(yk);
                    }
                    w[i][k] = acc;
                    w[k][i] = std::conj(acc);
                    if (i == k) tr += acc.real();
                }
            double tr2 = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < 4; ++k) tr2 += std::norm(w[i][k]);
            if (tr2 / (tr * tr) > target_purity) ++count;
        }
        return static_cast<double>(count) / kSamples;
    };

    double lo = 0.0;
    if (exceed_fraction(lo) >= confidence) return Mat(4);  // already satisfied with M = 0

    double hi = 1.0;
    int doublings = 0;
    while (exceed_fraction(hi) < confidence) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 40) throw std::runtime_error("calibrate_biased_mean: failed to bracket scale");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (exceed_fraction(mid) >= confidence)
            hi = mid;
        else
            lo = mid;
    }
    Mat m(4);
    m(0, 0) = hi;
    return m;
}

std::array<double, 32> state_to_reals(const DensityMatrix& rho) {
    std::array<double, 32> r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            r[2 * (4 * i + j)] = rho.matrix()(i, j).real();
            r[2 * (4 * i + j) + 1] = rho.matrix()(i, j).imag();
        }
    return r;
}

DensityMatrix state_from_reals(const std::array<double, 32>& r) {
    Mat m(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m(i, j) = cplx(r[2 * (4 * i + j)], r[2 * (4 * i + j) + 1]);
    return DensityMatrix(m);
}

}  // namespace qpt
