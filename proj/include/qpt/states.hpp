#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "qpt/linalg.hpp"
#include "qpt/rng.hpp"

namespace qpt {

using Ket4 = std::array<cplx, 4>;

/// Matrix-vector product on a ket of matching dimension (first dim entries used).
inline Ket4 mat_vec(const Mat& m, const Ket4& v) {
    Ket4 w{};
    for (int i = 0; i < m.dim(); ++i) {
        cplx s = 0.0;
        for (int j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
        w[i] = s;
    }
    return w;
}

/// |v><w| on the two-qubit space.
inline Mat outer(const Ket4& v, const Ket4& w) {
    Mat m(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m(i, j) = v[i] * std::conj(w[j]);
    return m;
}

/// Positive unit-trace Hermitian operator; validated on construction.
class DensityMatrix {
public:
    explicit DensityMatrix(const Mat& m);

    static DensityMatrix maximally_mixed(int dim = 4);
    static DensityMatrix from_pure(const Ket4& ket);

    const Mat& matrix() const { return m_; }
    int dim() const { return m_.dim(); }

private:
    Mat m_;
};

/// tr(rho^2), between 1/d (maximally mixed) and 1 (pure).
double purity(const DensityMatrix& rho);

enum class BellState { psi_minus, phi_minus, phi_plus, psi_plus };

DensityMatrix bell_state(BellState which);
const char* bell_label(BellState which);

/// Concurrence |<psi| sigma_y x sigma_y |psi*>| of a normalized two-qubit ket.
double concurrence_pure(const Ket4& psi);

enum class EnsembleKind { unbiased_mixed, biased_mixed, pure, max_entangled, bell, fixed };

const char* ensemble_kind_label(EnsembleKind k);
EnsembleKind ensemble_kind_from_label(const std::string& s);

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::unbiased_mixed;
    int rank = 4;
    Mat mean = Mat(4);            // Gaussian offsets, first `rank` columns used (biased_mixed)
    std::uint64_t seed = 0;
    BellState bell = BellState::psi_minus;  // kind == bell
    Mat fixed_state = Mat(4);               // kind == fixed
};

/// Draws one state. Rank-r states come from a 4 x r matrix of complex
/// Gaussians (unit variance per real component, offset by `mean`) via
/// Y Y^+ / tr(Y Y^+). Maximally entangled states are (U x V)|Phi+> with
/// independent Haar U, V. The bell/fixed kinds ignore the stream.
DensityMatrix random_state(const EnsembleSpec& spec, RngStream& rng);

/// Haar-random 2x2 unitary (Gram-Schmidt of a complex Gaussian matrix with
/// norm-positive diagonal).
Mat haar_unitary_2x2(RngStream& rng);

/// Finds a rank-1 mean matrix M = s e0 e0^+ such that rank-4 draws biased by M
/// have purity above `target_purity` with empirical probability at least
/// `confidence` (10^4-sample Monte Carlo, bisection on the scale s).
Mat calibrate_biased_mean(double target_purity, double confidence, RngStream& rng);

/// Flat export as 32 reals: row-major entries, real part then imaginary part.
std::array<double, 32> state_to_reals(const DensityMatrix& rho);
DensityMatrix state_from_reals(const std::array<double, 32>& r);

}  // namespace qpt
