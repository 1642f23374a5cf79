#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qpt/linalg.hpp"
#include "qpt/states.hpp"

namespace qpt {

enum class PomKind { product, sic };

const char* pom_kind_label(PomKind k);
PomKind pom_kind_from_label(const std::string& s);

/// A 16-outcome two-qubit measurement with its dual reconstruction operators.
/// Outcome (m,n) sits at index 4m+n; the ordering is part of the contract
/// (frequencies, duals and CSV columns all index the same way).
struct Pom {
    PomKind kind = PomKind::product;
    std::array<Mat, 16> outcomes;
    std::array<Mat, 16> duals;
    std::array<std::pair<int, int>, 16> labels;
};

/// The four qubit tetrahedron outcomes T_j = (1 + t_j.sigma)/4 whose Bloch
/// vectors point at the corners of a regular tetrahedron.
std::array<Mat, 4> tetrahedron();

/// Two tetrahedron measurements in parallel: outcomes T_m x T_n with duals
/// (6 T_m - 1) x (6 T_n - 1).
Pom product_pom();

/// Shift and phase generators of the d=4 Heisenberg-Weyl group in the
/// |00>,|01>,|10>,|11> basis, built from their single-qubit factors.
struct HwGroup {
    int d = 4;
    Mat x = Mat(4);
    Mat z = Mat(4);
};
HwGroup hw_group();

/// Appleby's fiducial ket; its Heisenberg-Weyl orbit is a two-qubit SIC POM.
Ket4 appleby_fiducial();

/// The 16 rank-1 outcomes X^m Z^n |f><f| Z^-n X^-m / 4 with duals 20 P - 1.
Pom sic_pom();

std::array<double, 16> probabilities(const Pom& pom, const DensityMatrix& rho);

/// Same as probabilities() but on a raw Hermitian matrix; used by the ML
/// iteration where intermediate iterates skip DensityMatrix validation.
std::array<double, 16> outcome_probabilities(const Pom& pom, const Mat& rho);

struct PomCheck {
    std::string name;
    double value = 0.0;   // measured residual (at_least=false) or magnitude (at_least=true)
    double bound = 0.0;
    bool at_least = false;  // pass iff value >= bound instead of value <= bound
    bool required = true;   // informational checks don't gate the verdict
    bool pass = false;
};

/// Checks completeness, positivity, outcome traces, duality, dual sum, the
/// SIC Gram pattern and informational completeness (smallest eigenvalue of
/// the outcome Gram matrix). The SIC pattern check is informational for the
/// product kind, which is expected to fail it.
std::vector<PomCheck> verify_pom(const Pom& pom);

bool all_required_pass(const std::vector<PomCheck>& checks);

/// JSON export (kind, labels, outcome and dual entries) for provenance logs.
void write_pom_json(const Pom& pom, std::ostream& os);

}  // namespace qpt
