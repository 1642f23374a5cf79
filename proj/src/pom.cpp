#include "qpt/pom.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace qpt {

const char* pom_kind_label(PomKind k) {
    return k == PomKind::product ? "product" : "sic";
}

PomKind pom_kind_from_label(const std::string& s) {
    if (s == "product") return PomKind::product;
    if (s == "sic") return PomKind::sic;
    throw std::invalid_argument("unknown POM kind: " + s);
}

std::array<Mat, 4> tetrahedron() {
    const double k = 1.0 / std::sqrt(3.0);
    const double t[4][3] = {
        {k, k, k},
        {k, -k, -k},
        {-k, -k, k},
        {-k, k, -k},
    };
    const Mat sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
    std::array<Mat, 4> out;
    for (int j = 0; j < 4; ++j) {
        Mat m = Mat::identity(2);
        m += t[j][0] * sx + t[j][1] * sy + t[j][2] * sz;
        out[j] = m * cplx(0.25);
    }
    return out;
}

Pom product_pom() {
    const auto tet = tetrahedron();
    std::array<Mat, 4> dual_factor;
    for (int j = 0; j < 4; ++j)
        dual_factor[j] = tet[j] * cplx(6.0) - Mat::identity(2);

    Pom pom;
    pom.kind = PomKind::product;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            const int j = 4 * m + n;
            pom.outcomes[j] = kron(tet[m], tet[n]);
            pom.duals[j] = kron(dual_factor[m], dual_factor[n]);
            pom.labels[j] = {m, n};
        }
    return pom;
}

HwGroup hw_group() {
    const Mat i2 = Mat::identity(2);
    const Mat sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
    HwGroup hw;
    // Z = (1+i)/2 sigma_z x (1 - i sigma_z); diagonal (1, i, -1, -i).
    hw.z = kron(sz, i2 - cplx(0.0, 1.0) * sz) * (cplx(1.0, 1.0) * cplx(0.5));
    // X = (1+sigma_x)/2 x sigma_x - i (1-sigma_x)/2 x sigma_y; cyclic shift.
    hw.x = kron((i2 + sx) * cplx(0.5), sx) - cplx(0.0, 1.0) * kron((i2 - sx) * cplx(0.5), sy);
    return hw;
}

Ket4 appleby_fiducial() {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    const double gm32 = std::pow(g, -1.5);
    const cplx eip4 = std::polar(1.0, M_PI / 4.0);
    const cplx eim4 = std::conj(eip4);
    const double norm = 2.0 * std::sqrt(3.0 + g);
    return {
        (cplx(1.0) + eim4) / norm,
        (eip4 + cplx(0.0, gm32)) / norm,
        (cplx(1.0) - eim4) / norm,
        (eip4 - cplx(0.0, gm32)) / norm,
    };
}

Pom sic_pom() {
    const HwGroup hw = hw_group();
    std::array<Mat, 4> xp, zp;
    xp[0] = Mat::identity(4);
    zp[0] = Mat::identity(4);
    for (int k = 1; k < 4; ++k) {
        xp[k] = xp[k - 1] * hw.x;
        zp[k] = zp[k - 1] * hw.z;
    }
    const Ket4 fiducial = appleby_fiducial();

    Pom pom;
    pom.kind = PomKind::sic;
    const Mat id4 = Mat::identity(4);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            const int j = 4 * m + n;
            const Ket4 v = mat_vec(xp[m], mat_vec(zp[n], fiducial));
            const Mat outcome = hermitize(outer(v, v) * cplx(0.25));
            pom.outcomes[j] = outcome;
            pom.duals[j] = outcome * cplx(20.0) - id4;
            pom.labels[j] = {m, n};
        }
    return pom;
}

std::array<double, 16> probabilities(const Pom& pom, const DensityMatrix& rho) {
    return outcome_probabilities(pom, rho.matrix());
}

std::array<double, 16> outcome_probabilities(const Pom& pom, const Mat& rho) {
    std::array<double, 16> p;
    for (int j = 0; j < 16; ++j) p[j] = trace_product_real(rho, pom.outcomes[j]);
    return p;
}

namespace {

// Smallest eigenvalue of a real symmetric n x n matrix (n <= 16) by cyclic
// Jacobi; only needed for the 16 x 16 outcome Gram matrix.
double smallest_sym_eigenvalue(std::array<std::array<double, 16>, 16>& a, int n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                // Smaller-magnitude root of t^2 - 2 tau t - 1 = 0 (rotation
                // convention matches linalg's complex Jacobi).
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int r = 0; r < n; ++r) {
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = c * arp + s * arq;
                    a[r][q] = -s * arp + c * arq;
                }
                for (int r = 0; r < n; ++r) {
                    const double apr = a[p][r];
                    const double aqr = a[q][r];
                    a[p][r] = c * apr + s * aqr;
                    a[q][r] = -s * apr + c * aqr;
                }
            }
    }
    double mn = a[0][0];
    for (int i = 1; i < n; ++i) mn = std::min(mn, a[i][i]);
    return mn;
}

PomCheck residual_check(std::string name, double value, double bound, bool required = true) {
    PomCheck c;
    c.name = std::move(name);
    c.value = value;
    c.bound = bound;
    c.at_least = false;
    c.required = required;
    c.pass = value <= bound;
    return c;
}

}  // namespace

std::vector<PomCheck> verify_pom(const Pom& pom) {
    std::vector<PomCheck> checks;
    const Mat id4 = Mat::identity(4);

    Mat sum_outcomes(4);
    for (const Mat& m : pom.outcomes) sum_outcomes += m;
    checks.push_back(residual_check("completeness", (sum_outcomes - id4).max_abs(), 1e-10));

    double worst_eig = 0.0;
    for (const Mat& m : pom.outcomes) worst_eig = std::min(worst_eig, min_eigenvalue(m));
    PomCheck pos;
    pos.name = "positivity";
    pos.value = worst_eig;
    pos.bound = -1e-12;
    pos.at_least = true;
    pos.pass = worst_eig >= pos.bound;
    checks.push_back(pos);

    double trace_dev = 0.0;
    for (const Mat& m : pom.outcomes) trace_dev = std::max(trace_dev, std::abs(m.trace() - cplx(0.25)));
    checks.push_back(residual_check("outcome_trace", trace_dev, 1e-10));

    double duality_dev = 0.0;
    for (int j = 0; j < 16; ++j)
        for (int k = 0; k < 16; ++k) {
            const double expected = (j == k) ? 1.0 : 0.0;
            duality_dev = std::max(duality_dev, std::abs(trace_product_real(pom.duals[j], pom.outcomes[k]) - expected));
        }
    checks.push_back(residual_check("duality", duality_dev, 1e-9));

    double dual_trace_dev = 0.0;
    Mat dual_sum(4);
    for (const Mat& m : pom.duals) {
        dual_trace_dev = std::max(dual_trace_dev, std::abs(m.trace() - cplx(1.0)));
        dual_sum += m;
    }
    checks.push_back(residual_check("dual_trace", dual_trace_dev, 1e-9));
    checks.push_back(residual_check("dual_sum", (dual_sum - id4 * cplx(4.0)).max_abs(), 1e-9));

    // Gram matrix of the outcomes; doubles as the SIC-angle test and the
    // informational-completeness test.
    std::array<std::array<double, 16>, 16> gram{};
    for (int j = 0; j < 16; ++j)
        for (int k = j; k < 16; ++k) {
            const double g = trace_product_real(pom.outcomes[j], pom.outcomes[k]);
            gram[j][k] = g;
            gram[k][j] = g;
        }

    double sic_dev = 0.0;
    for (int j = 0; j < 16; ++j)
        for (int k = 0; k < 16; ++k) {
            const double expected = (j == k) ? 1.0 / 16.0 : 1.0 / 80.0;
            sic_dev = std::max(sic_dev, std::abs(gram[j][k] - expected));
        }
    checks.push_back(residual_check("sic_gram_pattern", sic_dev, 1e-10, pom.kind == PomKind::sic));

    PomCheck ic;
    ic.name = "informational_completeness";
    ic.value = smallest_sym_eigenvalue(gram, 16);
    ic.bound = 1e-8;
    ic.at_least = true;
    ic.pass = ic.value >= ic.bound;
    checks.push_back(ic);

    return checks;
}

bool all_required_pass(const std::vector<PomCheck>& checks) {
    for (const PomCheck& c : checks)
        if (c.required && !c.pass) return false;
    return true;
}

void write_pom_json(const Pom& pom, std::ostream& os) {
    nlohmann::ordered_json j;
    j["kind"] = pom_kind_label(pom.kind);
    auto labels = nlohmann::ordered_json::array();
    for (const auto& [m, n] : pom.labels) labels.push_back({m, n});
    j["labels"] = labels;

    auto matrix_json = [](const Mat& m) {
        nlohmann::ordered_json re = nlohmann::ordered_json::array();
        nlohmann::ordered_json im = nlohmann::ordered_json::array();
        for (int r = 0; r < m.dim(); ++r) {
            nlohmann::ordered_json re_row = nlohmann::ordered_json::array();
            nlohmann::ordered_json im_row = nlohmann::ordered_json::array();
            for (int c = 0; c < m.dim(); ++c) {
                re_row.push_back(m(r, c).real());
                im_row.push_back(m(r, c).imag());
            }
            re.push_back(re_row);
            im.push_back(im_row);
        }
        return nlohmann::ordered_json{{"re", re}, {"im", im}};
    };

    auto outcomes = nlohmann::ordered_json::array();
    auto duals = nlohmann::ordered_json::array();
    for (int k = 0; k < 16; ++k) {
        outcomes.push_back(matrix_json(pom.outcomes[k]));
        duals.push_back(matrix_json(pom.duals[k]));
    }
    j["outcomes"] = outcomes;
    j["duals"] = duals;
    os << j.dump(2) << "\n";
}

}  // namespace qpt
