#include "qpt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace qpt {

Mat kron(const Mat& a, const Mat& b) {
    if (a.dim() != 2 || b.dim() != 2)
        throw std::invalid_argument("kron: both factors must be 2x2");
    Mat c(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) c(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return c;
}

Mat pauli_x() {
    Mat m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

Mat pauli_y() {
    Mat m(2);
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
    return m;
}

Mat pauli_z() {
    Mat m(2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

namespace {

double offdiag_sq(const Mat& m) {
    double s = 0.0;
    for (int p = 0; p < m.dim(); ++p)
        for (int q = p + 1; q < m.dim(); ++q) s += std::norm(m(p, q));
    return s;
}

// One Jacobi rotation in the (p,q) plane, chosen to annihilate m(p,q).
// Updates m in place and accumulates the rotation into v.
void jacobi_rotate(Mat& m, Mat& v, int p, int q) {
    const cplx g = m(p, q);
    const double ag = std::abs(g);
    if (ag == 0.0) return;
    const cplx phase = g / ag;

    const double alpha = m(p, p).real();
    const double beta = m(q, q).real();
    const double tau = (beta - alpha) / (2.0 * ag);
    // Smaller-magnitude root of t^2 - 2 tau t - 1 = 0, written without
    // cancellation on either sign of tau.
    double t;
    if (tau >= 0.0)
        t = -1.0 / (tau + std::sqrt(1.0 + tau * tau));
    else
        t = 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const cplx s = t * c * std::conj(phase);

    const int n = m.dim();
    // Right-multiply columns p,q of m and v by U = [[c, -conj(s)], [s, c]].
    for (int r = 0; r < n; ++r) {
        const cplx mp = m(r, p), mq = m(r, q);
        m(r, p) = c * mp + s * mq;
        m(r, q) = -std::conj(s) * mp + c * mq;
        const cplx vp = v(r, p), vq = v(r, q);
        v(r, p) = c * vp + s * vq;
        v(r, q) = -std::conj(s) * vp + c * vq;
    }
    // Left-multiply rows p,q by U^+.
    for (int r = 0; r < n; ++r) {
        const cplx mp = m(p, r), mq = m(q, r);
        m(p, r) = c * mp + std::conj(s) * mq;
        m(q, r) = -s * mp + c * mq;
    }
    m(p, q) = 0.0;
    m(q, p) = 0.0;
    m(p, p) = m(p, p).real();
    m(q, q) = m(q, q).real();
}

}  // namespace

EigenSystem eig_hermitian(const Mat& a) {
    if (!a.all_finite()) throw std::invalid_argument("eig_hermitian: non-finite entries");
    if (!a.is_hermitian()) throw std::invalid_argument("eig_hermitian: input is not Hermitian");

    const int n = a.dim();
    Mat m = hermitize(a);
    Mat v = Mat::identity(n);

    const double scale = std::max(1.0, m.max_abs());
    const double stop = 1e-30 * scale * scale;
    constexpr int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps && offdiag_sq(m) > stop; ++sweep) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) jacobi_rotate(m, v, p, q);
    }

    EigenSystem es;
    es.dim = n;
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.begin() + n,
              [&](int i, int j) { return m(i, i).real() > m(j, j).real(); });
    es.vectors = Mat(n);
    for (int k = 0; k < n; ++k) {
        es.values[k] = m(order[k], order[k]).real();
        for (int r = 0; r < n; ++r) es.vectors(r, k) = v(r, order[k]);
    }
    return es;
}

double trace_norm(const Mat& a) {
    // Singular values as sqrt eig(a^+ a); a is always square here.
    const Mat ata = hermitize(a.adjoint() * a);
    const EigenSystem es = eig_hermitian(ata);
    double s = 0.0;
    for (int k = 0; k < es.dim; ++k) s += std::sqrt(std::max(0.0, es.values[k]));
    return s;
}

double min_eigenvalue(const Mat& a) {
    const EigenSystem es = eig_hermitian(a);
    return es.values[es.dim - 1];
}

}  // namespace qpt
