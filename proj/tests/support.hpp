// Test-only oracles, deliberately independent of the library code paths they
// cross-check: a plain real-symmetric Jacobi eigensolver, Gaussian
// elimination, and a two-sample Kolmogorov-Smirnov statistic.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qpt/linalg.hpp"

namespace test_support {

// Eigenvalues of a real symmetric n x n matrix via explicit P^T A P sweeps.
inline std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
    auto at = [&](int i, int j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (at(p, q) == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                std::vector<double> next = a;
                auto nx = [&](int i, int j) -> double& { return next[i * n + j]; };
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        auto pcol = [&](int r, int col) {
                            if (col == p) return c * at(r, p) - s * at(r, q);
                            if (col == q) return s * at(r, p) + c * at(r, q);
                            return at(r, col);
                        };
                        double v = pcol(i, j);
                        if (i == p)
                            v = c * pcol(p, j) - s * pcol(q, j);
                        else if (i == q)
                            v = s * pcol(p, j) + c * pcol(q, j);
                        nx(i, j) = v;
                    }
                a = next;
            }
    }
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = at(i, i);
    std::sort(vals.begin(), vals.end());
    return vals;
}

// Singular values of a complex matrix through the real symmetric embedding of
// the Hermitian dilation [[0, A], [A^+, 0]]: its spectrum is {+s_i, -s_i}.
inline std::vector<double> singular_values_oracle(const qpt::Mat& m) {
    const int d = m.dim();
    const int h = 2 * d;   // Hermitian dilation dimension
    const int n = 2 * h;   // real embedding dimension
    std::vector<double> a(n * n, 0.0);
    auto put = [&](int i, int j, qpt::cplx v) {
        // complex Hermitian H -> real symmetric [[Re H, -Im H], [Im H, Re H]]
        a[i * n + j] = v.real();
        a[i * n + (j + h)] = -v.imag();
        a[(i + h) * n + j] = v.imag();
        a[(i + h) * n + (j + h)] = v.real();
    };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            put(i, d + j, m(i, j));
            put(d + j, i, std::conj(m(i, j)));
        }
    std::vector<double> vals = sym_eigenvalues(a, n);
    // The embedding doubles every dilation eigenvalue, and the dilation
    // spectrum is {+s_i, -s_i}: the top 2d values are the singular values,
    // each appearing twice.
    std::vector<double> out;
    for (int k = 0; k < d; ++k) out.push_back(vals[n - 1 - 2 * k]);
    return out;
}

// Solves A x = b (n x n, partial pivoting). Used to invert POM Gram matrices.
inline std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < n; ++j) s -= a[r * n + j] * x[j];
        x[r] = s / a[r * n + r];
    }
    return x;
}

// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
inline double ks_statistic(std::vector<double> xs, std::vector<double> ys) {
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    double stat = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i] <= ys[j])
            ++i;
        else
            ++j;
        const double f1 = static_cast<double>(i) / xs.size();
        const double f2 = static_cast<double>(j) / ys.size();
        stat = std::max(stat, std::abs(f1 - f2));
    }
    return stat;
}

// Random Hermitian matrix with entries of scale ~1 (std::mt19937, separate
// from the library's stream type).
inline qpt::Mat random_hermitian(int dim, std::mt19937& gen) {
    std::normal_distribution<double> dist(0.0, 1.0);
    qpt::Mat m(dim);
    for (int i = 0; i < dim; ++i) {
        m(i, i) = dist(gen);
        for (int j = i + 1; j < dim; ++j) {
            m(i, j) = qpt::cplx(dist(gen), dist(gen));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

inline qpt::Mat random_complex(int dim, std::mt19937& gen) {
    std::normal_distribution<double> dist(0.0, 1.0);
    qpt::Mat m(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = qpt::cplx(dist(gen), dist(gen));
    return m;
}

// Random full-rank density matrix (Wishart-style, independent of qpt::states).
inline qpt::Mat random_density(int dim, std::mt19937& gen) {
    const qpt::Mat g = random_complex(dim, gen);
    qpt::Mat w = g * g.adjoint();
    w *= qpt::cplx(1.0 / w.trace().real());
    return qpt::hermitize(w);
}

}  // namespace test_support
