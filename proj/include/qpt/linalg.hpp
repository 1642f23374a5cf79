#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace qpt {

using cplx = std::complex<double>;

namespace tol {
// Relative Hermiticity tolerance: max |A_ij - conj(A_ji)| <= hermiticity * (1 + max|A|).
inline constexpr double hermiticity = 1e-12;
// Eigendecomposition residuals: ||A - V diag(l) V^+||_max and ||V^+V - 1||_max.
inline constexpr double eigen_reconstruction = 1e-10;
// Density matrices: trace deviation and eigenvalue floor.
inline constexpr double state_trace = 1e-12;
inline constexpr double state_positivity = -1e-10;
}  // namespace tol

/// Dense complex matrix of dimension 2 or 4, row-major in a fixed buffer.
/// Everything in this project is a qubit (2x2) or qubit-pair (4x4) operator,
/// so there is no dynamic allocation anywhere on the hot paths.
class Mat {
public:
    Mat() : dim_(0), e_{} {}
    explicit Mat(int dim) : dim_(dim), e_{} { check_dim(dim); }

    static Mat zero(int dim) { return Mat(dim); }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    cplx& operator()(int i, int j) { return e_[i * dim_ + j]; }
    const cplx& operator()(int i, int j) const { return e_[i * dim_ + j]; }

    Mat& operator+=(const Mat& o) {
        require_same_dim(o);
        for (int k = 0; k < dim_ * dim_; ++k) e_[k] += o.e_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        require_same_dim(o);
        for (int k = 0; k < dim_ * dim_; ++k) e_[k] -= o.e_[k];
        return *this;
    }
    Mat& operator*=(cplx s) {
        for (int k = 0; k < dim_ * dim_; ++k) e_[k] *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, cplx s) { return a *= s; }
    friend Mat operator*(cplx s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        a.require_same_dim(b);
        const int n = a.dim_;
        Mat c(n);
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    Mat adjoint() const {
        Mat m(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) = std::conj((*this)(j, i));
        return m;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (int k = 0; k < dim_ * dim_; ++k) m = std::max(m, std::abs(e_[k]));
        return m;
    }

    bool is_hermitian(double rel_tol = tol::hermiticity) const {
        const double bound = rel_tol * (1.0 + max_abs());
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > bound) return false;
        return true;
    }

    bool all_finite() const {
        for (int k = 0; k < dim_ * dim_; ++k) {
            const cplx& v = e_[k];
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        }
        return true;
    }

private:
    static void check_dim(int dim) {
        if (dim != 2 && dim != 4) throw std::invalid_argument("Mat: dimension must be 2 or 4");
    }
    void require_same_dim(const Mat& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("Mat: dimension mismatch");
    }

    int dim_;
    std::array<cplx, 16> e_;
};

/// (A + A^+)/2; kills roundoff drift in products of Hermitian factors.
inline Mat hermitize(const Mat& a) {
    Mat m(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return m;
}

/// Re tr(A B); exact trace for Hermitian pairs, cheap enough for the ML loop.
inline double trace_product_real(const Mat& a, const Mat& b) {
    const int n = a.dim();
    double t = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx& x = a(i, j);
            const cplx& y = b(j, i);
            t += x.real() * y.real() - x.imag() * y.imag();
        }
    return t;
}

Mat kron(const Mat& a, const Mat& b);

Mat pauli_x();
Mat pauli_y();
Mat pauli_z();

struct EigenSystem {
    int dim = 0;
    std::array<double, 4> values{};  // first dim entries, sorted descending
    Mat vectors;                     // orthonormal eigenvector columns
};

/// Cyclic Jacobi diagonalization of a Hermitian 2x2 or 4x4 matrix.
/// Throws std::invalid_argument if the input violates the Hermiticity tolerance.
EigenSystem eig_hermitian(const Mat& a);

/// Sum of singular values, computed as sqrt of the eigenvalues of a^+ a.
double trace_norm(const Mat& a);

/// Smallest eigenvalue of a Hermitian matrix (flags unphysical estimates).
double min_eigenvalue(const Mat& a);

}  // namespace qpt
