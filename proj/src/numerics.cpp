#include "urnlab/numerics.hpp"
#include "urnlab/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace urnlab {

std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

EvalMode parse_eval_mode(const std::string& s) {
    if (s == "exact") return EvalMode::Exact;
    if (s == "mc") return EvalMode::MonteCarlo;
    if (s == "auto") return EvalMode::Auto;
    throw std::invalid_argument("unknown mode '" + s + "' (expected exact|mc|auto)");
}

SquareMatrix::SquareMatrix(int dim, double fill) : dim_(dim) {
    if (dim < 0) throw std::invalid_argument("SquareMatrix: negative dimension");
    a_.assign(static_cast<std::size_t>(dim) * dim, fill);
}

SquareMatrix SquareMatrix::identity(int dim) {
    SquareMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

double SquareMatrix::max_abs() const {
    double v = 0.0;
    for (double x : a_) v = std::max(v, std::fabs(x));
    return v;
}

bool SquareMatrix::is_symmetric(double tol) const {
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j)
            if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

static void check_same_dim(const SquareMatrix& a, const SquareMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimension mismatch");
}

SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b) {
    check_same_dim(a, b);
    SquareMatrix r(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b) {
    check_same_dim(a, b);
    SquareMatrix r(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    check_same_dim(a, b);
    const int n = a.dim();
    SquareMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

SquareMatrix operator*(double s, const SquareMatrix& a) {
    SquareMatrix r(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) r(i, j) = s * a(i, j);
    return r;
}

SquareMatrix minor_matrix(const SquareMatrix& a, int i, int j) {
    const int n = a.dim();
    if (n < 1) throw std::out_of_range("minor_matrix: empty matrix has no minors");
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::out_of_range("minor_matrix: index out of range");
    SquareMatrix r(n - 1);
    for (int r_i = 0, s_i = 0; s_i < n; ++s_i) {
        if (s_i == i) continue;
        for (int r_j = 0, s_j = 0; s_j < n; ++s_j) {
            if (s_j == j) continue;
            r(r_i, r_j) = a(s_i, s_j);
            ++r_j;
        }
        ++r_i;
    }
    return r;
}

double determinant(const SquareMatrix& a) {
    const int n = a.dim();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);

    SquareMatrix m = a;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(m(r, col)) > std::fabs(m(piv, col))) piv = r;
        if (m(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            det = -det;
        }
        det *= m(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
        }
    }
    return det;
}

SymmetricEigen jacobi_eigen(const SquareMatrix& a_in) {
    const int n = a_in.dim();
    const double scale = std::max(1.0, a_in.max_abs());
    if (!a_in.is_symmetric(1e-12 * scale))
        throw std::domain_error("jacobi_eigen: matrix is not symmetric");

    SquareMatrix a = a_in;
    SquareMatrix v = SquareMatrix::identity(n);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-14 * scale) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    out.vectors = SquareMatrix(n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (int r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

SquareMatrix spd_sqrt_inverse(const SquareMatrix& a) {
    const SymmetricEigen eig = jacobi_eigen(a);  // symmetry checked inside
    const int n = a.dim();
    const double lmax = n ? eig.values.back() : 0.0;
    if (n == 0) return SquareMatrix(0);
    if (!(lmax > 0.0) || eig.values.front() <= 1e-12 * lmax)
        throw std::domain_error(
            "spd_sqrt_inverse: matrix is not positive definite (degenerate increments)");

    SquareMatrix b(n);
    for (int k = 0; k < n; ++k) {
        const double w = 1.0 / std::sqrt(eig.values[k]);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                b(i, j) += w * eig.vectors(i, k) * eig.vectors(j, k);
    }
    return b;
}

std::vector<double> solve_spd(const SquareMatrix& a, const std::vector<double>& b) {
    const int n = a.dim();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("solve_spd: size mismatch");
    const SymmetricEigen eig = jacobi_eigen(a);
    const double lmax = n ? std::fabs(eig.values.back()) : 0.0;
    if (!(lmax > 0.0) || eig.values.front() <= 1e-14 * lmax)
        throw std::domain_error("solve_spd: matrix is numerically singular");
    std::vector<double> x(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += eig.vectors(i, k) * b[i];
        proj /= eig.values[k];
        for (int i = 0; i < n; ++i) x[i] += proj * eig.vectors(i, k);
    }
    return x;
}

double std_normal_cdf(double x) {
    // erfc-based evaluation keeps absolute error at the few-ulp level over
    // the whole line and underflows cleanly in the far tails.
    static const double inv_sqrt2 = 0.70710678118654752440;
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const std::vector<double>& a) {
    double v = 0.0;
    for (double x : a) v = std::max(v, std::fabs(x));
    return v;
}

}  // namespace urnlab
