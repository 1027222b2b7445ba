#pragma once

#include <cstddef>
#include <vector>

namespace urnlab {

// Dense row-major square matrix for the small fixed dimensions used by the
// model (d <= 8). Everything here is plain value semantics; the statistical
// modules never need more than a handful of these per call.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(int dim, double fill = 0.0);

    static SquareMatrix identity(int dim);

    int dim() const { return dim_; }

    double& operator()(int i, int j) {
        return a_[static_cast<std::size_t>(i) * dim_ + static_cast<std::size_t>(j)];
    }
    double operator()(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * dim_ + static_cast<std::size_t>(j)];
    }

    const std::vector<double>& data() const { return a_; }

    double max_abs() const;
    bool is_symmetric(double tol) const;

private:
    int dim_ = 0;
    std::vector<double> a_;
};

SquareMatrix operator+(const SquareMatrix& a, const SquareMatrix& b);
SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b);
SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);
SquareMatrix operator*(double s, const SquareMatrix& a);

// Submatrix with row i and column j removed (0-based indices).
SquareMatrix minor_matrix(const SquareMatrix& a, int i, int j);

// Determinant by partial-pivoting elimination. The 0x0 matrix has
// determinant 1 (empty product); the d=1 determinant ratios rely on that.
double determinant(const SquareMatrix& a);

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    SquareMatrix vectors;        // column k pairs with values[k]
};

// Cyclic Jacobi rotations, at most 100 sweeps, off-diagonal tolerance
// 1e-14 relative to the input scale. Input must be symmetric.
SymmetricEigen jacobi_eigen(const SquareMatrix& a);

// B = A^{-1/2} for symmetric positive definite A, so that B*A*B = I.
// Throws std::domain_error when A is not symmetric or not positive
// definite (the latter signals a degenerate increment distribution).
SquareMatrix spd_sqrt_inverse(const SquareMatrix& a);

// Solve A x = b for symmetric positive definite A via the Jacobi
// eigendecomposition; small dims only.
std::vector<double> solve_spd(const SquareMatrix& a, const std::vector<double>& b);

// Standard normal distribution function, absolute error well below 1e-12,
// saturating at 0/1 for extreme arguments.
double std_normal_cdf(double x);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);
double norm_inf(const std::vector<double>& a);

}  // namespace urnlab
