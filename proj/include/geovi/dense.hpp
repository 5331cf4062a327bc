#pragma once

#include <cstddef>
#include <vector>

#include "geovi/vec.hpp"

namespace geovi {

// Row-major dense matrix for the low-dimensional paths (direct optimization,
// dense metric diagnostics, log-determinants).  Everything here is plain
// O(n^3) textbook linear algebra; desk-scale dimensions only.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }

    Vec matvec(const Vec& x) const;
    Vec matvec_t(const Vec& x) const;  // transpose(A) * x
    DenseMatrix transpose() const;
    DenseMatrix mul(const DenseMatrix& other) const;

    // A += alpha * B
    void add_scaled(const DenseMatrix& other, double alpha);

    double max_abs_diff(const DenseMatrix& other) const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

// Lower-triangular Cholesky factor of an SPD matrix.  Throws
// NotPositiveDefinite when a pivot is not strictly positive.
DenseMatrix cholesky(const DenseMatrix& a);

// log det A for SPD A, via Cholesky (2 * sum log diag L).
double cholesky_logdet(const DenseMatrix& a);

// Solve A x = b for SPD A using an existing Cholesky factor.
Vec cholesky_solve(const DenseMatrix& chol_l, const Vec& b);

// Solve A x = b by Gaussian elimination with partial pivoting (general A).
Vec gauss_solve(DenseMatrix a, Vec b);

// Inverse via Gaussian elimination; small n only.
DenseMatrix gauss_inverse(const DenseMatrix& a);

// log |det A| and the sign of det A for general square A, via partially
// pivoted LU.  Returns sign 0 (and log -inf) for a singular matrix.
struct LogDet {
    double log_abs = 0.0;
    int sign = 1;
};
LogDet gauss_logdet(DenseMatrix a);

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
// Returns eigenvalues ascending; eigenvectors as columns of `vectors`.
struct EighResult {
    Vec values;
    DenseMatrix vectors;
};
EighResult jacobi_eigh(const DenseMatrix& a, double tol = 1e-14, int max_sweeps = 64);

// Principal square root / inverse square root of an SPD matrix, through the
// symmetric eigendecomposition.  Throws NotPositiveDefinite on eigenvalues
// <= 0 (inverse root) or < -tol (root).
DenseMatrix sym_sqrt(const DenseMatrix& a);
DenseMatrix sym_inv_sqrt(const DenseMatrix& a);

}  // namespace geovi
