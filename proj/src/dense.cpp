#include "geovi/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "geovi/errors.hpp"

namespace geovi {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vec DenseMatrix::matvec(const Vec& x) const {
    require_dim(x, cols_, "DenseMatrix::matvec");
    Vec y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        const double* row = &a_[i * cols_];
        for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

Vec DenseMatrix::matvec_t(const Vec& x) const {
    require_dim(x, rows_, "DenseMatrix::matvec_t");
    Vec y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* row = &a_[i * cols_];
        for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * x[i];
    }
    return y;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::mul(const DenseMatrix& other) const {
    if (cols_ != other.rows_) throw DimensionMismatch("DenseMatrix::mul: inner dims differ");
    DenseMatrix c(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j) c(i, j) += aik * other(k, j);
        }
    return c;
}

void DenseMatrix::add_scaled(const DenseMatrix& other, double alpha) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DimensionMismatch("DenseMatrix::add_scaled: shape mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += alpha * other.a_[i];
}

double DenseMatrix::max_abs_diff(const DenseMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw DimensionMismatch("DenseMatrix::max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::fabs(a_[i] - other.a_[i]));
    return m;
}

DenseMatrix cholesky(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("cholesky: matrix not square");
    const std::size_t n = a.rows();
    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) +
                                      " not positive (" + std::to_string(d) + ")");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

double cholesky_logdet(const DenseMatrix& a) {
    DenseMatrix l = cholesky(a);
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

Vec cholesky_solve(const DenseMatrix& l, const Vec& b) {
    const std::size_t n = l.rows();
    require_dim(b, n, "cholesky_solve");
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    Vec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

Vec gauss_solve(DenseMatrix a, Vec b) {
    if (a.rows() != a.cols()) throw DimensionMismatch("gauss_solve: matrix not square");
    const std::size_t n = a.rows();
    require_dim(b, n, "gauss_solve");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::fabs(a(col, col));
        for (std::size_t i = col + 1; i < n; ++i) {
            const double v = std::fabs(a(i, col));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) throw Error("gauss_solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = a(i, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
            b[i] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

DenseMatrix gauss_inverse(const DenseMatrix& a) {
    const std::size_t n = a.rows();
    DenseMatrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n, 0.0);
        e[j] = 1.0;
        Vec col = gauss_solve(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

LogDet gauss_logdet(DenseMatrix a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("gauss_logdet: matrix not square");
    const std::size_t n = a.rows();
    LogDet res;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(pivot, k))) pivot = i;
        if (a(pivot, k) == 0.0) {
            res.log_abs = -std::numeric_limits<double>::infinity();
            res.sign = 0;
            return res;
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pivot, j));
            res.sign = -res.sign;
        }
        const double d = a(k, k);
        res.log_abs += std::log(std::fabs(d));
        if (d < 0.0) res.sign = -res.sign;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / d;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return res;
}

EighResult jacobi_eigh(const DenseMatrix& a_in, double tol, int max_sweeps) {
    if (a_in.rows() != a_in.cols()) throw DimensionMismatch("jacobi_eigh: matrix not square");
    const std::size_t n = a_in.rows();
    DenseMatrix a = a_in;
    DenseMatrix v = DenseMatrix::identity(n);

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::fabs(a(i, j)));
        if (off <= tol * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    Vec vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = a(i, i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return vals[i] < vals[j]; });

    EighResult r;
    r.values.resize(n);
    r.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        r.values[j] = vals[order[j]];
        for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i, order[j]);
    }
    return r;
}

namespace {

DenseMatrix eig_transform(const DenseMatrix& a, bool inverse, const char* what) {
    EighResult e = jacobi_eigh(a);
    const std::size_t n = a.rows();
    const double lmax = std::fabs(e.values.back());
    DenseMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double lam = e.values[k];
        if (lam <= 0.0) {
            // Tolerate tiny negative round-off for the forward root only.
            if (!inverse && lam > -1e-12 * std::max(lmax, 1.0))
                lam = 0.0;
            else
                throw NotPositiveDefinite(std::string(what) + ": eigenvalue " +
                                          std::to_string(lam) + " not positive");
        }
        const double fl = inverse ? 1.0 / std::sqrt(lam) : std::sqrt(lam);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += e.vectors(i, k) * fl * e.vectors(j, k);
    }
    return out;
}

}  // namespace

DenseMatrix sym_sqrt(const DenseMatrix& a) { return eig_transform(a, false, "sym_sqrt"); }

DenseMatrix sym_inv_sqrt(const DenseMatrix& a) { return eig_transform(a, true, "sym_inv_sqrt"); }

}  // namespace geovi
