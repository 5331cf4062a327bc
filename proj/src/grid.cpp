#include "geovi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "geovi/errors.hpp"

namespace geovi {

namespace {

bool power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 2)
        throw BadShape("Grid: only 1-D and 2-D grids are supported");
    for (std::size_t n : shape_) {
        if (!power_of_two(n) || n < 2)
            throw BadShape("Grid: axis length " + std::to_string(n) + " is not a power of two >= 2");
        size_ *= n;
    }

    // Bin the modes by |k|.  Magnitudes along an axis are integers (folded
    // frequencies), so binning by rounded squared magnitude is exact.
    std::map<long, std::size_t> by_k2;  // k^2 -> count
    std::vector<long> mode_k2(size_);
    for (std::size_t flat = 0; flat < size_; ++flat) {
        long k2 = 0;
        for (int ax = 0; ax < ndim(); ++ax) {
            const long f = folded_freq(flat, ax);
            k2 += f * f;
        }
        mode_k2[flat] = k2;
        ++by_k2[k2];
    }
    std::map<long, std::size_t> bin_of_k2;
    for (const auto& [k2, count] : by_k2) {
        bin_of_k2[k2] = bin_kmag_.size();
        bin_kmag_.push_back(std::sqrt(static_cast<double>(k2)));
        bin_mult_.push_back(count);
    }
    mode_bin_.resize(size_);
    for (std::size_t flat = 0; flat < size_; ++flat) mode_bin_[flat] = bin_of_k2[mode_k2[flat]];
}

long Grid::folded_freq(std::size_t flat, int axis) const {
    std::size_t idx;
    if (ndim() == 1) {
        idx = flat;
    } else {
        idx = (axis == 0) ? flat / shape_[1] : flat % shape_[1];
    }
    const long n = static_cast<long>(shape_[axis]);
    const long k = static_cast<long>(idx);
    return (k <= n / 2) ? k : k - n;
}

double Grid::kmag(std::size_t flat) const {
    double k2 = 0.0;
    for (int ax = 0; ax < ndim(); ++ax) {
        const double f = static_cast<double>(folded_freq(flat, ax));
        k2 += f * f;
    }
    return std::sqrt(k2);
}

std::size_t Grid::conjugate_index(std::size_t flat) const {
    if (ndim() == 1) {
        const std::size_t n = shape_[0];
        return (n - flat) % n;
    }
    const std::size_t n0 = shape_[0], n1 = shape_[1];
    const std::size_t i = flat / n1, j = flat % n1;
    return ((n0 - i) % n0) * n1 + (n1 - j) % n1;
}

CVec hermitian_pack(const Grid& grid, const Vec& xi) {
    require_dim(xi, grid.size(), "hermitian_pack");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CVec c(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t kc = grid.conjugate_index(k);
        if (kc == k) {
            c[k] = Cplx(xi[k], 0.0);
        } else if (k < kc) {
            c[k] = Cplx(xi[k] * inv_sqrt2, xi[kc] * inv_sqrt2);
            c[kc] = std::conj(c[k]);
        }
    }
    return c;
}

Vec hermitian_pack_adjoint(const Grid& grid, const CVec& u) {
    if (u.size() != grid.size()) throw DimensionMismatch("hermitian_pack_adjoint: size mismatch");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Vec out(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::size_t kc = grid.conjugate_index(k);
        if (kc == k) {
            out[k] = u[k].real();
        } else if (k < kc) {
            out[k] = (u[k].real() + u[kc].real()) * inv_sqrt2;
            out[kc] = (u[k].imag() - u[kc].imag()) * inv_sqrt2;
        }
    }
    return out;
}

}  // namespace geovi
