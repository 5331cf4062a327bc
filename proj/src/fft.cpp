#include "geovi/fft.hpp"

#include <cmath>

#include "geovi/errors.hpp"

namespace geovi {

void fft_radix2(CVec& a, bool adjoint) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw BadShape("fft_radix2: length must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = adjoint ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const Cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const Cplx u = a[i + j];
                const Cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (adjoint) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

CVec dft(const Grid& grid, const CVec& in, bool adjoint) {
    if (in.size() != grid.size()) throw DimensionMismatch("dft: data does not match grid");
    CVec out = in;
    if (grid.ndim() == 1) {
        fft_radix2(out, adjoint);
        return out;
    }
    const std::size_t n0 = grid.shape()[0], n1 = grid.shape()[1];
    CVec row(n1), col(n0);
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) row[j] = out[i * n1 + j];
        fft_radix2(row, adjoint);
        for (std::size_t j = 0; j < n1; ++j) out[i * n1 + j] = row[j];
    }
    for (std::size_t j = 0; j < n1; ++j) {
        for (std::size_t i = 0; i < n0; ++i) col[i] = out[i * n1 + j];
        fft_radix2(col, adjoint);
        for (std::size_t i = 0; i < n0; ++i) out[i * n1 + j] = col[i];
    }
    return out;
}

}  // namespace geovi
