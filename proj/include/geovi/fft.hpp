#pragma once

#include "geovi/grid.hpp"

namespace geovi {

// Discrete Fourier transform on a power-of-two grid (iterative radix-2 with
// bit-reversal permutation, axis by axis for 2-D).  Convention:
//   forward:  X_k = sum_x s_x exp(-2 pi i k.x / n)   (no prefactor)
//   adjoint:  s_x = (1/size) sum_k X_k exp(+2 pi i k.x / n)
// so dft(grid, dft(grid, s, false), true) == s up to round-off.
CVec dft(const Grid& grid, const CVec& in, bool adjoint);

// Single-axis transform of a length-n power-of-two signal, in place.
// `adjoint` flips the twiddle sign and divides by n at the end.
void fft_radix2(CVec& a, bool adjoint);

}  // namespace geovi
