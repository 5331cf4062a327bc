#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "geovi/vec.hpp"

namespace geovi {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

// Regular periodic grid, 1-D or 2-D, power-of-two extent per axis.  Mode
// indices are flat row-major positions in the conjugate (Fourier) space of
// the same shape; integer frequencies are folded to the symmetric range
// (-n/2, n/2].
class Grid {
  public:
    explicit Grid(std::vector<std::size_t> shape);

    int ndim() const { return static_cast<int>(shape_.size()); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return size_; }

    // Folded integer frequency of a flat mode index along one axis.
    long folded_freq(std::size_t flat, int axis) const;

    // |k| of a flat mode index in units of the fundamental frequency.
    double kmag(std::size_t flat) const;

    // Flat index of the complex-conjugate partner mode (-k mod n per axis).
    std::size_t conjugate_index(std::size_t flat) const;

    // Distinct |k| magnitudes: bins[0] = 0 (zero mode), then ascending.
    // mode_bin maps a flat mode index to its bin; multiplicity counts modes
    // per bin.
    const std::vector<double>& bin_kmag() const { return bin_kmag_; }
    const std::vector<std::size_t>& mode_bin() const { return mode_bin_; }
    const std::vector<std::size_t>& bin_multiplicity() const { return bin_mult_; }
    std::size_t n_bins() const { return bin_kmag_.size(); }

  private:
    std::vector<std::size_t> shape_;
    std::size_t size_ = 1;
    std::vector<double> bin_kmag_;
    std::vector<std::size_t> mode_bin_;
    std::vector<std::size_t> bin_mult_;
};

// Real excitations -> Hermitian complex mode set.  Self-conjugate modes take
// one real latent; a conjugate pair (k, -k) takes two latents a, b as
// (a + ib)/sqrt(2) so each complex mode has unit expected squared magnitude.
CVec hermitian_pack(const Grid& grid, const Vec& xi);

// Adjoint of hermitian_pack as a real-linear map.
Vec hermitian_pack_adjoint(const Grid& grid, const CVec& u);

}  // namespace geovi
