#pragma once

#include <cstddef>
#include <vector>

#include "geovi/dense.hpp"
#include "geovi/model.hpp"
#include "geovi/vec.hpp"

namespace geovi {

// Brute-force density oracles on regular 1D/2D grids: exact (to quadrature)
// posteriors, pushforward approximations, KL divergences, moments, and
// evidence integrals.  Log densities are stored per midpoint cell; the
// midpoint rule is the quadrature throughout.

struct GridDensity {
    Vec lo, hi;                      // bounds per axis
    std::vector<std::size_t> shape;  // points per axis (1 or 2 axes)
    Vec log_density;                 // row-major over cells
    double log_norm = 0.0;           // log of the pre-normalization integral
    bool normalized = false;

    std::size_t ndim() const { return shape.size(); }
    std::size_t size() const;
    double cell_volume() const;
    Vec coord(std::size_t flat) const;  // midpoint of cell `flat`
    bool same_grid(const GridDensity& other) const;
};

GridDensity make_grid_1d(double lo, double hi, std::size_t n);
GridDensity make_grid_2d(double lo, double hi, std::size_t n);  // square [lo,hi]^2

// Normalize in place (log-sum-exp); records the log integral in log_norm.
// Throws NonNormalizable if no cell carries finite mass.
void normalize_density(GridDensity& g);

// Log of the integral of exp(log_density) over the grid.  With log_density
// filled as -H_full this is the quadrature log-evidence.
double grid_log_evidence(const GridDensity& g);

// log_density <- -H_full(xi) per cell; domain violations become -inf cells.
void fill_posterior_density(const Model& model, GridDensity& g, int threads = 1);

// Pushforward of the unit Gaussian through the inverse expansion transform,
// shifted by m: log q(xi) = log N(g(xi - m + xi_bar); 0, 1) + log |det J_g|
// with a central finite-difference Jacobian.  Where the transform is not
// injective this is the folded (multiplicity-summed) pullback; normalize
// before comparing.
void fill_transformed_density(const Model& model, const Vec& xi_bar, const Vec& m,
                              GridDensity& g, int threads = 1);

// Multivariate normal with the given mean and covariance.
void fill_gaussian_density(const Vec& mean, const DenseMatrix& cov, GridDensity& g);

struct GridMoments {
    Vec mean;
    DenseMatrix cov;
};
GridMoments grid_moments(const GridDensity& g);

// (KL(P;Q), KL(Q;P)) in nats over the shared grid.  Both inputs are
// normalized internally.  Cells whose reference mass underflows to zero are
// mass-free and skipped; a zero-Q cell under finite P mass yields +inf.
struct KlPair {
    double pq = 0.0;
    double qp = 0.0;
};
KlPair grid_kl(const GridDensity& p, const GridDensity& q);

// Axis marginal of a normalized 2D density (result is normalized 1D).
GridDensity grid_marginal(const GridDensity& g, std::size_t axis);

// Per-cell mass fractions of scalar samples binned on a 1D grid (values
// outside the bounds are clipped into the edge cells).
Vec histogram_masses(const GridDensity& proto_1d, const std::vector<double>& values);

// Total variation distance between two discrete mass vectors.
double total_variation(const Vec& w1, const Vec& w2);

}  // namespace geovi
