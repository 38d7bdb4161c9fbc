#pragma once

#include "mfglab/array2d.hpp"
#include "mfglab/grid.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace mfg {

/// Tolerance for |mass - 1| on normalized densities.
inline constexpr double mass_tol = 1e-6;

/// Trapezoid quadrature of nodal values over the grid.
double trapezoid(const SpatialGrid& grid, const std::vector<double>& values);

/// Probability density sampled on the nodes of a SpatialGrid, trapezoid mass 1.
struct Density {
    SpatialGrid grid;
    std::vector<double> values;

    /// Wraps nodal values, clips tiny negatives to zero and renormalizes to mass 1.
    static Density from_values(const SpatialGrid& grid, std::vector<double> values);

    static Density gaussian(const SpatialGrid& grid, double mean, double variance);
    static Density uniform_on(const SpatialGrid& grid, double lo, double hi);
    /// Equal-weight two-component Gaussian mixture.
    static Density bimodal(const SpatialGrid& grid, double m1, double v1, double m2, double v2);
    /// Grid-scale spike at the node nearest to x0.
    static Density point_mass(const SpatialGrid& grid, double x0);

    double mass() const { return trapezoid(grid, values); }
    double sup() const;
    /// Cumulative distribution at every grid node (trapezoid prefix sums).
    std::vector<double> cdf() const;
};

/// Time-indexed family of densities on a common grid (frame j = time node j).
struct DensityFlow {
    TimeMesh mesh;
    SpatialGrid grid;
    Array2d frames; // (n_t, n_x)

    Density frame(std::size_t j) const;
    /// Linear interpolation between the two frames bracketing time t.
    Density at_time(double t) const;
    std::vector<double> mean_curve() const;
};

/// First moment of a density (trapezoid quadrature of x * m(x)).
double mean_of(const Density& d);

/// L2 norm sqrt(integral of values^2) over the grid.
double l2_norm(const SpatialGrid& grid, const std::vector<double>& values);

double sup_norm(const std::vector<double>& values);

/// 1-Wasserstein distance on the grid: integral of |CDF_mu - CDF_nu|.
double mk_distance(const Density& mu, const Density& nu);

/// Sup over time nodes of mk_distance between matching frames.
double flow_distance(const DensityFlow& a, const DensityFlow& b);

/// Draws a random Gaussian-mixture density; used by property checks.
Density random_mixture(const SpatialGrid& grid, std::uint64_t seed);

} // namespace mfg
