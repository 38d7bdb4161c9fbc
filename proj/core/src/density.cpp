#include "mfglab/density.hpp"

#include "mfglab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mfg {

double trapezoid(const SpatialGrid& grid, const std::vector<double>& values) {
    if (values.size() != grid.n_x)
        throw GridMismatch("trapezoid: value count does not match grid");
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * grid.h();
}

Density Density::from_values(const SpatialGrid& grid, std::vector<double> values) {
    if (values.size() != grid.n_x)
        throw GridMismatch("Density: value count does not match grid");
    for (double& v : values) {
        if (v < 0.0) {
            if (v < -1e-10) throw std::invalid_argument("Density: negative values");
            v = 0.0;
        }
    }
    const double m = trapezoid(grid, values);
    if (!(m > 0.0)) throw std::invalid_argument("Density: zero mass");
    for (double& v : values) v /= m;
    return Density{grid, std::move(values)};
}

Density Density::gaussian(const SpatialGrid& grid, double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("Density::gaussian: variance <= 0");
    std::vector<double> vals(grid.n_x);
    const double c = 1.0 / std::sqrt(2.0 * M_PI * variance);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double z = grid.point(i) - mean;
        vals[i] = c * std::exp(-z * z / (2.0 * variance));
    }
    return from_values(grid, std::move(vals));
}

Density Density::uniform_on(const SpatialGrid& grid, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("Density::uniform_on: lo >= hi");
    std::vector<double> vals(grid.n_x, 0.0);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double x = grid.point(i);
        if (x >= lo && x <= hi) vals[i] = 1.0;
    }
    return from_values(grid, std::move(vals));
}

Density Density::bimodal(const SpatialGrid& grid, double m1, double v1, double m2, double v2) {
    Density a = gaussian(grid, m1, v1);
    Density b = gaussian(grid, m2, v2);
    std::vector<double> vals(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) vals[i] = 0.5 * (a.values[i] + b.values[i]);
    return from_values(grid, std::move(vals));
}

Density Density::point_mass(const SpatialGrid& grid, double x0) {
    std::vector<double> vals(grid.n_x, 0.0);
    const double h = grid.h();
    std::size_t k = 0;
    double best = std::abs(grid.point(0) - x0);
    for (std::size_t i = 1; i < grid.n_x; ++i) {
        const double d = std::abs(grid.point(i) - x0);
        if (d < best) { best = d; k = i; }
    }
    vals[k] = 1.0 / h;
    return from_values(grid, std::move(vals));
}

double Density::sup() const { return sup_norm(values); }

std::vector<double> Density::cdf() const {
    std::vector<double> F(values.size(), 0.0);
    const double h = grid.h();
    for (std::size_t i = 1; i < values.size(); ++i)
        F[i] = F[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    return F;
}

Density DensityFlow::frame(std::size_t j) const {
    return Density{grid, frames.row_copy(j)};
}

Density DensityFlow::at_time(double t) const {
    const double dt = mesh.dt();
    if (t <= 0.0) return frame(0);
    if (t >= mesh.horizon) return frame(mesh.n_t - 1);
    const double s = t / dt;
    const auto j = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(j);
    if (w == 0.0 || j + 1 >= mesh.n_t) return frame(j);
    std::vector<double> vals(grid.n_x);
    const double* lo = frames.row(j);
    const double* hi = frames.row(j + 1);
    for (std::size_t i = 0; i < grid.n_x; ++i) vals[i] = (1.0 - w) * lo[i] + w * hi[i];
    return Density{grid, std::move(vals)};
}

std::vector<double> DensityFlow::mean_curve() const {
    std::vector<double> ms(mesh.n_t);
    for (std::size_t j = 0; j < mesh.n_t; ++j) ms[j] = mean_of(frame(j));
    return ms;
}

double mean_of(const Density& d) {
    std::vector<double> xm(d.values.size());
    for (std::size_t i = 0; i < xm.size(); ++i) xm[i] = d.grid.point(i) * d.values[i];
    return trapezoid(d.grid, xm);
}

double l2_norm(const SpatialGrid& grid, const std::vector<double>& values) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = values[i] * values[i];
    return std::sqrt(trapezoid(grid, sq));
}

double sup_norm(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double mk_distance(const Density& mu, const Density& nu) {
    detail::require_same_grid(mu.grid, nu.grid, "mk_distance");
    const auto Fm = mu.cdf();
    const auto Fn = nu.cdf();
    std::vector<double> diff(Fm.size());
    for (std::size_t i = 0; i < Fm.size(); ++i) diff[i] = std::abs(Fm[i] - Fn[i]);
    return trapezoid(mu.grid, diff);
}

double flow_distance(const DensityFlow& a, const DensityFlow& b) {
    detail::require_same_grid(a.grid, b.grid, "flow_distance");
    detail::require_same_mesh(a.mesh, b.mesh, "flow_distance");
    double worst = 0.0;
    for (std::size_t j = 0; j < a.mesh.n_t; ++j)
        worst = std::max(worst, mk_distance(a.frame(j), b.frame(j)));
    return worst;
}

Density random_mixture(const SpatialGrid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double span = grid.x_max - grid.x_min;
    // Keep the mixture well inside the truncation so boundary mass stays negligible.
    std::uniform_real_distribution<double> center(grid.x_min + 0.35 * span,
                                                  grid.x_max - 0.35 * span);
    std::uniform_real_distribution<double> var(0.05 * span * 0.05 * span,
                                               0.12 * span * 0.12 * span);
    std::uniform_real_distribution<double> weight(0.2, 0.8);
    const double w = weight(rng);
    Density a = Density::gaussian(grid, center(rng), var(rng));
    Density b = Density::gaussian(grid, center(rng), var(rng));
    std::vector<double> vals(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i)
        vals[i] = w * a.values[i] + (1.0 - w) * b.values[i];
    return Density::from_values(grid, std::move(vals));
}

} // namespace mfg
