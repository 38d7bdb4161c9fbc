#include "mfglab/fields.hpp"

namespace mfg {

DriftField DriftField::constant(const TimeMesh& mesh, const SpatialGrid& grid, double value) {
    return DriftField{mesh, grid, Array2d(mesh.n_t, grid.n_x, value)};
}

std::vector<double> spatial_gradient(const SpatialGrid& grid, const double* row) {
    const std::size_t n = grid.n_x;
    const double h = grid.h();
    std::vector<double> g(n);
    g[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (row[i + 1] - row[i - 1]) / (2.0 * h);
    g[n - 1] = (3.0 * row[n - 1] - 4.0 * row[n - 2] + row[n - 3]) / (2.0 * h);
    return g;
}

Array2d gradient_frames(const SpatialGrid& grid, const Array2d& v) {
    Array2d g(v.rows(), v.cols());
    for (std::size_t j = 0; j < v.rows(); ++j) {
        const auto gj = spatial_gradient(grid, v.row(j));
        for (std::size_t i = 0; i < v.cols(); ++i) g(j, i) = gj[i];
    }
    return g;
}

} // namespace mfg
