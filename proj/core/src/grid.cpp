#include "mfglab/grid.hpp"

#include "mfglab/errors.hpp"

#include <stdexcept>

namespace mfg {

SpatialGrid SpatialGrid::uniform(double x_min, double x_max, std::size_t n_x) {
    if (!(x_min < x_max))
        throw std::invalid_argument("SpatialGrid: x_min must be < x_max");
    if (n_x < 16)
        throw std::invalid_argument("SpatialGrid: need at least 16 nodes");
    return SpatialGrid{x_min, x_max, n_x};
}

std::vector<double> SpatialGrid::points() const {
    std::vector<double> xs(n_x);
    for (std::size_t i = 0; i < n_x; ++i) xs[i] = point(i);
    return xs;
}

TimeMesh TimeMesh::uniform(double horizon, std::size_t n_t) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("TimeMesh: horizon must be positive");
    if (n_t < 2)
        throw std::invalid_argument("TimeMesh: need at least 2 nodes");
    return TimeMesh{horizon, n_t};
}

namespace detail {

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where) {
    if (!(a == b)) throw GridMismatch(std::string(where) + ": spatial grids differ");
}

void require_same_mesh(const TimeMesh& a, const TimeMesh& b, const char* where) {
    if (!(a == b)) throw GridMismatch(std::string(where) + ": time meshes differ");
}

} // namespace detail
} // namespace mfg
