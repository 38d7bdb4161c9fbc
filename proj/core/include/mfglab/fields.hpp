#pragma once

#include "mfglab/array2d.hpp"
#include "mfglab/grid.hpp"

#include <vector>

namespace mfg {

/// Value function v(t, x) with its stored spatial gradient.
struct ValueField {
    TimeMesh mesh;
    SpatialGrid grid;
    Array2d v;  // (n_t, n_x)
    Array2d vx; // (n_t, n_x)
};

/// Feedback drift b(t, x) on the same mesh and grid as the PDE solves.
struct DriftField {
    TimeMesh mesh;
    SpatialGrid grid;
    Array2d b; // (n_t, n_x)

    static DriftField constant(const TimeMesh& mesh, const SpatialGrid& grid, double value);
};

/// Centered interior differences, second-order one-sided at the boundaries.
std::vector<double> spatial_gradient(const SpatialGrid& grid, const double* row);

/// Gradient of every time frame of a value matrix.
Array2d gradient_frames(const SpatialGrid& grid, const Array2d& v);

} // namespace mfg
