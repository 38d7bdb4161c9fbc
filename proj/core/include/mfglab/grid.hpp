#pragma once

#include <cstddef>
#include <vector>

namespace mfg {

/// Uniform spatial grid on a truncated interval [x_min, x_max].
struct SpatialGrid {
    double x_min = -1.0;
    double x_max = 1.0;
    std::size_t n_x = 0;

    static SpatialGrid uniform(double x_min, double x_max, std::size_t n_x);

    double h() const { return (x_max - x_min) / static_cast<double>(n_x - 1); }
    double point(std::size_t i) const { return x_min + h() * static_cast<double>(i); }
    std::vector<double> points() const;

    bool operator==(const SpatialGrid&) const = default;
};

/// Uniform time mesh on [0, horizon] with n_t nodes (n_t - 1 steps).
struct TimeMesh {
    double horizon = 1.0;
    std::size_t n_t = 0;

    static TimeMesh uniform(double horizon, std::size_t n_t);

    double dt() const { return horizon / static_cast<double>(n_t - 1); }
    double time(std::size_t j) const { return dt() * static_cast<double>(j); }

    bool operator==(const TimeMesh&) const = default;
};

namespace detail {
void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where);
void require_same_mesh(const TimeMesh& a, const TimeMesh& b, const char* where);
} // namespace detail

} // namespace mfg
