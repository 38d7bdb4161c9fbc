#pragma once

#include "mfglab/density.hpp"
#include "mfglab/fields.hpp"
#include "mfglab/grid.hpp"

#include <functional>
#include <vector>

namespace mfg {

using SigmaFn = std::function<double(double)>;

enum class TimeScheme { ImplicitEuler, CrankNicolson };

/// Forward Kolmogorov solve of
///     m_t + (b m)_x = (sigma(x)^2 m)_xx / 2,   m(0) = init,
/// with zero-flux boundaries on the truncated interval.
///
/// Node-centered finite volumes (half cells at the boundary, so the discrete
/// invariant is exactly the trapezoid mass) with first-order upwinding of the
/// advective face flux by the sign of the face drift. Implicit Euler steps by
/// default give an M-matrix, hence nonnegative frames.
DensityFlow solve_fp_forward(const DriftField& drift, const SigmaFn& sigma,
                             const Density& init, const TimeMesh& mesh,
                             TimeScheme scheme = TimeScheme::ImplicitEuler);

/// Backward solve of the linear equation
///     -v_t - b(t,x) v_x = sigma(x)^2 v_xx / 2 + source(t,x),   v(T,.) = terminal,
/// which is the frozen-control form of the Hamilton-Jacobi equation.
///
/// Advection is upwinded by the sign of b; the boundary closure is v_xx = 0
/// (linear extrapolation ghosts), so affine-in-x far fields pass through the
/// truncation unchanged. Returns the value matrix together with its gradient.
ValueField solve_hjb_backward(const DriftField& drift, const SigmaFn& sigma,
                              const Array2d& source, const std::vector<double>& terminal,
                              const TimeMesh& mesh, const SpatialGrid& grid,
                              TimeScheme scheme = TimeScheme::ImplicitEuler);

/// Backward solve of the nonlinear equation
///     -v_t + H(v_x) = sigma(x)^2 v_xx / 2 + source(t,x)
/// by policy iteration within each implicit step. `control` maps a gradient to
/// the maximizing control (resolving kinks however the caller wants) and
/// `control_cost` is the running control cost l(gamma), so that
/// H(p) = -l(control(p)) - p * control(p) at the returned controls.
/// The realized feedback drift (= the chosen controls) is returned alongside.
struct PolicySolution {
    ValueField value;
    DriftField drift;
};
PolicySolution solve_hjb_policy(const std::function<double(double)>& control,
                                const std::function<double(double)>& control_cost,
                                const SigmaFn& sigma, const Array2d& source,
                                const std::vector<double>& terminal, const TimeMesh& mesh,
                                const SpatialGrid& grid);

} // namespace mfg
