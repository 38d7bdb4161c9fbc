#pragma once

#include "mfglab/cost.hpp"
#include "mfglab/density.hpp"
#include "mfglab/hamiltonian.hpp"
#include "mfglab/pde.hpp"

namespace mfg {

/// One mean field game instance on a truncated interval:
/// backward equation  -v_t + H(v_x) = sigma(x)^2 v_xx / 2 + F(x, m(t)),
///                     v(T,.) = G(., m(T)),
/// forward equation    m_t - (H'(v_x) m)_x = (sigma(x)^2 m)_xx / 2,  m(0) = init.
struct MfgProblem {
    Hamiltonian ham;
    SigmaFn sigma;
    CostSpec running;  // F
    CostSpec terminal; // G
    Density init;
    TimeMesh mesh;

    const SpatialGrid& grid() const { return init.grid; }
};

/// Suggested half-width of the truncation interval: initial support plus the
/// largest drift excursion plus six diffusion standard deviations.
double suggested_truncation(double support_radius, double drift_lo, double drift_hi,
                            double sigma_max, double horizon);

} // namespace mfg
