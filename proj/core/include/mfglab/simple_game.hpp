#pragma once

#include "mfglab/density.hpp"
#include "mfglab/grid.hpp"

#include <cstddef>
#include <vector>

namespace mfg {

/// Quadratic-control game with terminal cost -M(mu) x and running cost c0 g^2:
/// every equilibrium is a constant control alpha_M with terminal mean M
/// solving  M(nu) = M - sgn(M) T min(|M| / (2 c0), 1).
struct SimpleGameSpec {
    double c0 = 1.0;
    double sigma = 1.0;
    double horizon = 1.0;
    double mean_init = 0.0;
};

enum class HorizonRegime { SmallHorizon, Critical, LargeHorizon };

struct ConsistencyRoot {
    double M = 0.0;
    double residual = 0.0;
    HorizonRegime regime = HorizonRegime::SmallHorizon;
    bool continuum_member = false;
};

struct RootSet {
    std::vector<ConsistencyRoot> roots; // ascending in M; empty when is_continuum
    bool is_continuum = false;
    double band_lo = 0.0; // continuum interval (closed) when is_continuum
    double band_hi = 0.0;
};

/// Left-hand side minus right-hand side of the consistency equation at M.
double consistency_residual(double M, const SimpleGameSpec& spec);

/// Closed-form root catalog via the three-way case split on |M| vs 2 c0.
/// The critical horizon T = 2 c0 with zero initial mean yields a continuum.
RootSet enumerate_roots(const SimpleGameSpec& spec);

/// The constant equilibrium control associated with terminal mean M.
double feedback_level(double M, double c0);

/// Closed-form value of the constant-control equilibrium at (t, x).
double value_function(const SimpleGameSpec& spec, double M, double t, double x);

/// Independent root finder: scans the residual on a fine grid and bisects
/// each sign change. Near the critical horizon the residual flattens to zero
/// on an interval, which is reported as a continuum indicator.
struct BruteForceResult {
    std::vector<double> roots;
    bool continuum_detected = false;
};
BruteForceResult brute_force_roots(const SimpleGameSpec& spec, double lo, double hi,
                                   std::size_t n_scan);

/// Confirms a root against the PDE pipeline: pushes init through the constant
/// feedback drift and checks the terminal mean, then solves the backward
/// equation with the frozen terminal -M x and compares realized control and
/// value with their closed forms.
struct CrosscheckReport {
    double mean_terminal = 0.0;
    double mean_error = 0.0;
    double control_error = 0.0;
    double value_error = 0.0;
    bool pass = false;
};
CrosscheckReport crosscheck_pde(const SimpleGameSpec& spec, double root_M,
                                const Density& init, const TimeMesh& mesh);

} // namespace mfg
