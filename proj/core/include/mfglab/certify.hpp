#pragma once

#include "mfglab/cost.hpp"
#include "mfglab/density.hpp"
#include "mfglab/fields.hpp"
#include "mfglab/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mfg {

// ---------------------------------------------------------------------------
// Monotone-coupling certificates.

enum class MonotoneVerdict { MonotonePass, MonotoneFail, Inconclusive };
const char* to_string(MonotoneVerdict v);

/// One sampled density pair (mu, nu) and the bilinear forms
/// integral (C(x,mu) - C(x,nu)) d(mu - nu)(x) for the running and terminal
/// costs. For a linear-in-mean running cost the closed form coef*(dM)^2 is
/// attached for cross-checking; NaN otherwise.
struct PairForm {
    double delta_mean = 0.0;
    double f_form = 0.0;
    double g_form = 0.0;
    double f_closed = 0.0;
};

struct MonotonicityReport {
    std::vector<PairForm> pairs;
    double min_f_form = 0.0;
    double min_g_form = 0.0;
    MonotoneVerdict verdict = MonotoneVerdict::Inconclusive;
};

/// Samples n_pairs random density pairs with distinct means and integrates
/// both bilinear forms. MonotonePass needs every running-cost form strictly
/// positive and every terminal form >= -tol; a clearly negative form on
/// either cost gives MonotoneFail; everything else is Inconclusive.
MonotonicityReport monotonicity_check(const CostSpec& F, const CostSpec& G,
                                      const SpatialGrid& grid, std::size_t n_pairs,
                                      std::uint64_t seed, double tol = 1e-9);

enum class RegimeVerdict { ProvablyUnique, ProvablyMultiple, Undetermined };
const char* to_string(RegimeVerdict v);

/// Exact case split for the linear-in-mean family F = alpha x M(m),
/// G = beta x M(m): alpha > 0 with beta >= 0 certifies a unique solution;
/// alpha <= 0 with beta < 0 certifies that distinct solutions exist.
RegimeVerdict regime_verdict(double alpha, double beta);

// ---------------------------------------------------------------------------
// Density sup-norm bound for bounded-drift diffusions.

/// The explicit constant C_hat(t) in sup m(t) <= C_hat(t) sup m(0) for a
/// diffusion with |drift| <= drift_bound and constant volatility sigma in
/// dimension d. The Gaussian moment integral is evaluated in closed form
/// (2 e^{c^2 s/2} Phi(c sqrt(s)) per coordinate, c = drift_bound/sigma^2,
/// s = sigma^2 t). Equals 1 at drift_bound = 0.
double density_bound_constant(double sigma, double drift_bound, std::size_t d, double t);

struct DensityBoundReport {
    double c_hat = 0.0;
    double sup_init = 0.0;
    double sup_final = 0.0;
    double ratio = 0.0; // sup_final / (c_hat * sup_init)
    bool pass = false;  // ratio <= 1 + slack
};

/// Runs the forward solver to the drift field's horizon (which must equal t)
/// and checks the bound with a discretization slack on the ratio.
DensityBoundReport verify_density_bound(const DriftField& drift, double drift_bound,
                                        double sigma, const Density& init, double t,
                                        double slack = 0.05);

// ---------------------------------------------------------------------------
// Short-horizon uniqueness threshold.

struct ThresholdInputs {
    std::size_t d = 1;             // spatial dimension entering c_o
    double L_F = 1.0;              // L2 Lipschitz constant of the running cost
    double L_G = 1.0;              // L2 Lipschitz constant of the terminal cost
    double sup_init_density = 1.0; // sup-norm of the initial density
    double C_H = 1.0;              // bound on |H'|
    double Cbar_H = 1.0;           // Lipschitz constant of H'
    double sigma = 1.0;
    double T_max_scan = 64.0;
};

/// Constants of the energy estimate, frozen at the returned horizon.
struct ConstantsTrace {
    double c_o = 0.0;
    double c_1 = 0.0;
    double C_1 = 0.0;
    double C_2 = 0.0;
    double C_3 = 0.0;
    double c_hat_T = 0.0;
    double A_inf = 0.0;
};

struct ThresholdResult {
    double T_bar = 0.0;
    /// The defining inequality still holds at T_max_scan, so T_bar is only a
    /// lower witness (uniqueness holds on the whole scanned range).
    bool exceeds_scan = false;
    ConstantsTrace trace;
    /// Reported only when L_G == 0 (NaN otherwise): the frozen-constant root
    /// sqrt(2/(C_2 C_3)) and its improvement pi/(2 sqrt(C_2 C_3)).
    double lg_zero_quadratic = 0.0;
    double lg_zero_improved = 0.0;
    std::string discrepancy_note;
};

/// Largest horizon T in (0, T_max_scan] with
///     T C_1(T) C_3(T) + T^2 C_2(T) C_3(T) / 2 < 1,
/// located by bisection because every constant grows with T:
///     c_o = d (C_H + 3)/2,  c_1 = (C_H + 3)/2,
///     C_1 = L_G e^{c_o C_H T},  C_2 = c_o L_F e^{c_o C_H T},
///     C_3 = c_1 e^{c_1 C_H T} A_inf^2,  A_inf = C_hat(T) sup_init Cbar_H.
/// Throws NoPositiveThreshold only if the inequality already fails at 1e-12.
ThresholdResult short_time_threshold(const ThresholdInputs& in);

// ---------------------------------------------------------------------------
// Hypothesis audit for the smooth uniqueness theory.

enum class CheckStatus { Pass, Fail, Unchecked };
const char* to_string(CheckStatus s);

struct HypothesisCheck {
    std::string hypothesis;
    CheckStatus status = CheckStatus::Unchecked;
    std::string detail;
};

struct ApplicabilityReport {
    std::vector<HypothesisCheck> entries;
    bool no_failures = true; // no entry with status Fail
};

/// Checks each hypothesis of the short-horizon uniqueness estimate against a
/// concrete problem: gradient continuity and bounds of H, L2 Lipschitz
/// structure of both costs, uniform ellipticity. Square-integrability of
/// value-gradient differences cannot be certified on a truncated domain and
/// is reported Unchecked.
ApplicabilityReport applicability_audit(const MfgProblem& problem);

} // namespace mfg
