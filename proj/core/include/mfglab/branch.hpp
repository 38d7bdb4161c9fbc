#pragma once

#include "mfglab/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mfg {

/// Default step tolerance for the damped fixed-point iteration
/// (sup over time nodes of the 1-Wasserstein distance between iterates).
inline constexpr double fp_tol = 1e-3;

enum class BranchSeed { PlusDrift, MinusDrift, ZeroDrift };

/// Kink selection used on a seed's behalf: the branch pushing mass right
/// (drift b) takes the left slope of H, and symmetrically.
KinkHint kink_hint_for(BranchSeed seed);

enum class GradientCertificate { AllNegative, AllPositive, Mixed };

/// Sign of the stored gradient over every frame strictly before the horizon.
GradientCertificate certificate_of(const ValueField& value);

/// True iff v_x <= -delta + tol on every frame including the terminal one.
bool delta_certificate(const ValueField& value, double delta, double tol);

struct MfgSolution {
    ValueField value;
    DensityFlow flow;
    DriftField drift;
    std::string branch_label;
    double residual = 0.0; // one undamped best-response defect, sup-t d1
    GradientCertificate certificate = GradientCertificate::Mixed;
    std::string note;
};

/// One best-response sweep: freeze the flow, solve the backward equation with
/// the full Hamiltonian (kinks resolved by `hint`), realize the feedback
/// drift -H'(v_x), and push the initial density forward through it.
struct MapResult {
    ValueField value;
    DriftField drift;
    DensityFlow flow;
};
MapResult mfg_map(const MfgProblem& problem, const DensityFlow& flow_in, KinkHint hint);

/// One-sided branch construction: freeze the drift at a control-set endpoint
/// (or zero), solve the decoupled forward then backward equations, certify
/// the gradient sign, and measure the fixed-point residual.
/// Throws NotApplicable for QuadraticControl and SignConditionViolated when
/// the required one-sided gradient sign fails.
MfgSolution construct_branch(const MfgProblem& problem, BranchSeed seed);

struct PicardOptions {
    double theta = 0.5;        // damping weight on the best response
    std::size_t max_iter = 200;
    double tol = fp_tol;
    bool adaptive = true;      // shrink theta when the mean curve oscillates
};

/// Damped fixed-point iteration from a seed flow. Frames are combined
/// convexly and renormalized each sweep; the step metric is sup-t d1.
/// Throws NoConvergence when max_iter is exhausted.
MfgSolution picard_solve(const MfgProblem& problem, const DensityFlow& seed_flow,
                         KinkHint hint, const std::string& label,
                         const PicardOptions& opts = {});

/// Convenience overload seeding from a constant-drift flow.
MfgSolution picard_solve(const MfgProblem& problem, BranchSeed seed,
                         const PicardOptions& opts = {});

struct EnumerateOptions {
    PicardOptions picard;
    double dedup_threshold = 10.0 * fp_tol;
    std::size_t n_random_seeds = 3;
    std::uint64_t seed = 2024;
};

struct BranchCatalog {
    std::vector<MfgSolution> solutions;    // residual <= tol, deduplicated
    std::vector<std::string> diagnostics;  // failed or duplicate attempts
};

/// Runs both one-sided constructions, a zero-drift fixed-point run and
/// n_random_seeds random constant-drift runs, keeps the distinct flows whose
/// best-response residual is within tolerance.
BranchCatalog enumerate_branches(const MfgProblem& problem, const EnumerateOptions& opts = {});

/// Forward solve under a constant drift (the seed flows of the enumeration).
DensityFlow constant_drift_flow(const MfgProblem& problem, double gamma);

} // namespace mfg
