#pragma once

#include "mfglab/branch.hpp"
#include "mfglab/certify.hpp"
#include "mfglab/problem.hpp"

#include <string>
#include <vector>

namespace mfg {

/// Linear-in-mean coupling coefficients of the two-population system:
///     F_i(x, m1, m2) = alpha_i x M(m1) + beta_i x M(m2) + f_i,
///     G_i(x, m1, m2) = gamma_i x M(m1) + delta_i x M(m2) + g_i.
struct TwoPopCoeffs {
    double alpha1 = 0.0, beta1 = 0.0, gamma1 = 0.0, delta1 = 0.0;
    double alpha2 = 0.0, beta2 = 0.0, gamma2 = 0.0, delta2 = 0.0;
};

/// Two coupled populations, each with a two-sided control interval
/// [a_i, b_i] (piecewise-linear Hamiltonian) and its own diffusion.
/// The x-independent offsets f_i, g_i shift costs but never controls.
struct TwoPopProblem {
    BangBang ham1;
    BangBang ham2;
    SigmaFn sigma1;
    SigmaFn sigma2;
    TwoPopCoeffs coeffs;
    double f1 = 0.0, f2 = 0.0, g1 = 0.0, g2 = 0.0;
    Density init1;
    Density init2;
    TimeMesh mesh;

    const SpatialGrid& grid() const { return init1.grid; }
};

struct TwoPopSolution {
    ValueField value1;
    ValueField value2;
    DensityFlow flow1;
    DensityFlow flow2;
    GradientCertificate cert1 = GradientCertificate::Mixed;
    GradientCertificate cert2 = GradientCertificate::Mixed;
    KinkHint hint1 = KinkHint::None;
    KinkHint hint2 = KinkHint::None;
    double joint_residual = 0.0;
    std::string label;
};

/// One-sided construction for the coupled system: each population's flow is
/// pushed by a frozen endpoint drift (b_i for PlusDrift, a_i for MinusDrift),
/// then each value function solves the linear backward equation against both
/// realized mean curves. Requires centered initial densities and coefficient
/// signs that force the matching gradient signs:
///   equal seeds: alpha_i, beta_i, gamma_i, delta_i <= 0 and
///                gamma_i + delta_i < 0 for both populations;
///   mixed seeds: alpha1, beta2, gamma1, delta2 <= 0,
///                alpha2, beta1, gamma2, delta1 >= 0,
///                gamma1 < delta1 and gamma2 > delta2.
/// Throws PreconditionFail naming the violated inequality, and
/// SignConditionViolated if a computed gradient crosses zero anyway.
TwoPopSolution construct_twopop_branch(const TwoPopProblem& problem,
                                       BranchSeed seed1, BranchSeed seed2);

/// Fixed-point defect of a candidate pair: one joint best-response sweep
/// (both backward solves against the stored flows, both forward solves
/// through the resulting feedback drifts), reported as the larger of the two
/// per-population sup-t d1 distances.
double twopop_residual(const TwoPopProblem& problem, const TwoPopSolution& solution);

struct MatrixVerdict {
    RegimeVerdict verdict = RegimeVerdict::Undetermined;
    double lambda = 0.0; // witness weight when ProvablyUnique, NaN otherwise
};

/// Weighted monotonicity test for the linear coupling family. For each
/// candidate weight lambda > 0 the running-cost matrix
/// [[lambda alpha1, lambda beta1], [alpha2, beta2]] must be positive definite
/// (tested via its quadratic form) and the terminal analogue built from
/// gamma/delta positive semidefinite (symmetric-part eigenvalues >= -1e-12).
/// Any passing lambda certifies uniqueness; otherwise the two known
/// non-uniqueness sign patterns are checked; everything else is Undetermined.
MatrixVerdict matrix_uniqueness_check(const TwoPopCoeffs& c,
                                      const std::vector<double>& lambda_scan = {});

/// Default scan: 101 log-spaced weights in [1e-3, 1e3] plus the closed-form
/// candidates (2 alpha1 beta2 - beta1 alpha2) / beta1^2 and the same
/// numerator over alpha2^2, when defined and positive.
std::vector<double> default_lambda_scan(const TwoPopCoeffs& c);

} // namespace mfg
