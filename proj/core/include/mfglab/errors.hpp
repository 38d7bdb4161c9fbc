#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfg {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// sigma(x)^2 is not strictly positive somewhere on the grid.
struct NonPositiveDiffusion : Error {
    using Error::Error;
};

/// Total mass left the stated tolerance band during a forward solve.
struct MassDrift : Error {
    MassDrift(double mass, double tol)
        : Error("density mass drifted to " + std::to_string(mass) +
                " (tolerance " + std::to_string(tol) + ")"),
          mass(mass), tol(tol) {}
    double mass;
    double tol;
};

/// Two objects that must share a grid or time mesh do not.
struct GridMismatch : Error {
    using Error::Error;
};

/// A one-sided Hamiltonian derivative was requested at a kink without a hint.
struct KinkWithoutHint : Error {
    using Error::Error;
};

/// A required gradient sign condition failed; carries the first offending point.
struct SignConditionViolated : Error {
    SignConditionViolated(double t, double x, double grad)
        : Error("gradient sign condition violated at t=" + std::to_string(t) +
                ", x=" + std::to_string(x) + " (v_x=" + std::to_string(grad) + ")"),
          t(t), x(x), grad(grad) {}
    double t;
    double x;
    double grad;
};

/// The requested construction does not apply to the given Hamiltonian or costs.
struct NotApplicable : Error {
    using Error::Error;
};

/// Fixed-point iteration did not reach the step tolerance.
struct NoConvergence : Error {
    NoConvergence(std::size_t iterations, double last_step)
        : Error("fixed-point iteration stopped after " + std::to_string(iterations) +
                " iterations, last step " + std::to_string(last_step)),
          iterations(iterations), last_step(last_step) {}
    std::size_t iterations;
    double last_step;
};

/// sigma <= 0 where a uniformly elliptic constant is required.
struct DegenerateDiffusion : Error {
    using Error::Error;
};

/// The short-time threshold scan found no positive admissible horizon.
struct NoPositiveThreshold : Error {
    using Error::Error;
};

/// A structural precondition on problem coefficients failed.
struct PreconditionFail : Error {
    using Error::Error;
};

} // namespace mfg
