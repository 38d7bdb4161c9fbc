#pragma once

#include <variant>

namespace mfg {

/// Gradient magnitudes below this are treated as sitting on a kink.
inline constexpr double grad_tol = 1e-10;

/// H(p) = max_{a <= g <= b} (-p g): piecewise linear with a kink at p = 0.
struct BangBang {
    double a = -1.0;
    double b = 1.0;
};

/// H(p) = max_{|g| <= 1} (-p g - l(g)) with l(g) = (delta/2)(g^2 - 1):
/// equals p^2/(2 delta) + delta/2 for |p| <= delta and |p| beyond, C^{1,1}.
struct SmoothCapped {
    double delta = 0.1;
};

/// H(p) = max_{|g| <= 1} (-p g - c0 g^2)
///      = -c0 min(p^2/(4 c0^2), 1) + |p| min(|p|/(2 c0), 1), C^{1,1}.
struct QuadraticControl {
    double c0 = 1.0;
};

using Hamiltonian = std::variant<BangBang, SmoothCapped, QuadraticControl>;

/// Selection rule at a BangBang kink (|p| <= grad_tol). The hint names an
/// element of the superdifferential of H at 0: Minus takes the left slope -b
/// (control b), Plus the right slope -a (control a), Zero the interior
/// element 0 (control 0). Smooth Hamiltonians ignore the hint.
enum class KinkHint { None, Minus, Plus, Zero };

double ham_eval(const Hamiltonian& H, double p);

/// One-sided/selected derivative of H at p; throws KinkWithoutHint when a
/// BangBang kink is hit with hint None.
double ham_derivative(const Hamiltonian& H, double p, KinkHint hint = KinkHint::None);

struct ControlChoice {
    double gamma = 0.0;
    bool indeterminate = false; // BangBang at the kink: every control is optimal
};

/// The maximizing control at gradient p. At a BangBang kink the choice is
/// indeterminate; the hinted overload resolves it.
ControlChoice optimal_control(const Hamiltonian& H, double p);
double optimal_control(const Hamiltonian& H, double p, KinkHint hint);

/// Running control cost l(gamma) entering f = l + F.
double control_cost(const Hamiltonian& H, double gamma);

struct ControlBounds {
    double a;
    double b;
};
ControlBounds control_bounds(const Hamiltonian& H);

/// sup |H'| (optionally over |p| <= restrict_p; pass inf for global).
double ham_gradient_bound(const Hamiltonian& H, double restrict_p);

/// Lipschitz constant of H' (inf for BangBang).
double ham_hessian_bound(const Hamiltonian& H);

} // namespace mfg
