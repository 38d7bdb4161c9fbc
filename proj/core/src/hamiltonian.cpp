#include "mfglab/hamiltonian.hpp"

#include "mfglab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfg {

namespace {

void validate(const BangBang& h) {
    if (!(h.a < 0.0 && 0.0 < h.b))
        throw std::invalid_argument("BangBang: requires a < 0 < b");
}

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

} // namespace

double ham_eval(const Hamiltonian& H, double p) {
    return std::visit(
        [p](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, BangBang>) {
                validate(h);
                return std::max(-h.a * p, -h.b * p);
            } else if constexpr (std::is_same_v<T, SmoothCapped>) {
                const double d = h.delta;
                if (std::abs(p) <= d) return p * p / (2.0 * d) + d / 2.0;
                return std::abs(p);
            } else {
                const double c = h.c0;
                return -c * std::min(p * p / (4.0 * c * c), 1.0) +
                       std::abs(p) * std::min(std::abs(p) / (2.0 * c), 1.0);
            }
        },
        H);
}

double ham_derivative(const Hamiltonian& H, double p, KinkHint hint) {
    return std::visit(
        [p, hint](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, BangBang>) {
                validate(h);
                if (p < -grad_tol) return -h.b;
                if (p > grad_tol) return -h.a;
                switch (hint) {
                    case KinkHint::Minus: return -h.b;
                    case KinkHint::Plus: return -h.a;
                    case KinkHint::Zero: return 0.0;
                    case KinkHint::None: break;
                }
                throw KinkWithoutHint("ham_derivative: BangBang kink at p=0 needs a hint");
            } else if constexpr (std::is_same_v<T, SmoothCapped>) {
                return clamp(p / h.delta, -1.0, 1.0);
            } else {
                return clamp(p / (2.0 * h.c0), -1.0, 1.0);
            }
        },
        H);
}

ControlChoice optimal_control(const Hamiltonian& H, double p) {
    return std::visit(
        [p](const auto& h) -> ControlChoice {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, BangBang>) {
                validate(h);
                if (p < -grad_tol) return {h.b, false};
                if (p > grad_tol) return {h.a, false};
                return {0.0, true};
            } else if constexpr (std::is_same_v<T, SmoothCapped>) {
                return {clamp(-p / h.delta, -1.0, 1.0), false};
            } else {
                return {clamp(-p / (2.0 * h.c0), -1.0, 1.0), false};
            }
        },
        H);
}

double optimal_control(const Hamiltonian& H, double p, KinkHint hint) {
    const ControlChoice c = optimal_control(H, p);
    if (!c.indeterminate) return c.gamma;
    const auto& h = std::get<BangBang>(H);
    switch (hint) {
        case KinkHint::Minus: return h.b;
        case KinkHint::Plus: return h.a;
        case KinkHint::Zero: return 0.0;
        case KinkHint::None: break;
    }
    throw KinkWithoutHint("optimal_control: BangBang kink at p=0 needs a hint");
}

double control_cost(const Hamiltonian& H, double gamma) {
    return std::visit(
        [gamma](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, BangBang>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, SmoothCapped>) {
                return 0.5 * h.delta * (gamma * gamma - 1.0);
            } else {
                return h.c0 * gamma * gamma;
            }
        },
        H);
}

ControlBounds control_bounds(const Hamiltonian& H) {
    return std::visit(
        [](const auto& h) -> ControlBounds {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, BangBang>) {
                validate(h);
                return {h.a, h.b};
            } else {
                return {-1.0, 1.0};
            }
        },
        H);
}

double ham_gradient_bound(const Hamiltonian& H, double restrict_p) {
    return std::visit(
        [restrict_p](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, BangBang>) {
                validate(h);
                return std::max(std::abs(h.a), h.b);
            } else if constexpr (std::is_same_v<T, SmoothCapped>) {
                return std::min(1.0, restrict_p / h.delta);
            } else {
                return std::min(1.0, restrict_p / (2.0 * h.c0));
            }
        },
        H);
}

double ham_hessian_bound(const Hamiltonian& H) {
    return std::visit(
        [](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, BangBang>) {
                return std::numeric_limits<double>::infinity();
            } else if constexpr (std::is_same_v<T, SmoothCapped>) {
                return 1.0 / h.delta;
            } else {
                return 1.0 / (2.0 * h.c0);
            }
        },
        H);
}

} // namespace mfg
