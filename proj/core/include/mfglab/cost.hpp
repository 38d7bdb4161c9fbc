#pragma once

#include "mfglab/density.hpp"
#include "mfglab/grid.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <variant>
#include <vector>

namespace mfg {

/// coef * x * M(mu) + offset(mu). The x-independent offset shifts values but
/// never the optimal controls; it defaults to zero.
struct LinearMean {
    double coef = 0.0;
    std::function<double(const Density&)> offset;
};

/// outer(integral of k(x, y) mu(y) dy). outer_lipschitz bounds |outer'| for
/// the analytic L2-Lipschitz constant.
struct KernelCost {
    std::function<double(double, double)> k;
    std::function<double(double)> outer;
    double outer_lipschitz = 1.0;
};

/// f(x, mu(x)): a local coupling. slope_bound bounds |df/dm| if known.
struct LocalCost {
    std::function<double(double, double)> f;
    double slope_bound = std::numeric_limits<double>::quiet_NaN();
};

struct ZeroCost {};

/// Escape hatch: an arbitrary field mu -> (values on mu's grid).
struct CustomCost {
    std::function<std::vector<double>(const Density&)> field;
};

using CostSpec = std::variant<LinearMean, KernelCost, LocalCost, ZeroCost, CustomCost>;

/// Evaluates the cost x -> F(x, mu) on mu's grid nodes.
std::vector<double> cost_field(const CostSpec& spec, const Density& mu);

/// Spatial gradient of the cost field (exact for affine-in-x couplings).
std::vector<double> cost_gradient_x(const CostSpec& spec, const Density& mu);

/// Sign condition for the one-sided branch construction:
/// M(mu) * dF/dx <= 0 and M(mu) * dG/dx <= 0 for all sampled mu, with the
/// couple not identically zero.
struct Fg2Report {
    double max_violation = 0.0; // positive part of M * d(cost)/dx, worst case
    bool nonzero_clause_holds = false;
    bool pass = false;
};
Fg2Report check_FG2(const CostSpec& F, const CostSpec& G, const SpatialGrid& grid,
                    std::size_t n_samples, std::uint64_t seed);

/// Strict terminal slope condition: dG/dx <= -delta when M(mu) >= epsilon * b
/// and dG/dx >= delta when M(mu) <= epsilon * a. For LinearMean{coef=-beta},
/// beta > 0, the smallest admissible epsilon is max(delta/(b beta), delta/(|a| beta)).
struct G3Report {
    bool pass = false;
    double max_defect = 0.0;
    double epsilon_used = 0.0;
    double epsilon_closed_form = std::numeric_limits<double>::quiet_NaN();
};
G3Report check_G3(const CostSpec& G, double delta, double epsilon, double a, double b,
                  const SpatialGrid& grid, std::size_t n_samples, std::uint64_t seed);

/// Empirical L2-Lipschitz constant of mu -> field (or its x-gradient):
/// max over sampled pairs of ||field(mu)-field(nu)||_2^2 / ||mu-nu||_2^2.
enum class LipschitzMeasure { Field, GradientX };
struct LipschitzEstimate {
    double empirical = 0.0;
    double analytic = std::numeric_limits<double>::quiet_NaN();
};
LipschitzEstimate lipschitz_L2_estimate(const CostSpec& spec, const SpatialGrid& grid,
                                        std::size_t n_pairs, std::uint64_t seed,
                                        LipschitzMeasure measure = LipschitzMeasure::Field);

/// Random mixture recentered to a prescribed mean (used by the G3 sampling).
Density random_mixture_with_mean(const SpatialGrid& grid, std::uint64_t seed, double mean);

} // namespace mfg
