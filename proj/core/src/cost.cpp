#include "mfglab/cost.hpp"

#include "mfglab/errors.hpp"
#include "mfglab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mfg {

std::vector<double> cost_field(const CostSpec& spec, const Density& mu) {
    const SpatialGrid& grid = mu.grid;
    const std::size_t n = grid.n_x;
    return std::visit(
        [&](const auto& s) -> std::vector<double> {
            using T = std::decay_t<decltype(s)>;
            std::vector<double> out(n, 0.0);
            if constexpr (std::is_same_v<T, LinearMean>) {
                const double m = mean_of(mu);
                const double off = s.offset ? s.offset(mu) : 0.0;
                for (std::size_t i = 0; i < n; ++i) out[i] = s.coef * grid.point(i) * m + off;
            } else if constexpr (std::is_same_v<T, KernelCost>) {
                std::vector<double> conv(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = grid.point(i);
                    for (std::size_t j = 0; j < n; ++j)
                        conv[j] = s.k(x, grid.point(j)) * mu.values[j];
                    out[i] = s.outer(trapezoid(grid, conv));
                }
            } else if constexpr (std::is_same_v<T, LocalCost>) {
                for (std::size_t i = 0; i < n; ++i) out[i] = s.f(grid.point(i), mu.values[i]);
            } else if constexpr (std::is_same_v<T, ZeroCost>) {
                // all zero
            } else {
                out = s.field(mu);
                if (out.size() != n) throw GridMismatch("CustomCost: field size");
            }
            return out;
        },
        spec);
}

std::vector<double> cost_gradient_x(const CostSpec& spec, const Density& mu) {
    const auto field = cost_field(spec, mu);
    return spatial_gradient(mu.grid, field.data());
}

namespace {

Density fg2_sample(const SpatialGrid& grid, std::uint64_t seed) {
    // Mix random mixtures with deliberately shifted Gaussians so that both
    // signs of the mean show up.
    if (seed % 3 == 0) {
        std::mt19937_64 rng(seed * 2654435761u + 17u);
        const double span = grid.x_max - grid.x_min;
        std::uniform_real_distribution<double> mean(-0.12 * span, 0.12 * span);
        std::uniform_real_distribution<double> var(1e-4 * span * span, 4e-3 * span * span);
        return Density::gaussian(grid, mean(rng), var(rng));
    }
    return random_mixture(grid, seed);
}

} // namespace

Fg2Report check_FG2(const CostSpec& F, const CostSpec& G, const SpatialGrid& grid,
                    std::size_t n_samples, std::uint64_t seed) {
    Fg2Report rep;
    double max_abs_product = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const Density mu = fg2_sample(grid, seed + s);
        const double m = mean_of(mu);
        if (std::abs(m) < 1e-12) continue;
        for (const CostSpec* spec : {&F, &G}) {
            const auto g = cost_gradient_x(*spec, mu);
            for (double gi : g) {
                const double prod = m * gi;
                rep.max_violation = std::max(rep.max_violation, prod);
                max_abs_product = std::max(max_abs_product, std::abs(prod));
            }
        }
    }
    rep.nonzero_clause_holds = max_abs_product > 1e-12;
    rep.pass = rep.max_violation <= 1e-12 && rep.nonzero_clause_holds;
    return rep;
}

Density random_mixture_with_mean(const SpatialGrid& grid, std::uint64_t seed, double mean) {
    std::mt19937_64 rng(seed * 6364136223846793005ull + 1442695040888963407ull);
    const double span = grid.x_max - grid.x_min;
    std::uniform_real_distribution<double> spread(0.01 * span, 0.06 * span);
    std::uniform_real_distribution<double> weight(0.25, 0.75);
    const double w = weight(rng);
    const double d1 = spread(rng), d2 = spread(rng);
    // Component centers m + d and m - w d1 / (1-w) ... choose so the mixture
    // mean lands exactly on the target.
    const double c1 = mean + d1;
    const double c2 = mean - w * d1 / (1.0 - w);
    const double v1 = d2 * d2 + 0.01, v2 = spread(rng) * spread(rng) + 0.01;
    Density a = Density::gaussian(grid, c1, v1);
    Density b = Density::gaussian(grid, c2, v2);
    std::vector<double> vals(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i)
        vals[i] = w * a.values[i] + (1.0 - w) * b.values[i];
    return Density::from_values(grid, std::move(vals));
}

G3Report check_G3(const CostSpec& G, double delta, double epsilon, double a, double b,
                  const SpatialGrid& grid, std::size_t n_samples, std::uint64_t seed) {
    if (!(delta > 0.0) || !(epsilon > 0.0))
        throw std::invalid_argument("check_G3: delta and epsilon must be positive");
    if (!(a < 0.0 && 0.0 < b)) throw std::invalid_argument("check_G3: requires a < 0 < b");
    G3Report rep;
    rep.epsilon_used = epsilon;
    if (const auto* lin = std::get_if<LinearMean>(&G); lin && lin->coef < 0.0) {
        const double beta = -lin->coef;
        rep.epsilon_closed_form = std::max(delta / (b * beta), delta / (-a * beta));
    }
    const double span = grid.x_max - grid.x_min;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> above(epsilon * b, epsilon * b + 0.1 * span);
    std::uniform_real_distribution<double> below(epsilon * a - 0.1 * span, epsilon * a);
    double max_defect = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const bool high = (s % 2 == 0);
        const double target = high ? above(rng) : below(rng);
        const Density mu = random_mixture_with_mean(grid, seed + 31 * s + 7, target);
        const auto g = cost_gradient_x(G, mu);
        for (double gi : g) {
            // defect > 0 means the strict slope bound fails at this node
            const double defect = high ? (gi + delta) : (delta - gi);
            max_defect = std::max(max_defect, defect);
        }
    }
    rep.max_defect = max_defect;
    rep.pass = max_defect <= 1e-9;
    return rep;
}

LipschitzEstimate lipschitz_L2_estimate(const CostSpec& spec, const SpatialGrid& grid,
                                        std::size_t n_pairs, std::uint64_t seed,
                                        LipschitzMeasure measure) {
    LipschitzEstimate est;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const Density mu = random_mixture(grid, seed + 2 * p);
        const Density nu = random_mixture(grid, seed + 2 * p + 1);
        std::vector<double> fm, fn;
        if (measure == LipschitzMeasure::Field) {
            fm = cost_field(spec, mu);
            fn = cost_field(spec, nu);
        } else {
            fm = cost_gradient_x(spec, mu);
            fn = cost_gradient_x(spec, nu);
        }
        std::vector<double> df(fm.size()), dmu(fm.size());
        for (std::size_t i = 0; i < fm.size(); ++i) {
            df[i] = fm[i] - fn[i];
            dmu[i] = mu.values[i] - nu.values[i];
        }
        const double denom = l2_norm(grid, dmu);
        if (denom < 1e-12) continue;
        const double r = l2_norm(grid, df) / denom;
        est.empirical = std::max(est.empirical, r * r);
    }
    if (const auto* ker = std::get_if<KernelCost>(&spec)) {
        // ||k||_2^2 over the truncated square, scaled by the outer slope bound.
        double acc = 0.0;
        std::vector<double> row(grid.n_x);
        std::vector<double> rows(grid.n_x);
        for (std::size_t i = 0; i < grid.n_x; ++i) {
            const double x = grid.point(i);
            for (std::size_t j = 0; j < grid.n_x; ++j) {
                const double kj = ker->k(x, grid.point(j));
                row[j] = kj * kj;
            }
            rows[i] = trapezoid(grid, row);
        }
        acc = trapezoid(grid, rows);
        est.analytic = ker->outer_lipschitz * ker->outer_lipschitz * acc;
    } else if (const auto* loc = std::get_if<LocalCost>(&spec)) {
        if (!std::isnan(loc->slope_bound)) est.analytic = loc->slope_bound * loc->slope_bound;
    } else if (std::holds_alternative<ZeroCost>(spec)) {
        est.analytic = 0.0;
    }
    return est;
}

} // namespace mfg
