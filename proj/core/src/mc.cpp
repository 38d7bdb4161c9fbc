#include "mfglab/mc.hpp"

#include "mfglab/errors.hpp"
#include "mfglab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mfg {

namespace {

constexpr std::size_t chunk_size = 2048;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d649bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (chunk + 1)));
}

} // namespace

Strategy Strategy::constant(double gamma) {
    return Strategy([gamma](double, double) { return gamma; });
}

Strategy Strategy::feedback(std::function<double(double, double)> fn) {
    return Strategy(std::move(fn));
}

Strategy Strategy::perturbed(const Strategy& base, double level, double t1, double t2) {
    auto base_fn = base.fn_;
    return Strategy([base_fn, level, t1, t2](double t, double x) {
        if (t >= t1 && t <= t2) return level;
        return base_fn(t, x);
    });
}

InitSampler sampler_gaussian(double mean, double sd) {
    return [mean, sd](std::mt19937_64& rng) {
        std::normal_distribution<double> n(mean, sd);
        return n(rng);
    };
}

InitSampler sampler_uniform(double lo, double hi) {
    return [lo, hi](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(lo, hi);
        return u(rng);
    };
}

InitSampler sampler_point(double x0) {
    return [x0](std::mt19937_64&) { return x0; };
}

InitSampler sampler_from_density(const Density& d) {
    auto cdf = d.cdf();
    const double total = cdf.back();
    for (double& c : cdf) c /= total;
    const SpatialGrid grid = d.grid;
    return [cdf, grid](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double u = u01(rng);
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.begin()) return grid.point(0);
        if (it == cdf.end()) return grid.point(grid.n_x - 1);
        const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
        const double c0 = cdf[i - 1], c1 = cdf[i];
        const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
        return grid.point(i - 1) + w * grid.h();
    };
}

std::size_t PathEnsemble::frame_index(double t) const {
    for (std::size_t j = 0; j < frame_times.size(); ++j)
        if (std::abs(frame_times[j] - t) <= 1e-12 * std::max(1.0, horizon)) return j;
    throw std::invalid_argument("PathEnsemble: time " + std::to_string(t) + " is not stored");
}

PathEnsemble simulate(const Strategy& strategy, const SigmaFn& sigma,
                      const InitSampler& init, const SimOptions& opts) {
    if (opts.n_paths == 0 || opts.n_steps == 0 || !(opts.horizon > 0.0))
        throw std::invalid_argument("simulate: bad options");
    if (!(opts.control_lo <= opts.control_hi))
        throw std::invalid_argument("simulate: empty control interval");
    const double dt = opts.horizon / static_cast<double>(opts.n_steps);
    const double sqrt_dt = std::sqrt(dt);

    // Stored frame step-indices.
    std::vector<std::size_t> stored;
    if (opts.store_full) {
        stored.resize(opts.n_steps + 1);
        for (std::size_t k = 0; k <= opts.n_steps; ++k) stored[k] = k;
    } else {
        const std::size_t nc = std::max<std::size_t>(2, opts.n_checkpoints);
        for (std::size_t j = 0; j < nc; ++j) {
            const double s = static_cast<double>(j) * static_cast<double>(opts.n_steps) /
                             static_cast<double>(nc - 1);
            stored.push_back(static_cast<std::size_t>(std::llround(s)));
        }
        stored.erase(std::unique(stored.begin(), stored.end()), stored.end());
    }
    std::vector<std::size_t> frame_of(opts.n_steps + 1, SIZE_MAX);
    for (std::size_t j = 0; j < stored.size(); ++j) frame_of[stored[j]] = j;

    PathEnsemble ens;
    ens.horizon = opts.horizon;
    ens.dt = dt;
    ens.seed = opts.seed;
    ens.full = opts.store_full;
    for (std::size_t k : stored) ens.frame_times.push_back(dt * static_cast<double>(k));
    ens.frames = Array2d(stored.size(), opts.n_paths);

    const std::size_t n_chunks = (opts.n_paths + chunk_size - 1) / chunk_size;
    parallel_for(n_chunks, [&](std::size_t c) {
        std::mt19937_64 rng(chunk_seed(opts.seed, c));
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t p_lo = c * chunk_size;
        const std::size_t p_hi = std::min(opts.n_paths, p_lo + chunk_size);
        for (std::size_t p = p_lo; p < p_hi; ++p) {
            double x = init(rng);
            if (frame_of[0] != SIZE_MAX) ens.frames(frame_of[0], p) = x;
            for (std::size_t k = 0; k < opts.n_steps; ++k) {
                const double t = dt * static_cast<double>(k);
                const double g =
                    std::clamp(strategy(t, x), opts.control_lo, opts.control_hi);
                const double xi = normal(rng);
                x += g * dt + sigma(x) * sqrt_dt * xi;
                if (frame_of[k + 1] != SIZE_MAX) ens.frames(frame_of[k + 1], p) = x;
            }
        }
    });
    return ens;
}

MomentEstimate frame_moment(const PathEnsemble& ens, std::size_t frame_idx,
                            const std::function<double(double)>& psi) {
    const std::size_t n = ens.n_paths();
    const double* row = ens.frames.row(frame_idx);
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) s += psi(row[p]);
    const double mean = s / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double d = psi(row[p]) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n - 1);
    return MomentEstimate{mean, std::sqrt(var / static_cast<double>(n))};
}

std::function<double(double)> psi_identity() {
    return [](double x) { return x; };
}

std::function<double(double)> psi_exponential(double lambda, double a, double b, double sigma) {
    if (!(lambda > 0.0)) throw std::invalid_argument("psi_exponential: lambda must be positive");
    // Needs b psi' + s^2 psi''/2 > 0 and a psi' + s^2 psi''/2 < 0 everywhere:
    // with psi = e^{lambda x} - 1 those reduce to b > -lambda s^2/2, a < -lambda s^2/2.
    if (!(b > -lambda * sigma * sigma / 2.0) || !(a < -lambda * sigma * sigma / 2.0))
        throw std::invalid_argument("psi_exponential: drift bounds do not separate");
    return [lambda](double x) { return std::expm1(lambda * x); };
}

std::function<double(double)> psi_tanh(double a, double b, double sigma) {
    // b sech^2 - s^2 tanh sech^2 > 0 and the mirrored bound need b >= s^2, a <= -s^2.
    if (!(a <= -sigma * sigma) || !(b >= sigma * sigma))
        throw std::invalid_argument("psi_tanh: needs a <= -sigma^2 and b >= sigma^2");
    return [](double x) { return std::tanh(x); };
}

CostEstimate estimate_cost(const PathEnsemble& ens, const Strategy& strategy,
                           const RunningCost& f, const TerminalCost& g,
                           const DensityFlow& flow) {
    if (!ens.full)
        throw std::invalid_argument("estimate_cost: needs a fully stored ensemble");
    const std::size_t n_paths = ens.n_paths();
    const std::size_t n_frames = ens.frames.rows();
    CostEstimate est;
    est.per_path.assign(n_paths, 0.0);

    for (std::size_t k = 0; k + 1 < n_frames; ++k) {
        const double t = ens.frame_times[k];
        const Density mu = flow.at_time(t);
        const double* row = ens.frames.row(k);
        for (std::size_t p = 0; p < n_paths; ++p) {
            const double x = row[p];
            est.per_path[p] += f(x, mu, strategy(t, x)) * ens.dt;
        }
    }
    const Density mu_T = flow.at_time(ens.horizon);
    const double* last = ens.frames.row(n_frames - 1);
    for (std::size_t p = 0; p < n_paths; ++p) est.per_path[p] += g(last[p], mu_T);

    double s = 0.0;
    for (double c : est.per_path) s += c;
    est.mean = s / static_cast<double>(n_paths);
    double var = 0.0;
    for (double c : est.per_path) var += (c - est.mean) * (c - est.mean);
    var /= static_cast<double>(n_paths - 1);
    est.se = std::sqrt(var / static_cast<double>(n_paths));
    return est;
}

ProbeReport optimality_probe(const Strategy& candidate, const SigmaFn& sigma,
                             const InitSampler& init, const SimOptions& opts,
                             const RunningCost& f, const TerminalCost& g,
                             const DensityFlow& flow, std::size_t n_perturbations,
                             std::uint64_t probe_seed) {
    SimOptions full_opts = opts;
    full_opts.store_full = true;

    const PathEnsemble base_ens = simulate(candidate, sigma, init, full_opts);
    const CostEstimate base_cost = estimate_cost(base_ens, candidate, f, g, flow);

    ProbeReport rep;
    rep.candidate_cost = base_cost.mean;

    std::mt19937_64 rng(probe_seed);
    std::uniform_real_distribution<double> ut1(0.0, 0.8 * opts.horizon);
    std::uniform_real_distribution<double> ulen(0.1 * opts.horizon, 0.5 * opts.horizon);
    std::uniform_real_distribution<double> ulevel(opts.control_lo, opts.control_hi);

    for (std::size_t q = 0; q < n_perturbations; ++q) {
        Perturbation pert;
        pert.t1 = ut1(rng);
        pert.t2 = std::min(pert.t1 + ulen(rng), opts.horizon);
        pert.level = ulevel(rng);
        const Strategy tweaked = Strategy::perturbed(candidate, pert.level, pert.t1, pert.t2);
        // Same seed, so the perturbed run sees the same noise paths.
        const PathEnsemble ens = simulate(tweaked, sigma, init, full_opts);
        const CostEstimate cost = estimate_cost(ens, tweaked, f, g, flow);

        const std::size_t n = base_cost.per_path.size();
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) s += cost.per_path[p] - base_cost.per_path[p];
        pert.mean_diff = s / static_cast<double>(n);
        double var = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double d = cost.per_path[p] - base_cost.per_path[p] - pert.mean_diff;
            var += d * d;
        }
        var /= static_cast<double>(n - 1);
        pert.se_diff = std::sqrt(var / static_cast<double>(n));
        pert.flagged = pert.mean_diff < -3.0 * pert.se_diff - 1e-15;
        if (pert.flagged) ++rep.n_flagged;
        rep.perturbations.push_back(pert);
    }
    return rep;
}

Density empirical_density(const PathEnsemble& ens, std::size_t frame_idx,
                          const SpatialGrid& grid) {
    const std::size_t n = ens.n_paths();
    const double* row = ens.frames.row(frame_idx);
    const double h = grid.h();
    std::vector<double> counts(grid.n_x, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        const double s = (row[p] - grid.x_min) / h;
        const auto i = static_cast<std::ptrdiff_t>(std::llround(s));
        const std::size_t bin =
            static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, grid.n_x - 1));
        counts[bin] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(n) * h;
    return Density::from_values(grid, std::move(counts));
}

} // namespace mfg
