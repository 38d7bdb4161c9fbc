#pragma once

#include "mfglab/array2d.hpp"
#include "mfglab/density.hpp"
#include "mfglab/pde.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace mfg {

/// Markov control policy gamma(t, x). Perturbations replace the base policy
/// by a constant level inside a time window; everything is projected into
/// the control interval before use.
class Strategy {
  public:
    static Strategy constant(double gamma);
    static Strategy feedback(std::function<double(double, double)> fn);
    static Strategy perturbed(const Strategy& base, double level, double t1, double t2);

    double operator()(double t, double x) const { return fn_(t, x); }

  private:
    explicit Strategy(std::function<double(double, double)> fn) : fn_(std::move(fn)) {}
    std::function<double(double, double)> fn_;
};

using InitSampler = std::function<double(std::mt19937_64&)>;

InitSampler sampler_gaussian(double mean, double sd);
InitSampler sampler_uniform(double lo, double hi);
InitSampler sampler_point(double x0);
/// Inverse-CDF sampling of a grid density (piecewise-linear CDF).
InitSampler sampler_from_density(const Density& d);

struct SimOptions {
    double horizon = 1.0;
    std::size_t n_paths = 10000;
    std::size_t n_steps = 512;       // dt_mc = horizon / n_steps
    std::uint64_t seed = 1;
    double control_lo = -1.0;        // projection interval for controls
    double control_hi = 1.0;
    bool store_full = false;         // keep every step (needed for cost estimates)
    std::size_t n_checkpoints = 17;  // stored frames when store_full is false
};

/// Euler-Maruyama ensemble. Identical seeds give bit-identical ensembles for
/// any worker count: paths are partitioned into fixed chunks, each chunk owns
/// a generator seeded by (seed, chunk index), and noise draws never depend on
/// the strategy, so two runs with the same seed share their noise paths.
struct PathEnsemble {
    double horizon = 0.0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> frame_times;
    Array2d frames; // (n_frames, n_paths)
    bool full = false;

    std::size_t n_paths() const { return frames.cols(); }
    std::vector<double> frame(std::size_t j) const { return frames.row_copy(j); }
    /// Index of the stored frame at time t (throws if t is not stored).
    std::size_t frame_index(double t) const;
};

PathEnsemble simulate(const Strategy& strategy, const SigmaFn& sigma,
                      const InitSampler& init, const SimOptions& opts);

/// Sample mean and standard error of psi over one stored frame.
struct MomentEstimate {
    double mean = 0.0;
    double se = 0.0;
};
MomentEstimate frame_moment(const PathEnsemble& ens, std::size_t frame_idx,
                            const std::function<double(double)>& psi);

/// Monotone statistics separating the one-sided branches. Each factory
/// validates the drift/diffusion condition that makes the statistic move
/// strictly in one direction.
std::function<double(double)> psi_identity();
std::function<double(double)> psi_exponential(double lambda, double a, double b, double sigma);
std::function<double(double)> psi_tanh(double a, double b, double sigma);

/// Pathwise running + terminal cost along a fully stored ensemble. The flow
/// is interpolated to every MC step; controls are re-evaluated from the
/// stored states, so the estimate matches the simulated strategy exactly.
struct CostEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::vector<double> per_path;
};
using RunningCost = std::function<double(double x, const Density& mu, double gamma)>;
using TerminalCost = std::function<double(double x, const Density& mu)>;
CostEstimate estimate_cost(const PathEnsemble& ens, const Strategy& strategy,
                           const RunningCost& f, const TerminalCost& g,
                           const DensityFlow& flow);

/// Common-random-number perturbation probe: re-simulates the candidate and
/// each perturbed strategy on the same noise, forms paired per-path cost
/// differences D, and flags a perturbation when mean(D) < -3 SE(D).
struct Perturbation {
    double t1 = 0.0, t2 = 0.0, level = 0.0;
    double mean_diff = 0.0, se_diff = 0.0;
    bool flagged = false;
};
struct ProbeReport {
    double candidate_cost = 0.0;
    std::size_t n_flagged = 0;
    std::vector<Perturbation> perturbations;
};
ProbeReport optimality_probe(const Strategy& candidate, const SigmaFn& sigma,
                             const InitSampler& init, const SimOptions& opts,
                             const RunningCost& f, const TerminalCost& g,
                             const DensityFlow& flow, std::size_t n_perturbations,
                             std::uint64_t probe_seed);

/// Histogram of one stored frame, binned at the grid nodes, trapezoid mass 1.
Density empirical_density(const PathEnsemble& ens, std::size_t frame_idx,
                          const SpatialGrid& grid);

} // namespace mfg
