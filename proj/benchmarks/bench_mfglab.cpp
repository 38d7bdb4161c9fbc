// Hot-path timings: the two linear solvers, one best-response sweep, a full
// one-sided construction, the damped fixed point, and the path ensemble.

#include "mfglab/branch.hpp"
#include "mfglab/mc.hpp"
#include "mfglab/pde.hpp"

#include <benchmark/benchmark.h>

using namespace mfg;

namespace {

SigmaFn unit_sigma() {
    return [](double) { return 1.0; };
}

MfgProblem make_problem(std::size_t n) {
    auto grid = SpatialGrid::uniform(-6.0, 6.0, n);
    return MfgProblem{BangBang{-1.0, 1.0}, unit_sigma(), ZeroCost{}, LinearMean{-1.0},
                      Density::gaussian(grid, 0.0, 0.25), TimeMesh::uniform(1.0, n)};
}

void bm_fp_forward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto grid = SpatialGrid::uniform(-6.0, 6.0, n);
    auto mesh = TimeMesh::uniform(1.0, n);
    auto init = Density::gaussian(grid, 0.0, 0.25);
    auto drift = DriftField::constant(mesh, grid, 1.0);
    for (auto _ : state) {
        auto flow = solve_fp_forward(drift, unit_sigma(), init, mesh);
        benchmark::DoNotOptimize(flow.frames.row(0));
    }
}

void bm_hjb_backward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto grid = SpatialGrid::uniform(-6.0, 6.0, n);
    auto mesh = TimeMesh::uniform(1.0, n);
    auto drift = DriftField::constant(mesh, grid, 1.0);
    Array2d source(mesh.n_t, grid.n_x);
    std::vector<double> terminal(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) terminal[i] = -grid.point(i);
    for (auto _ : state) {
        auto v = solve_hjb_backward(drift, unit_sigma(), source, terminal, mesh, grid);
        benchmark::DoNotOptimize(v.v.row(0));
    }
}

void bm_best_response(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto p = make_problem(n);
    auto seed = constant_drift_flow(p, 1.0);
    for (auto _ : state) {
        auto out = mfg_map(p, seed, KinkHint::Minus);
        benchmark::DoNotOptimize(out.flow.frames.row(0));
    }
}

void bm_construct_branch(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto p = make_problem(n);
    for (auto _ : state) {
        auto sol = construct_branch(p, BranchSeed::PlusDrift);
        benchmark::DoNotOptimize(sol.residual);
    }
}

void bm_picard(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto grid = SpatialGrid::uniform(-6.0, 6.0, n);
    // repelling couplings: the unique regime, where the iteration settles
    MfgProblem p{BangBang{-1.0, 1.0}, unit_sigma(), LinearMean{1.0}, LinearMean{0.5},
                 Density::gaussian(grid, 0.0, 0.25), TimeMesh::uniform(1.0, n)};
    for (auto _ : state) {
        auto sol = picard_solve(p, BranchSeed::ZeroDrift);
        benchmark::DoNotOptimize(sol.residual);
    }
}

void bm_simulate(benchmark::State& state) {
    SimOptions so;
    so.n_paths = static_cast<std::size_t>(state.range(0));
    so.n_steps = 256;
    so.seed = 9;
    for (auto _ : state) {
        auto ens = simulate(Strategy::constant(0.7), unit_sigma(),
                            sampler_gaussian(0.0, 0.5), so);
        benchmark::DoNotOptimize(ens.frames.row(0));
    }
}

} // namespace

BENCHMARK(bm_fp_forward)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_hjb_backward)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_best_response)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_construct_branch)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_picard)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_simulate)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
