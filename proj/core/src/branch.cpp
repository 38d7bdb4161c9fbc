#include "mfglab/branch.hpp"

#include "mfglab/errors.hpp"
#include "mfglab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mfg {

KinkHint kink_hint_for(BranchSeed seed) {
    switch (seed) {
        case BranchSeed::PlusDrift: return KinkHint::Minus;
        case BranchSeed::MinusDrift: return KinkHint::Plus;
        case BranchSeed::ZeroDrift: return KinkHint::Zero;
    }
    return KinkHint::None;
}

GradientCertificate certificate_of(const ValueField& value) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < value.mesh.n_t; ++j) {
        for (std::size_t i = 0; i < value.grid.n_x; ++i) {
            const double g = value.vx(j, i);
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
    }
    if (hi < 0.0) return GradientCertificate::AllNegative;
    if (lo > 0.0) return GradientCertificate::AllPositive;
    return GradientCertificate::Mixed;
}

bool delta_certificate(const ValueField& value, double delta, double tol) {
    for (std::size_t j = 0; j < value.mesh.n_t; ++j)
        for (std::size_t i = 0; i < value.grid.n_x; ++i)
            if (!(value.vx(j, i) <= -delta + tol)) return false;
    return true;
}

namespace {

Array2d cost_frames(const CostSpec& F, const DensityFlow& flow) {
    Array2d src(flow.mesh.n_t, flow.grid.n_x);
    for (std::size_t j = 0; j < flow.mesh.n_t; ++j) {
        const auto row = cost_field(F, flow.frame(j));
        for (std::size_t i = 0; i < flow.grid.n_x; ++i) src(j, i) = row[i];
    }
    return src;
}

} // namespace

MapResult mfg_map(const MfgProblem& problem, const DensityFlow& flow_in, KinkHint hint) {
    detail::require_same_grid(problem.grid(), flow_in.grid, "mfg_map");
    detail::require_same_mesh(problem.mesh, flow_in.mesh, "mfg_map");
    const Array2d source = cost_frames(problem.running, flow_in);
    const auto terminal = cost_field(problem.terminal, flow_in.frame(flow_in.mesh.n_t - 1));
    const Hamiltonian& H = problem.ham;
    auto control = [&H, hint](double p) { return optimal_control(H, p, hint); };
    auto lcost = [&H](double g) { return control_cost(H, g); };
    PolicySolution ps = solve_hjb_policy(control, lcost, problem.sigma, source, terminal,
                                         problem.mesh, problem.grid());
    DensityFlow out = solve_fp_forward(ps.drift, problem.sigma, problem.init, problem.mesh);
    return MapResult{std::move(ps.value), std::move(ps.drift), std::move(out)};
}

DensityFlow constant_drift_flow(const MfgProblem& problem, double gamma) {
    const DriftField drift = DriftField::constant(problem.mesh, problem.grid(), gamma);
    return solve_fp_forward(drift, problem.sigma, problem.init, problem.mesh);
}

MfgSolution construct_branch(const MfgProblem& problem, BranchSeed seed) {
    if (std::holds_alternative<QuadraticControl>(problem.ham))
        throw NotApplicable(
            "construct_branch: the one-sided construction needs a Hamiltonian whose "
            "optimal control saturates away from the kink (bang-bang or capped)");
    const ControlBounds cb = control_bounds(problem.ham);
    double gamma = 0.0;
    std::string label = "zero";
    if (seed == BranchSeed::PlusDrift) {
        gamma = cb.b;
        label = "plus";
    } else if (seed == BranchSeed::MinusDrift) {
        gamma = cb.a;
        label = "minus";
    }

    DensityFlow flow = constant_drift_flow(problem, gamma);

    Array2d source = cost_frames(problem.running, flow);
    const double lg = control_cost(problem.ham, gamma);
    for (double& s : source.data()) s += lg;
    const auto terminal = cost_field(problem.terminal, flow.frame(flow.mesh.n_t - 1));
    const DriftField drift = DriftField::constant(problem.mesh, problem.grid(), gamma);
    ValueField value = solve_hjb_backward(drift, problem.sigma, source, terminal,
                                          problem.mesh, problem.grid());

    if (seed != BranchSeed::ZeroDrift) {
        const bool want_negative = (seed == BranchSeed::PlusDrift);
        for (std::size_t j = 0; j + 1 < value.mesh.n_t; ++j) {
            for (std::size_t i = 0; i < value.grid.n_x; ++i) {
                const double g = value.vx(j, i);
                if (want_negative ? (g >= 0.0) : (g <= 0.0))
                    throw SignConditionViolated(value.mesh.time(j), value.grid.point(i), g);
            }
        }
    }

    MfgSolution sol;
    sol.flow = flow;
    sol.drift = drift;
    sol.value = std::move(value);
    sol.branch_label = label;
    sol.certificate = certificate_of(sol.value);
    const MapResult check = mfg_map(problem, flow, kink_hint_for(seed));
    sol.residual = flow_distance(check.flow, flow);
    const double m0 = mean_of(problem.init);
    if (std::abs(m0) > 1e-8 && !std::holds_alternative<ZeroCost>(problem.running))
        sol.note = "initial mean is nonzero with a running coupling present; the "
                   "one-sided construction is only exact for zero running cost";
    return sol;
}

MfgSolution picard_solve(const MfgProblem& problem, const DensityFlow& seed_flow,
                         KinkHint hint, const std::string& label,
                         const PicardOptions& opts) {
    detail::require_same_grid(problem.grid(), seed_flow.grid, "picard_solve");
    detail::require_same_mesh(problem.mesh, seed_flow.mesh, "picard_solve");
    DensityFlow cur = seed_flow;
    double theta = opts.theta;
    double prev_dir = 0.0;
    double last_step = std::numeric_limits<double>::infinity();

    auto finish = [&](const DensityFlow& flow) {
        MapResult fin = mfg_map(problem, flow, hint);
        MfgSolution sol;
        sol.residual = flow_distance(fin.flow, flow);
        sol.flow = flow;
        sol.value = std::move(fin.value);
        sol.drift = std::move(fin.drift);
        sol.branch_label = label;
        sol.certificate = certificate_of(sol.value);
        return sol;
    };

    for (std::size_t k = 0; k < opts.max_iter; ++k) {
        const MapResult bs = mfg_map(problem, cur, hint);
        const double defect = flow_distance(bs.flow, cur);
        if (defect <= opts.tol) return finish(cur);

        const auto cur_means = cur.mean_curve();
        const auto bs_means = bs.flow.mean_curve();
        double dir = 0.0;
        for (std::size_t j = 0; j < cur_means.size(); ++j) dir += bs_means[j] - cur_means[j];
        if (opts.adaptive && dir * prev_dir < 0.0) theta = std::max(theta * 0.7, 1e-4);
        prev_dir = dir;

        DensityFlow next = cur;
        for (std::size_t j = 0; j < cur.mesh.n_t; ++j) {
            double* out = next.frames.row(j);
            const double* a = bs.flow.frames.row(j);
            const double* b = cur.frames.row(j);
            for (std::size_t i = 0; i < cur.grid.n_x; ++i)
                out[i] = theta * a[i] + (1.0 - theta) * b[i];
            // frames stay probability densities after the convex combination
            const auto frame = next.frame(j);
            const double mass = frame.mass();
            if (std::abs(mass - 1.0) > 1e-14)
                for (std::size_t i = 0; i < cur.grid.n_x; ++i) out[i] /= mass;
        }
        const double step = flow_distance(next, cur);
        cur = std::move(next);
        last_step = step;
        if (step <= opts.tol) return finish(cur);
    }
    throw NoConvergence(opts.max_iter, last_step);
}

MfgSolution picard_solve(const MfgProblem& problem, BranchSeed seed,
                         const PicardOptions& opts) {
    const ControlBounds cb = control_bounds(problem.ham);
    double gamma = 0.0;
    std::string label = "picard-zero";
    if (seed == BranchSeed::PlusDrift) {
        gamma = cb.b;
        label = "picard-plus";
    } else if (seed == BranchSeed::MinusDrift) {
        gamma = cb.a;
        label = "picard-minus";
    }
    return picard_solve(problem, constant_drift_flow(problem, gamma), kink_hint_for(seed),
                        label, opts);
}

BranchCatalog enumerate_branches(const MfgProblem& problem, const EnumerateOptions& opts) {
    struct Attempt {
        std::string label;
        std::function<MfgSolution()> run;
    };
    std::vector<Attempt> attempts;
    attempts.push_back({"plus", [&] { return construct_branch(problem, BranchSeed::PlusDrift); }});
    attempts.push_back(
        {"minus", [&] { return construct_branch(problem, BranchSeed::MinusDrift); }});
    attempts.push_back(
        {"picard-zero", [&] { return picard_solve(problem, BranchSeed::ZeroDrift, opts.picard); }});

    const ControlBounds cb = control_bounds(problem.ham);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> gdist(cb.a, cb.b);
    for (std::size_t r = 0; r < opts.n_random_seeds; ++r) {
        const double gamma = gdist(rng);
        const KinkHint hint = gamma > grad_tol    ? KinkHint::Minus
                              : gamma < -grad_tol ? KinkHint::Plus
                                                  : KinkHint::Zero;
        const std::string label = "picard-rand" + std::to_string(r);
        attempts.push_back({label, [&problem, &opts, gamma, hint, label] {
                                return picard_solve(problem,
                                                    constant_drift_flow(problem, gamma), hint,
                                                    label, opts.picard);
                            }});
    }

    std::vector<std::optional<MfgSolution>> results(attempts.size());
    std::vector<std::string> errors(attempts.size());
    parallel_for(attempts.size(), [&](std::size_t i) {
        try {
            results[i] = attempts[i].run();
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    BranchCatalog catalog;
    for (std::size_t i = 0; i < attempts.size(); ++i) {
        if (!results[i]) {
            catalog.diagnostics.push_back(attempts[i].label + ": " + errors[i]);
            continue;
        }
        MfgSolution& sol = *results[i];
        if (sol.residual > opts.picard.tol) {
            catalog.diagnostics.push_back(attempts[i].label + ": best-response residual " +
                                          std::to_string(sol.residual) + " exceeds tolerance");
            continue;
        }
        bool duplicate = false;
        for (const MfgSolution& kept : catalog.solutions) {
            if (flow_distance(kept.flow, sol.flow) <= opts.dedup_threshold) {
                catalog.diagnostics.push_back(attempts[i].label + ": duplicate of " +
                                              kept.branch_label);
                duplicate = true;
                break;
            }
        }
        if (!duplicate) catalog.solutions.push_back(std::move(sol));
    }
    return catalog;
}

} // namespace mfg
