#include "runner.hpp"

#include "mfglab/branch.hpp"
#include "mfglab/certify.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/io.hpp"
#include "mfglab/mc.hpp"
#include "mfglab/simple_game.hpp"
#include "mfglab/twopop.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace run {
namespace {

using nlohmann::json;

constexpr const char* tool_version = "mfglab 0.1.0";

std::string fmt(double v) { return mfg::io::format_double(v); }

bool wants(const cfg::OutputConfig& o, const std::string& format) {
    return std::find(o.formats.begin(), o.formats.end(), format) != o.formats.end();
}

struct CheckList {
    std::vector<std::pair<std::string, bool>> items;

    void add(const std::string& name, bool pass) { items.emplace_back(name, pass); }
    bool all_pass() const {
        for (const auto& [name, ok] : items)
            if (!ok) return false;
        return true;
    }
};

mfg::SpatialGrid make_grid(const cfg::NumericsConfig& n) {
    return mfg::SpatialGrid::uniform(n.x_min, n.x_max, n.n_x);
}

mfg::TimeMesh make_mesh(double horizon, const cfg::NumericsConfig& n) {
    return mfg::TimeMesh::uniform(horizon, n.n_t);
}

mfg::Density make_init(const cfg::ProblemConfig& p, const mfg::SpatialGrid& grid) {
    if (p.init == "gaussian")
        return mfg::Density::gaussian(grid, p.init_mean, p.init_variance);
    if (p.init == "uniform") return mfg::Density::uniform_on(grid, p.init_lo, p.init_hi);
    if (p.init == "bimodal")
        return mfg::Density::bimodal(grid, p.init_mean, p.init_variance, p.init_mean2,
                                     p.init_variance2);
    return mfg::Density::point_mass(grid, p.init_mean);
}

mfg::Hamiltonian make_ham(const cfg::ProblemConfig& p) {
    if (p.hamiltonian == "bangbang") return mfg::BangBang{p.a, p.b};
    if (p.hamiltonian == "smooth-capped") return mfg::SmoothCapped{p.delta};
    return mfg::QuadraticControl{p.c0};
}

mfg::SigmaFn make_sigma(double sigma) {
    return [sigma](double) { return sigma; };
}

const char* cert_name(mfg::GradientCertificate c) {
    switch (c) {
    case mfg::GradientCertificate::AllNegative: return "AllNegative";
    case mfg::GradientCertificate::AllPositive: return "AllPositive";
    default: return "Mixed";
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n, lo);
    for (std::size_t i = 1; i < n; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

/// CSV column labels must be unique; duplicates get a numeric suffix.
std::vector<std::string> unique_labels(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& label : raw) {
        std::string candidate = label;
        for (int k = 2; seen.count(candidate); ++k)
            candidate = label + "-" + std::to_string(k);
        seen.insert(candidate);
        out.push_back(candidate);
    }
    return out;
}

void apply_asserts_common(const cfg::AssertConfig& a, CheckList& checks,
                          std::optional<std::int64_t> count, double max_residual,
                          const std::string& verdict) {
    if (a.catalog_size)
        checks.add("assert catalog_size == " + std::to_string(*a.catalog_size),
                   count && *count == *a.catalog_size);
    if (a.root_count)
        checks.add("assert root_count == " + std::to_string(*a.root_count),
                   count && *count == *a.root_count);
    if (a.max_residual)
        checks.add("assert max_residual <= " + fmt(*a.max_residual),
                   max_residual <= *a.max_residual);
    if (a.verdict)
        checks.add("assert verdict == " + *a.verdict, verdict == *a.verdict);
}

// ---------------------------------------------------------------------------

void run_branches(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                  CheckList& checks) {
    const auto grid = make_grid(c.numerics);
    const auto mesh = make_mesh(c.problem.horizon, c.numerics);
    mfg::MfgProblem prob{make_ham(c.problem), make_sigma(c.problem.sigma),
                         mfg::LinearMean{c.problem.alpha, {}},
                         mfg::LinearMean{c.problem.beta, {}},
                         make_init(c.problem, grid), mesh};

    mfg::EnumerateOptions eo;
    eo.picard.theta = c.numerics.theta;
    eo.picard.max_iter = c.numerics.max_iter;
    eo.picard.tol = c.numerics.fp_tol;
    eo.dedup_threshold = c.numerics.dedup;
    eo.n_random_seeds = c.numerics.n_random_seeds;
    eo.seed = c.seed;
    const mfg::BranchCatalog cat = mfg::enumerate_branches(prob, eo);

    std::vector<std::string> raw_labels;
    for (const auto& sol : cat.solutions) raw_labels.push_back(sol.branch_label);
    const auto labels = unique_labels(raw_labels);

    if (wants(c.output, "json")) {
        json entries = json::array();
        double max_res = 0.0;
        for (std::size_t i = 0; i < cat.solutions.size(); ++i) {
            const auto& sol = cat.solutions[i];
            const auto means = sol.flow.mean_curve();
            json e;
            e["label"] = labels[i];
            e["residual"] = sol.residual;
            e["certificate"] = cert_name(sol.certificate);
            e["mean_initial"] = means.front();
            e["mean_terminal"] = means.back();
            if (!sol.note.empty()) e["note"] = sol.note;
            entries.push_back(e);
            max_res = std::max(max_res, sol.residual);
        }
        json doc;
        doc["count"] = cat.solutions.size();
        doc["entries"] = entries;
        doc["diagnostics"] = cat.diagnostics;
        em.emit("catalog.json", doc.dump(2) + "\n");
    }

    if (wants(c.output, "csv")) {
        mfg::io::Csv means_csv;
        means_csv.header.push_back("t");
        for (const auto& label : labels) means_csv.header.push_back(label);
        std::vector<std::vector<double>> curves;
        for (const auto& sol : cat.solutions) curves.push_back(sol.flow.mean_curve());
        for (std::size_t j = 0; j < mesh.n_t; ++j) {
            std::vector<std::string> row{fmt(mesh.time(j))};
            for (const auto& curve : curves) row.push_back(fmt(curve[j]));
            means_csv.add_row(std::move(row));
        }
        em.emit("means.csv", means_csv.serialize());

        mfg::io::Csv dens_csv;
        dens_csv.header.push_back("x");
        for (const auto& label : labels) dens_csv.header.push_back(label);
        for (std::size_t i = 0; i < grid.n_x; ++i) {
            std::vector<std::string> row{fmt(grid.point(i))};
            for (const auto& sol : cat.solutions)
                row.push_back(fmt(sol.flow.frames(mesh.n_t - 1, i)));
            dens_csv.add_row(std::move(row));
        }
        em.emit("terminal_density.csv", dens_csv.serialize());
    }

    if (wants(c.output, "svg")) {
        std::vector<double> ts;
        for (std::size_t j = 0; j < mesh.n_t; ++j) ts.push_back(mesh.time(j));
        std::vector<mfg::io::LineSeries> series;
        for (std::size_t i = 0; i < cat.solutions.size(); ++i)
            series.push_back({labels[i], cat.solutions[i].flow.mean_curve()});
        em.emit("means.svg",
                mfg::io::svg_line_chart(ts, series, "equilibrium mean curves", "t",
                                        "M(m(t))"));
    }

    checks.add("catalog_nonempty", !cat.solutions.empty());
    double max_res = 0.0;
    for (const auto& sol : cat.solutions) max_res = std::max(max_res, sol.residual);
    apply_asserts_common(c.asserts, checks,
                         static_cast<std::int64_t>(cat.solutions.size()), max_res, "");
}

// ---------------------------------------------------------------------------

const char* regime_name(const mfg::SimpleGameSpec& spec) {
    if (spec.horizon < 2.0 * spec.c0) return "small-horizon";
    if (spec.horizon > 2.0 * spec.c0) return "large-horizon";
    return "critical";
}

void run_simple_game(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                     CheckList& checks) {
    const mfg::SimpleGameSpec spec{c.problem.c0, c.problem.sigma, c.problem.horizon,
                                   c.problem.init_mean};
    const mfg::RootSet rs = mfg::enumerate_roots(spec);
    const double span = std::abs(spec.mean_init) + spec.horizon + 2.0 * spec.c0 + 1.0;
    const mfg::BruteForceResult brute = mfg::brute_force_roots(spec, -span, span, 8001);

    const std::int64_t count =
        rs.is_continuum ? -1 : static_cast<std::int64_t>(rs.roots.size());

    if (wants(c.output, "json")) {
        json doc;
        doc["count"] = count;
        doc["is_continuum"] = rs.is_continuum;
        doc["regime"] = regime_name(spec);
        if (rs.is_continuum) doc["band"] = {{"hi", rs.band_hi}, {"lo", rs.band_lo}};
        json roots = json::array();
        for (const auto& r : rs.roots) {
            json e;
            e["M"] = r.M;
            e["residual"] = r.residual;
            e["continuum_member"] = r.continuum_member;
            roots.push_back(e);
        }
        doc["roots"] = roots;
        json scan;
        scan["continuum_detected"] = brute.continuum_detected;
        scan["roots"] = brute.roots;
        doc["scan"] = scan;
        doc["spec"] = {{"c0", spec.c0},
                       {"horizon", spec.horizon},
                       {"mean_init", spec.mean_init},
                       {"sigma", spec.sigma}};
        em.emit("roots.json", doc.dump(2) + "\n");
    }

    const auto sweep = linspace(-span, span, 401);
    if (wants(c.output, "csv")) {
        mfg::io::Csv csv;
        csv.header = {"M", "residual"};
        for (double M : sweep)
            csv.add_row({fmt(M), fmt(mfg::consistency_residual(M, spec))});
        em.emit("consistency.csv", csv.serialize());
    }
    if (wants(c.output, "svg")) {
        std::vector<double> res;
        for (double M : sweep) res.push_back(mfg::consistency_residual(M, spec));
        em.emit("consistency.svg",
                mfg::io::svg_line_chart(sweep, {{"residual", res}},
                                        "consistency defect by terminal mean", "M",
                                        "residual"));
    }

    bool agree = false;
    if (rs.is_continuum) {
        agree = brute.continuum_detected;
    } else if (!brute.continuum_detected && brute.roots.size() == rs.roots.size()) {
        agree = true;
        for (std::size_t i = 0; i < rs.roots.size(); ++i)
            agree = agree && std::abs(rs.roots[i].M - brute.roots[i]) <= 1e-7;
    }
    checks.add("closed_form_matches_independent_scan", agree);

    bool residuals_ok = true;
    if (rs.is_continuum) {
        for (double M : {rs.band_lo, 0.5 * (rs.band_lo + rs.band_hi), rs.band_hi})
            residuals_ok =
                residuals_ok && std::abs(mfg::consistency_residual(M, spec)) <= 1e-9;
    } else {
        for (const auto& r : rs.roots)
            residuals_ok =
                residuals_ok && std::abs(mfg::consistency_residual(r.M, spec)) <= 1e-9;
    }
    checks.add("root_residuals_below_1e-9", residuals_ok);

    apply_asserts_common(c.asserts, checks, count, 0.0, regime_name(spec));
}

// ---------------------------------------------------------------------------

double sampler_mean(const cfg::ProblemConfig& p, const mfg::SpatialGrid& grid) {
    if (p.init == "gaussian" || p.init == "point") return p.init_mean;
    if (p.init == "uniform") return 0.5 * (p.init_lo + p.init_hi);
    return mfg::mean_of(make_init(p, grid)); // bimodal draws from the grid density
}

mfg::InitSampler make_sampler(const cfg::ProblemConfig& p, const mfg::SpatialGrid& grid) {
    if (p.init == "gaussian")
        return mfg::sampler_gaussian(p.init_mean, std::sqrt(p.init_variance));
    if (p.init == "uniform") return mfg::sampler_uniform(p.init_lo, p.init_hi);
    if (p.init == "point") return mfg::sampler_point(p.init_mean);
    return mfg::sampler_from_density(make_init(p, grid));
}

void run_mc_verify(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                   CheckList& checks) {
    const auto grid = make_grid(c.numerics);
    const auto mesh = make_mesh(c.problem.horizon, c.numerics);
    const mfg::Hamiltonian ham = make_ham(c.problem);
    const auto bounds = mfg::control_bounds(ham);
    const double gbar = std::clamp(c.mc.control, bounds.a, bounds.b);
    const double m0 = sampler_mean(c.problem, grid);
    const mfg::SigmaFn sigma = make_sigma(c.problem.sigma);
    const auto sampler = make_sampler(c.problem, grid);

    mfg::SimOptions so;
    so.horizon = c.problem.horizon;
    so.n_paths = c.mc.n_paths;
    so.n_steps = c.mc.n_steps;
    so.seed = c.seed;
    so.control_lo = bounds.a;
    so.control_hi = bounds.b;
    so.n_checkpoints = c.mc.n_checkpoints;

    const mfg::Strategy strategy = mfg::Strategy::constant(c.mc.control);
    const mfg::PathEnsemble ens = mfg::simulate(strategy, sigma, sampler, so);

    std::function<double(double)> psi = mfg::psi_identity();
    if (c.mc.psi == "exponential")
        psi = mfg::psi_exponential(c.mc.psi_lambda, bounds.a, bounds.b, c.problem.sigma);
    else if (c.mc.psi == "tanh")
        psi = mfg::psi_tanh(bounds.a, bounds.b, c.problem.sigma);

    struct Row {
        double t, mean, se, law, diff, psi_mean, psi_se;
        bool within;
    };
    std::vector<Row> rows;
    bool all_within = true;
    for (std::size_t j = 0; j < ens.frame_times.size(); ++j) {
        const double t = ens.frame_times[j];
        const auto mom = mfg::frame_moment(ens, j, mfg::psi_identity());
        const double law = m0 + gbar * t;
        const double diff = std::abs(mom.mean - law);
        const bool within = diff <= std::max(3.0 * mom.se, 0.01);
        Row row{t, mom.mean, mom.se, law, diff, 0.0, 0.0, within};
        if (c.mc.psi != "identity") {
            const auto pm = mfg::frame_moment(ens, j, psi);
            row.psi_mean = pm.mean;
            row.psi_se = pm.se;
        }
        rows.push_back(row);
        all_within = all_within && within;
    }

    json probe_doc;
    bool probe_clean = true;
    if (c.mc.n_probes > 0) {
        const auto drift = mfg::DriftField::constant(mesh, grid, gbar);
        const auto init = make_init(c.problem, grid);
        const auto flow = mfg::solve_fp_forward(drift, sigma, init, mesh);
        const double alpha = c.problem.alpha, beta = c.problem.beta;
        const mfg::RunningCost f = [ham, alpha](double x, const mfg::Density& mu,
                                                double gamma) {
            return mfg::control_cost(ham, gamma) + alpha * x * mfg::mean_of(mu);
        };
        const mfg::TerminalCost g = [beta](double x, const mfg::Density& mu) {
            return beta * x * mfg::mean_of(mu);
        };
        const auto rep = mfg::optimality_probe(strategy, sigma, sampler, so, f, g, flow,
                                               c.mc.n_probes, c.seed + 7777);
        probe_clean = rep.n_flagged == 0;
        probe_doc["candidate_cost"] = rep.candidate_cost;
        probe_doc["n_flagged"] = rep.n_flagged;
        json perts = json::array();
        for (const auto& p : rep.perturbations) {
            json e;
            e["t1"] = p.t1;
            e["t2"] = p.t2;
            e["level"] = p.level;
            e["mean_diff"] = p.mean_diff;
            e["se_diff"] = p.se_diff;
            e["flagged"] = p.flagged;
            perts.push_back(e);
        }
        probe_doc["perturbations"] = perts;
    }

    if (wants(c.output, "csv")) {
        mfg::io::Csv csv;
        csv.header = {"t", "mc_mean", "mc_se", "law_mean", "abs_diff", "within"};
        if (c.mc.psi != "identity") {
            csv.header.push_back("psi_mean");
            csv.header.push_back("psi_se");
        }
        for (const auto& r : rows) {
            std::vector<std::string> row{fmt(r.t),    fmt(r.mean), fmt(r.se),
                                         fmt(r.law),  fmt(r.diff), r.within ? "1" : "0"};
            if (c.mc.psi != "identity") {
                row.push_back(fmt(r.psi_mean));
                row.push_back(fmt(r.psi_se));
            }
            csv.add_row(std::move(row));
        }
        em.emit("moments.csv", csv.serialize());
    }

    if (wants(c.output, "json")) {
        json doc;
        doc["control"] = gbar;
        doc["mean_init"] = m0;
        doc["n_paths"] = c.mc.n_paths;
        doc["n_steps"] = c.mc.n_steps;
        doc["psi"] = c.mc.psi;
        doc["seed"] = c.seed;
        json cps = json::array();
        for (const auto& r : rows) {
            json e;
            e["t"] = r.t;
            e["mc_mean"] = r.mean;
            e["mc_se"] = r.se;
            e["law_mean"] = r.law;
            e["abs_diff"] = r.diff;
            e["within"] = r.within;
            if (c.mc.psi != "identity") {
                e["psi_mean"] = r.psi_mean;
                e["psi_se"] = r.psi_se;
            }
            cps.push_back(e);
        }
        doc["checkpoints"] = cps;
        if (c.mc.n_probes > 0) doc["probe"] = probe_doc;
        em.emit("mc.json", doc.dump(2) + "\n");
    }

    if (wants(c.output, "svg")) {
        std::vector<double> ts, mc_means, laws;
        for (const auto& r : rows) {
            ts.push_back(r.t);
            mc_means.push_back(r.mean);
            laws.push_back(r.law);
        }
        em.emit("moments.svg",
                mfg::io::svg_line_chart(ts, {{"mc_mean", mc_means}, {"law_mean", laws}},
                                        "sample mean against the drift law", "t",
                                        "mean"));
    }

    checks.add("mean_matches_law_at_checkpoints", all_within);
    if (c.mc.n_probes > 0) checks.add("no_probe_beats_candidate", probe_clean);
    apply_asserts_common(c.asserts, checks, std::nullopt, 0.0, "");
}

// ---------------------------------------------------------------------------

void run_certify_monotone(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                          CheckList& checks) {
    const auto grid = make_grid(c.numerics);
    const mfg::CostSpec F = mfg::LinearMean{c.problem.alpha, {}};
    const mfg::CostSpec G = mfg::LinearMean{c.problem.beta, {}};
    const auto rep = mfg::monotonicity_check(F, G, grid, c.certify.n_pairs, c.seed);
    const auto rv = mfg::regime_verdict(c.problem.alpha, c.problem.beta);

    double closed_gap = 0.0;
    for (const auto& p : rep.pairs)
        if (std::isfinite(p.f_closed))
            closed_gap = std::max(closed_gap, std::abs(p.f_form - p.f_closed));

    if (wants(c.output, "json")) {
        json doc;
        doc["closed_form_max_gap"] = closed_gap;
        doc["inputs"] = {{"alpha", c.problem.alpha},
                         {"beta", c.problem.beta},
                         {"n_pairs", c.certify.n_pairs},
                         {"seed", c.seed}};
        doc["min_f_form"] = rep.min_f_form;
        doc["min_g_form"] = rep.min_g_form;
        doc["regime_verdict"] = mfg::to_string(rv);
        doc["sampled_verdict"] = mfg::to_string(rep.verdict);
        em.emit("certificate.json", doc.dump(2) + "\n");
    }

    if (wants(c.output, "csv")) {
        mfg::io::Csv csv;
        csv.header = {"delta_mean", "f_form", "g_form", "f_closed"};
        for (const auto& p : rep.pairs)
            csv.add_row({fmt(p.delta_mean), fmt(p.f_form), fmt(p.g_form),
                         fmt(p.f_closed)});
        em.emit("pairs.csv", csv.serialize());
    }

    const bool consistent =
        !(rv == mfg::RegimeVerdict::ProvablyUnique &&
          rep.verdict == mfg::MonotoneVerdict::MonotoneFail) &&
        !(rv == mfg::RegimeVerdict::ProvablyMultiple &&
          rep.verdict == mfg::MonotoneVerdict::MonotonePass);
    checks.add("sampling_consistent_with_sign_rule", consistent);
    apply_asserts_common(c.asserts, checks, std::nullopt, 0.0,
                         mfg::to_string(rep.verdict));
}

void run_certify_threshold(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                           CheckList& checks) {
    mfg::ThresholdInputs in;
    in.d = c.threshold.d;
    in.L_F = c.threshold.L_F;
    in.L_G = c.threshold.L_G;
    in.sup_init_density = c.threshold.sup_init_density;
    in.C_H = c.threshold.C_H;
    in.Cbar_H = c.threshold.Cbar_H;
    in.sigma = c.threshold.sigma;
    in.T_max_scan = c.threshold.T_max_scan;
    const auto res = mfg::short_time_threshold(in);

    if (wants(c.output, "json")) {
        json doc;
        doc["T_bar"] = res.T_bar;
        doc["discrepancy_note"] = res.discrepancy_note;
        doc["exceeds_scan"] = res.exceeds_scan;
        doc["inputs"] = {{"C_H", in.C_H},
                         {"Cbar_H", in.Cbar_H},
                         {"L_F", in.L_F},
                         {"L_G", in.L_G},
                         {"T_max_scan", in.T_max_scan},
                         {"d", in.d},
                         {"sigma", in.sigma},
                         {"sup_init_density", in.sup_init_density}};
        if (in.L_G == 0.0) {
            doc["lg_zero_improved"] = res.lg_zero_improved;
            doc["lg_zero_quadratic"] = res.lg_zero_quadratic;
        }
        doc["trace"] = {{"A_inf", res.trace.A_inf},   {"C_1", res.trace.C_1},
                        {"C_2", res.trace.C_2},       {"C_3", res.trace.C_3},
                        {"c_1", res.trace.c_1},       {"c_hat_T", res.trace.c_hat_T},
                        {"c_o", res.trace.c_o}};
        em.emit("certificate.json", doc.dump(2) + "\n");
    }

    checks.add("threshold_positive", res.T_bar > 0.0 || res.exceeds_scan);
    if (in.L_G == 0.0)
        checks.add("improved_at_least_quadratic",
                   res.lg_zero_improved >= res.lg_zero_quadratic);
    apply_asserts_common(c.asserts, checks, std::nullopt, 0.0, "");
}

void run_certify_density_bound(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                               CheckList& checks) {
    const auto grid = make_grid(c.numerics);
    const auto mesh = mfg::TimeMesh::uniform(c.density_bound.t, c.numerics.n_t);
    const auto init = make_init(c.problem, grid);

    mfg::DriftField drift;
    if (c.density_bound.drift == "constant") {
        drift = mfg::DriftField::constant(mesh, grid, c.density_bound.drift_bound);
    } else if (c.density_bound.drift == "zero") {
        drift = mfg::DriftField::constant(mesh, grid, 0.0);
    } else { // sin
        drift = mfg::DriftField::constant(mesh, grid, 0.0);
        for (std::size_t j = 0; j < mesh.n_t; ++j)
            for (std::size_t i = 0; i < grid.n_x; ++i)
                drift.b(j, i) = c.density_bound.drift_bound * std::sin(grid.point(i));
    }

    const auto rep = mfg::verify_density_bound(drift, c.density_bound.drift_bound,
                                               c.density_bound.sigma, init,
                                               c.density_bound.t);

    if (wants(c.output, "json")) {
        json doc;
        doc["c_hat"] = rep.c_hat;
        doc["drift"] = c.density_bound.drift;
        doc["drift_bound"] = c.density_bound.drift_bound;
        doc["pass"] = rep.pass;
        doc["ratio"] = rep.ratio;
        doc["sigma"] = c.density_bound.sigma;
        doc["sup_final"] = rep.sup_final;
        doc["sup_init"] = rep.sup_init;
        doc["t"] = c.density_bound.t;
        em.emit("certificate.json", doc.dump(2) + "\n");
    }

    checks.add("density_bound_holds", rep.pass);
    apply_asserts_common(c.asserts, checks, std::nullopt, 0.0,
                         rep.pass ? "pass" : "fail");
}

// ---------------------------------------------------------------------------

mfg::BranchSeed seed_token(const std::string& token) {
    return token == "plus" ? mfg::BranchSeed::PlusDrift : mfg::BranchSeed::MinusDrift;
}

void run_twopop(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                CheckList& checks) {
    const auto grid = make_grid(c.numerics);
    const auto mesh = make_mesh(c.problem.horizon, c.numerics);
    const auto& t = c.twopop;

    mfg::TwoPopProblem prob;
    prob.ham1 = mfg::BangBang{t.a1, t.b1};
    prob.ham2 = mfg::BangBang{t.a2, t.b2};
    prob.sigma1 = make_sigma(t.sigma1);
    prob.sigma2 = make_sigma(t.sigma2);
    prob.coeffs = {t.alpha1, t.beta1, t.gamma1, t.delta1,
                   t.alpha2, t.beta2, t.gamma2, t.delta2};
    prob.init1 = make_init(c.problem, grid);
    prob.init2 = prob.init1;
    prob.mesh = mesh;

    const auto mv = mfg::matrix_uniqueness_check(prob.coeffs);

    std::vector<mfg::TwoPopSolution> sols;
    std::vector<std::string> diagnostics;
    for (const auto& label : t.branches) {
        const auto slash = label.find('/');
        try {
            sols.push_back(mfg::construct_twopop_branch(
                prob, seed_token(label.substr(0, slash)),
                seed_token(label.substr(slash + 1))));
        } catch (const mfg::Error& e) {
            diagnostics.push_back(label + ": " + e.what());
        }
    }

    double max_res = 0.0;
    for (const auto& s : sols) max_res = std::max(max_res, s.joint_residual);

    if (wants(c.output, "json")) {
        json branches = json::array();
        for (const auto& s : sols) {
            const auto m1 = s.flow1.mean_curve(), m2 = s.flow2.mean_curve();
            json e;
            e["label"] = s.label;
            e["joint_residual"] = s.joint_residual;
            e["certificate1"] = cert_name(s.cert1);
            e["certificate2"] = cert_name(s.cert2);
            e["mean1_terminal"] = m1.back();
            e["mean2_terminal"] = m2.back();
            branches.push_back(e);
        }
        json doc;
        doc["branches"] = branches;
        doc["diagnostics"] = diagnostics;
        json matrix;
        matrix["verdict"] = mfg::to_string(mv.verdict);
        if (std::isfinite(mv.lambda)) matrix["lambda"] = mv.lambda;
        doc["matrix"] = matrix;
        em.emit("twopop.json", doc.dump(2) + "\n");
    }

    if (wants(c.output, "csv") && !sols.empty()) {
        mfg::io::Csv csv;
        csv.header.push_back("t");
        for (const auto& s : sols) {
            csv.header.push_back(s.label + " m1");
            csv.header.push_back(s.label + " m2");
        }
        std::vector<std::pair<std::vector<double>, std::vector<double>>> curves;
        for (const auto& s : sols)
            curves.emplace_back(s.flow1.mean_curve(), s.flow2.mean_curve());
        for (std::size_t j = 0; j < mesh.n_t; ++j) {
            std::vector<std::string> row{fmt(mesh.time(j))};
            for (const auto& [m1, m2] : curves) {
                row.push_back(fmt(m1[j]));
                row.push_back(fmt(m2[j]));
            }
            csv.add_row(std::move(row));
        }
        em.emit("means.csv", csv.serialize());
    }

    if (wants(c.output, "svg") && !sols.empty()) {
        std::vector<double> ts;
        for (std::size_t j = 0; j < mesh.n_t; ++j) ts.push_back(mesh.time(j));
        std::vector<mfg::io::LineSeries> series;
        for (const auto& s : sols) {
            series.push_back({s.label + " m1", s.flow1.mean_curve()});
            series.push_back({s.label + " m2", s.flow2.mean_curve()});
        }
        em.emit("means.svg",
                mfg::io::svg_line_chart(ts, series, "two-population mean curves", "t",
                                        "mean"));
    }

    checks.add("requested_branches_constructed", diagnostics.empty());
    apply_asserts_common(c.asserts, checks, static_cast<std::int64_t>(sols.size()),
                         max_res, mfg::to_string(mv.verdict));
}

// ---------------------------------------------------------------------------

std::string count_color(double v) {
    const int count = static_cast<int>(std::lround(v));
    switch (count) {
    case -1: return "#7b2d8b"; // continuum band
    case 1: return "#2a6f97";
    case 2: return "#e9c46a";
    case 3: return "#c1121f";
    default: return "#888888";
    }
}

void run_regime_diagram(const cfg::ExperimentConfig& c, mfg::io::Emitter& em,
                        CheckList& checks) {
    const auto& d = c.diagram;
    const auto ts = linspace(d.t_lo, d.t_hi, d.t_n);
    const auto ms = linspace(d.mean_lo, d.mean_hi, d.mean_n);

    mfg::Array2d counts(d.t_n, d.mean_n);
    bool in_theory = true;
    mfg::io::Csv csv;
    csv.header = {"horizon", "mean_init", "root_count"};
    for (std::size_t r = 0; r < d.t_n; ++r) {
        for (std::size_t k = 0; k < d.mean_n; ++k) {
            const mfg::SimpleGameSpec spec{d.c0, 1.0, ts[r], ms[k]};
            const auto rs = mfg::enumerate_roots(spec);
            const int count =
                rs.is_continuum ? -1 : static_cast<int>(rs.roots.size());
            counts(r, k) = static_cast<double>(count);
            in_theory = in_theory && (count == -1 || (count >= 1 && count <= 3));
            csv.add_row({fmt(ts[r]), fmt(ms[k]), std::to_string(count)});
        }
    }

    if (wants(c.output, "csv")) em.emit("diagram.csv", csv.serialize());
    if (wants(c.output, "svg"))
        em.emit("diagram.svg",
                mfg::io::svg_cell_map(counts, count_color,
                                      "equilibrium count by horizon and initial mean",
                                      "M(nu)", "T", d.mean_lo, d.mean_hi, d.t_lo,
                                      d.t_hi));

    checks.add("root_counts_in_theory_range", in_theory);
}

} // namespace

int run_experiment(cfg::ExperimentConfig config, const RunOptions& opts) {
    if (opts.seed) config.seed = *opts.seed;
    std::string dir = !opts.out_dir.empty() ? opts.out_dir
                      : !config.output.directory.empty()
                          ? config.output.directory
                          : std::string("out/") + cfg::kind_name(config.kind);

    const auto t0 = std::chrono::steady_clock::now();
    mfg::io::Emitter em(dir);
    CheckList checks;

    switch (config.kind) {
    case cfg::Kind::Branches: run_branches(config, em, checks); break;
    case cfg::Kind::SimpleGame: run_simple_game(config, em, checks); break;
    case cfg::Kind::McVerify: run_mc_verify(config, em, checks); break;
    case cfg::Kind::CertifyMonotone: run_certify_monotone(config, em, checks); break;
    case cfg::Kind::CertifyThreshold: run_certify_threshold(config, em, checks); break;
    case cfg::Kind::CertifyDensityBound:
        run_certify_density_bound(config, em, checks);
        break;
    case cfg::Kind::TwoPop: run_twopop(config, em, checks); break;
    case cfg::Kind::RegimeDiagram: run_regime_diagram(config, em, checks); break;
    }

    mfg::io::RunManifest meta;
    meta.tool_version = tool_version;
    meta.config_path = config.source_path;
    meta.config_echo = config.raw_text;
    meta.seed = config.seed;
    meta.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      t0)
                            .count();
    meta.checks = checks.items;
    em.write_manifest(meta);

    if (!opts.quiet) {
        for (const auto& [name, ok] : checks.items)
            std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
        std::cout << "wrote " << em.dir().string() << " (" << em.files().size() + 1
                  << " files)\n";
    }
    return checks.all_pass() ? 0 : 1;
}

} // namespace run
