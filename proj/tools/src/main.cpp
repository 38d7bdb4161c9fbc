#include "config.hpp"
#include "runner.hpp"

#include "mfglab/errors.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
};

// "A:B:N" with A <= B and N >= 1.
Range parse_range(const std::string& text, const std::string& flag) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw cfg::ConfigError(0, flag + " expects A:B:N (got '" + text + "')");
    Range r;
    try {
        std::size_t used = 0;
        r.lo = std::stod(text.substr(0, c1));
        r.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const std::string tail = text.substr(c2 + 1);
        const long long n = std::stoll(tail, &used);
        if (used != tail.size() || n < 1)
            throw cfg::ConfigError(0, flag + " count must be a positive integer");
        r.n = static_cast<std::size_t>(n);
    } catch (const cfg::ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw cfg::ConfigError(0, flag + " expects A:B:N (got '" + text + "')");
    }
    if (!(r.lo <= r.hi))
        throw cfg::ConfigError(0, flag + " expects A <= B (got '" + text + "')");
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-dimensional mean field game laboratory"};
    app.set_version_flag("--version", "mfglab 0.1.0");
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed_raw = 0;
    bool quiet = false;

    auto* run_cmd = app.add_subcommand("run", "execute one config-driven experiment");
    run_cmd->add_option("config", config_path, "TOML experiment config")->required();
    auto* run_seed = run_cmd->add_option("--seed", seed_raw, "RNG seed override");
    run_cmd->add_option("--out", out_dir, "output directory override");
    run_cmd->add_flag("--quiet", quiet, "suppress the per-check summary");

    auto* two_cmd =
        app.add_subcommand("twopop", "run a two-population config (kind = twopop)");
    two_cmd->add_option("config", config_path, "TOML experiment config")->required();
    auto* two_seed = two_cmd->add_option("--seed", seed_raw, "RNG seed override");
    two_cmd->add_option("--out", out_dir, "output directory override");
    two_cmd->add_flag("--quiet", quiet, "suppress the per-check summary");

    double c0 = 1.0;
    std::string t_range = "0.5:4:8", mean_range = "-3:3:25";
    auto* diag_cmd = app.add_subcommand(
        "regime-diagram", "equilibrium-count map over horizon and initial mean");
    diag_cmd->add_option("--c0", c0, "control cost weight (positive)");
    diag_cmd->add_option("--t-range", t_range, "horizon range A:B:N");
    diag_cmd->add_option("--mean-range", mean_range, "initial mean range A:B:N");
    diag_cmd->add_option("--out", out_dir, "output directory override");
    diag_cmd->add_flag("--quiet", quiet, "suppress the per-check summary");

    auto* cert_cmd =
        app.add_subcommand("certify", "uniqueness and density-bound certificates");
    cert_cmd->require_subcommand(1);

    double alpha = 0.0, beta = 0.0;
    std::size_t n_pairs = 64;
    auto* mono_cmd = cert_cmd->add_subcommand(
        "monotone", "sampled monotonicity of a linear-in-mean coupling");
    mono_cmd->add_option("--alpha", alpha, "running cost slope")->required();
    mono_cmd->add_option("--beta", beta, "terminal cost slope")->required();
    mono_cmd->add_option("--pairs", n_pairs, "sampled density pairs");
    auto* mono_seed = mono_cmd->add_option("--seed", seed_raw, "sampling seed");
    mono_cmd->add_option("--out", out_dir, "output directory override");
    mono_cmd->add_flag("--quiet", quiet, "suppress the per-check summary");

    cfg::ThresholdConfig th;
    auto* thr_cmd = cert_cmd->add_subcommand(
        "threshold", "short-horizon uniqueness threshold from problem constants");
    thr_cmd->add_option("--d", th.d, "spatial dimension");
    thr_cmd->add_option("--lf", th.L_F, "running cost Lipschitz constant");
    thr_cmd->add_option("--lg", th.L_G, "terminal cost Lipschitz constant");
    thr_cmd->add_option("--sup-init", th.sup_init_density, "sup of the initial density");
    thr_cmd->add_option("--ch", th.C_H, "gradient bound of the Hamiltonian");
    thr_cmd->add_option("--cbar-h", th.Cbar_H, "Lipschitz constant of the gradient");
    thr_cmd->add_option("--sigma", th.sigma, "constant volatility");
    thr_cmd->add_option("--scan-max", th.T_max_scan, "largest horizon scanned");
    thr_cmd->add_option("--out", out_dir, "output directory override");
    thr_cmd->add_flag("--quiet", quiet, "suppress the per-check summary");

    cfg::DensityBoundConfig db;
    auto* db_cmd = cert_cmd->add_subcommand(
        "density-bound", "sup-norm bound of the forward density against its constant");
    db_cmd->add_option("--drift", db.drift, "drift shape: constant, sin or zero")
        ->check(CLI::IsMember({"constant", "sin", "zero"}));
    db_cmd->add_option("--bound", db.drift_bound, "sup of the drift");
    db_cmd->add_option("--sigma", db.sigma, "constant volatility");
    db_cmd->add_option("--t", db.t, "final time");
    db_cmd->add_option("--out", out_dir, "output directory override");
    db_cmd->add_flag("--quiet", quiet, "suppress the per-check summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    run::RunOptions ropts;
    ropts.out_dir = out_dir;
    ropts.quiet = quiet;

    try {
        if (run_cmd->parsed() || two_cmd->parsed()) {
            cfg::ExperimentConfig config = cfg::load_config(config_path);
            if (two_cmd->parsed() && config.kind != cfg::Kind::TwoPop)
                throw cfg::ConfigError(0, "the twopop subcommand needs kind = "
                                          "\"twopop\" (got '" +
                                              std::string(cfg::kind_name(config.kind)) +
                                              "')");
            if ((run_cmd->parsed() && run_seed->count() > 0) ||
                (two_cmd->parsed() && two_seed->count() > 0))
                ropts.seed = seed_raw;
            return run::run_experiment(std::move(config), ropts);
        }

        cfg::ExperimentConfig config;
        config.source_path = "<cli>";
        if (diag_cmd->parsed()) {
            if (c0 <= 0.0) throw cfg::ConfigError(0, "--c0 must be positive");
            const Range tr = parse_range(t_range, "--t-range");
            const Range mr = parse_range(mean_range, "--mean-range");
            if (tr.lo <= 0.0)
                throw cfg::ConfigError(0, "--t-range must start above zero");
            config.kind = cfg::Kind::RegimeDiagram;
            config.diagram = {c0, tr.lo, tr.hi, tr.n, mr.lo, mr.hi, mr.n};
        } else if (mono_cmd->parsed()) {
            config.kind = cfg::Kind::CertifyMonotone;
            config.problem.alpha = alpha;
            config.problem.beta = beta;
            config.certify.n_pairs = n_pairs;
            if (mono_seed->count() > 0) ropts.seed = seed_raw;
        } else if (thr_cmd->parsed()) {
            config.kind = cfg::Kind::CertifyThreshold;
            if (th.sigma <= 0.0) throw cfg::ConfigError(0, "--sigma must be positive");
            config.threshold = th;
        } else { // density-bound
            config.kind = cfg::Kind::CertifyDensityBound;
            if (db.sigma <= 0.0) throw cfg::ConfigError(0, "--sigma must be positive");
            if (db.t <= 0.0) throw cfg::ConfigError(0, "--t must be positive");
            if (db.drift_bound < 0.0)
                throw cfg::ConfigError(0, "--bound must be nonnegative");
            config.density_bound = db;
        }
        return run::run_experiment(std::move(config), ropts);
    } catch (const cfg::ConfigError& e) {
        const std::string where = config_path.empty() ? "mfglab" : config_path;
        if (e.line > 0)
            std::cerr << where << ":" << e.line << ": " << e.what() << "\n";
        else
            std::cerr << where << ": " << e.what() << "\n";
        return 2;
    } catch (const mfg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
