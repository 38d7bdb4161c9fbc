#pragma once

#include "toml.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfg {

/// Schema or parse failure; `line` anchors the diagnostic in the config file
/// (0 when no specific line applies).
struct ConfigError : std::runtime_error {
    ConfigError(int line, const std::string& msg)
        : std::runtime_error(msg), line(line) {}
    int line;
};

enum class Kind {
    Branches,
    SimpleGame,
    McVerify,
    CertifyMonotone,
    CertifyThreshold,
    CertifyDensityBound,
    TwoPop,
    RegimeDiagram,
};

const char* kind_name(Kind k);

struct ProblemConfig {
    std::string hamiltonian = "bangbang"; // bangbang | smooth-capped | quadratic-control
    double a = -1.0, b = 1.0;             // bangbang control interval
    double delta = 0.1;                   // smooth-capped parameter
    double c0 = 1.0;                      // quadratic-control parameter
    double sigma = 1.0;
    double alpha = 0.0; // running cost  F = alpha x M(m)
    double beta = 0.0;  // terminal cost G = beta  x M(m)
    std::string init = "gaussian"; // gaussian | uniform | bimodal | point
    double init_mean = 0.0, init_variance = 0.25;
    double init_lo = -1.0, init_hi = 1.0;             // uniform
    double init_mean2 = 0.0, init_variance2 = 0.25;   // bimodal second mode
    double horizon = 1.0;
};

struct NumericsConfig {
    double x_min = -6.0, x_max = 6.0;
    std::size_t n_x = 256, n_t = 256;
    double fp_tol = 1e-3;
    double theta = 0.5;
    double dedup = 1e-2;
    std::size_t max_iter = 200;
    std::size_t n_random_seeds = 3;
};

struct McConfig {
    std::size_t n_paths = 100000;
    std::size_t n_steps = 512;
    std::size_t n_checkpoints = 8;
    double control = 0.5;
    std::string psi = "identity"; // identity | exponential | tanh
    double psi_lambda = 1.0;
    std::size_t n_probes = 0;
};

struct CertifyConfig {
    std::size_t n_pairs = 64;
};

struct ThresholdConfig {
    std::size_t d = 1;
    double L_F = 1.0, L_G = 1.0;
    double sup_init_density = 1.0;
    double C_H = 1.0, Cbar_H = 1.0;
    double sigma = 1.0;
    double T_max_scan = 64.0;
};

struct DensityBoundConfig {
    std::string drift = "constant"; // constant | sin | zero
    double drift_bound = 1.0;
    double sigma = 1.0;
    double t = 0.5;
};

struct TwoPopConfig {
    double a1 = -1.0, b1 = 1.0, a2 = -1.0, b2 = 1.0;
    double sigma1 = 1.0, sigma2 = 1.0;
    double alpha1 = 0.0, beta1 = 0.0, gamma1 = 0.0, delta1 = 0.0;
    double alpha2 = 0.0, beta2 = 0.0, gamma2 = 0.0, delta2 = 0.0;
    std::vector<std::string> branches = {"plus/plus", "minus/minus"};
};

struct DiagramConfig {
    double c0 = 1.0;
    double t_lo = 0.5, t_hi = 4.0;
    std::size_t t_n = 8;
    double mean_lo = -3.0, mean_hi = 3.0;
    std::size_t mean_n = 25;
};

struct OutputConfig {
    std::string directory; // empty: derived from the kind
    std::vector<std::string> formats = {"csv", "json", "svg"};
};

struct AssertConfig {
    std::optional<std::int64_t> catalog_size;
    std::optional<std::int64_t> root_count;
    std::optional<std::string> verdict;
    std::optional<double> max_residual;
};

struct ExperimentConfig {
    Kind kind = Kind::Branches;
    std::uint64_t seed = 1;
    ProblemConfig problem;
    NumericsConfig numerics;
    McConfig mc;
    CertifyConfig certify;
    ThresholdConfig threshold;
    DensityBoundConfig density_bound;
    TwoPopConfig twopop;
    DiagramConfig diagram;
    OutputConfig output;
    AssertConfig asserts;

    std::string source_path;
    std::string raw_text;
};

/// Parses and schema-validates a config file. Unknown keys, bad enum values
/// and type mismatches all raise ConfigError with the offending line.
ExperimentConfig load_config(const std::string& path);

/// Same, from an in-memory document (used by the loader and by tests).
ExperimentConfig load_config_text(const std::string& text, const std::string& path);

} // namespace cfg
