#pragma once

#include "config.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace run {

struct RunOptions {
    std::string out_dir;               // overrides the config's output directory
    std::optional<std::uint64_t> seed; // overrides the config's seed
    bool quiet = false;
};

/// Executes one experiment end to end: computes, emits artifacts plus
/// manifest.json, prints a per-check summary (unless quiet) and returns the
/// process exit code (0 all checks pass, 1 otherwise).
int run_experiment(cfg::ExperimentConfig config, const RunOptions& opts);

} // namespace run
