#pragma once

// The four top-level commands. Each resolves a ConfigMap into typed settings,
// validates everything, runs, and only then writes its outputs.

#include <set>
#include <string>

#include "gmm_agora/config.hpp"
#include "gmm_agora/harness.hpp"

namespace gmm_agora {

// Keys accepted by each command (after normalize_key).
const std::set<std::string>& run_keys();
const std::set<std::string>& mc_keys();
const std::set<std::string>& bounds_keys();
const std::set<std::string>& experiment_keys();

// Resolves an experiment spec: runner defaults, then config values.
ExperimentSpec resolve_experiment(ExperimentId id, const ConfigMap& config);

// Writes silos/weights/stability/silo_counts/interactions CSVs and manifest.json to `out`.
void cmd_run(const ConfigMap& config);

// Writes trace.csv, polarization.csv and manifest.json to `out`.
void cmd_mc(const ConfigMap& config);

// Returns the bounds CSV; also writes it to `out` when that key is set.
std::string cmd_bounds(const ConfigMap& config);

void cmd_experiment(const std::string& name, const ConfigMap& config);

}  // namespace gmm_agora
