#pragma once

// Replicated, seeded experiment drivers. Each runner executes its replicates
// on a worker pool, aggregates in replicate order and writes CSV artifacts plus
// a manifest.json describing the fully resolved configuration.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gmm_agora/engine.hpp"
#include "gmm_agora/metrics.hpp"

namespace gmm_agora {

enum class GeometryKind { linear, circle, simplex };
enum class ExperimentId { run, fig2, fig4, fig5, fig6, fig7, appendixB, custom };

std::string to_string(GeometryKind kind);
std::string to_string(ExperimentId id);
GeometryKind parse_geometry(const std::string& text);
ExperimentId parse_experiment(const std::string& text);

// linear: d = 1, mu_i = delta_mu * i for i = 1..n.
// circle: d = 2, n points on a circle with nearest-neighbour chord delta_mu.
// simplex: d = n, mu_i = (delta_mu / sqrt 2) e_i, all pairs delta_mu apart.
// Every component gets covariance sigma^2 I.
MixtureParams mean_geometry(GeometryKind kind, std::size_t n, double delta_mu, double sigma);

struct GeometrySpec {
    GeometryKind kind = GeometryKind::linear;
    double delta_mu = 1.0;  // absolute separation
    double sigma = 0.3;
};

struct Sweep {
    std::string parameter;  // p, k, r, T, epsilon, sigma, delta_mu, delta_mu_over_sigma
    std::vector<double> values;
};

struct ExperimentSpec {
    ExperimentSpec();

    ExperimentId id = ExperimentId::run;
    GeometrySpec geometry;
    // Scalar simulation settings; params are rebuilt from `geometry` per run.
    SimulationConfig base;
    std::vector<Sweep> sweeps;
    // fig7 only: geometries and their delta_mu / sigma grids.
    std::vector<GeometryKind> geometries;
    std::size_t replicates = 1;
    std::filesystem::path output_dir;
    std::size_t jobs = 1;
    bool write_weights = false;
    bool write_interactions = false;
};

// Default settings for each runner (T, p, k, r, replicates, sweeps).
ExperimentSpec default_experiment(ExperimentId id);

// Applies a named scalar setting to a spec's base config or geometry.
void apply_setting(ExperimentSpec& spec, const std::string& parameter, double value);

// Builds the concrete SimulationConfig (params from geometry) for replicate 0.
SimulationConfig materialize(const ExperimentSpec& spec);

// Default delta_mu / sigma grids of the three geometries.
std::vector<double> separation_grid(GeometryKind kind);

struct ReplicateOutput {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    SiloTrace silos;
    std::vector<std::vector<Vector>> weights;         // only when write_weights
    std::vector<InteractionRecord> interactions;      // only when write_interactions
    std::vector<double> max_std;                      // variable covariance only
    std::vector<double> max_volume_error;             // volume constraint only
};

// Summarizes one finished trajectory.
ReplicateOutput summarize(const Trajectory& trajectory, const SimulationConfig& config,
                          bool keep_weights, bool keep_interactions);

// Runs `replicates` copies of config (replicate index 0..R-1) on `jobs` threads.
std::vector<ReplicateOutput> run_replicates(const SimulationConfig& config, std::size_t replicates,
                                            std::size_t jobs, bool keep_weights = false,
                                            bool keep_interactions = false);

struct TraceResult {
    SimulationConfig config;
    std::vector<ReplicateOutput> replicates;
};

struct SiloCountPoint {
    std::size_t k = 0;
    std::vector<std::size_t> final_counts;
    double mean = 0.0;
    double standard_error = 0.0;
};

struct GridCell {
    double p = 0.0;
    std::size_t k = 0;
    std::string directory;
    std::vector<ReplicateOutput> replicates;
};

struct CollapseResult {
    std::vector<ReplicateOutput> replicates;
    std::vector<bool> collapsed;
};

struct ConvergencePoint {
    GeometryKind geometry = GeometryKind::linear;
    double ratio = 0.0;  // delta_mu / sigma
    std::vector<std::optional<std::size_t>> t_star;
    std::size_t converged = 0;
    std::optional<double> mean;
    std::optional<double> standard_error;
};

struct CustomCell {
    std::vector<std::pair<std::string, double>> settings;
    std::string directory;
    std::vector<ReplicateOutput> replicates;
};

// Single configuration, all trace files (used by `run`).
TraceResult run_traces(const ExperimentSpec& spec);
TraceResult run_fig2(const ExperimentSpec& spec);
std::vector<SiloCountPoint> run_fig4(const ExperimentSpec& spec);
std::vector<GridCell> run_fig5(const ExperimentSpec& spec);
CollapseResult run_fig6(const ExperimentSpec& spec);
std::vector<ConvergencePoint> run_fig7(const ExperimentSpec& spec);
TraceResult run_appendixB(const ExperimentSpec& spec);
std::vector<CustomCell> run_custom(const ExperimentSpec& spec);

// Dispatches on spec.id.
void run_experiment(const ExperimentSpec& spec);

// Mean and standard error (sample sd / sqrt(count)); empty input gives nothing.
std::pair<double, double> mean_and_standard_error(const std::vector<double>& values);

}  // namespace gmm_agora
