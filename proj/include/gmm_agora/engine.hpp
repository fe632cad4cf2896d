#pragma once

// Interacting mixture agents: initialization, partner choice, the
// query / pseudo-update / answer exchange, farthest-point RAG replacement and
// the per-agent model update, run over T sweeps of all m agents.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gmm_agora/mixture.hpp"
#include "gmm_agora/random.hpp"

namespace gmm_agora {

enum class SweepOrder { fixed, permuted };

struct SimulationConfig {
    explicit SimulationConfig(MixtureParams mixture) : params(std::move(mixture)) {}

    std::size_t T = 100;
    double p = 0.4;
    std::size_t k = 29;
    std::size_t r = 5;
    std::size_t n = 30;
    std::size_t m = 30;
    double epsilon = 0.01;
    MixtureParams params;
    bool variable_covariance = false;
    std::optional<double> volume_constraint;
    // Diagonal loading applied after each covariance M-step (variable mode only).
    double covariance_regularization = 1e-6;
    // Added to each component's responsibility mass in every model update (the
    // weight numerator and, in variable mode, the covariance denominator). Keeps
    // weights strictly positive; 0 reproduces the bare M-step.
    double mass_offset = 10.0 * std::numeric_limits<double>::epsilon();
    SweepOrder sweep_order = SweepOrder::fixed;
    std::uint64_t seed = 1;
    std::uint64_t replicate = 0;

    // Throws ParameterError on the first violated constraint.
    void validate() const;
};

struct AgentState {
    WeightVector weights;
    RagSet rag;
    // Present only in variable-covariance mode: the agent's own covariances.
    std::optional<MixtureParams> own_params;

    const MixtureParams& mixture(const MixtureParams& shared) const {
        return own_params ? *own_params : shared;
    }
};

struct SystemState {
    std::vector<AgentState> agents;
    std::size_t t = 0;

    std::vector<WeightVector> weights() const;
};

struct InteractionRecord {
    std::size_t t = 0;  // sweep index the interaction belongs to (1-based)
    std::size_t agent = 0;
    std::size_t partner = 0;
    bool mirrored = false;
    std::size_t removed_slot = 0;
};

struct Snapshot {
    std::size_t t = 0;
    std::vector<Vector> weights;
    // Per agent, per component; empty unless variable covariance is on.
    std::vector<std::vector<Matrix>> covariances;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<InteractionRecord> interactions;
};

// One generator per agent, seeded from (seed, replicate, agent), plus a
// separate stream for sweep permutations.
class AgentStreams {
public:
    AgentStreams(std::uint64_t seed, std::uint64_t replicate, std::size_t agents);

    RandomSource& agent(std::size_t i) { return agents_[i]; }
    RandomSource& order() { return order_; }
    std::size_t size() const { return agents_.size(); }

private:
    std::vector<Mt19937Source> agents_;
    Mt19937Source order_;
};

// Agent i starts at (1 - epsilon) e_{i mod n} + (epsilon / n) 1.
std::vector<WeightVector> init_weights(std::size_t n, std::size_t m, double epsilon);

// Agent i's RAG: r draws from its own mixture using agent i's stream.
std::vector<RagSet> init_rags(const std::vector<WeightVector>& weights, const MixtureParams& params,
                              std::size_t r, AgentStreams& streams);

// The k agents j != i closest to i in Euclidean weight distance; ties go to
// the lower index. Returned in order of increasing distance.
std::vector<std::size_t> k_nearest_gmms(std::size_t k, std::size_t i,
                                        const std::vector<WeightVector>& weights);

std::size_t choose_partner(std::size_t i, double p, std::size_t k,
                           const std::vector<WeightVector>& weights, RandomSource& rng);

// Overwrites the point farthest from y (lowest slot on ties) and returns its slot.
std::size_t rag_replace(RagSet& rag, const Vector& y);

// Builds the initial system state for a validated config.
SystemState initial_state(const SimulationConfig& config, AgentStreams& streams);

// Agent i's full exchange. Only agent i's stored state changes; the partner's
// update is computed on a copy. All draws come from rng.
InteractionRecord interaction_step(SystemState& state, std::size_t i, const SimulationConfig& config,
                                   RandomSource& rng);

// One pass over all agents, in place, agent i drawing from streams.agent(i).
// Advances state.t by one.
std::vector<InteractionRecord> sweep(SystemState& state, const SimulationConfig& config,
                                     AgentStreams& streams);

Snapshot snapshot(const SystemState& state);

// Validates, initializes and runs T sweeps. Pure function of config.
Trajectory run_simulation(const SimulationConfig& config);

}  // namespace gmm_agora
