#include "gmm_agora/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gmm_agora/errors.hpp"

namespace gmm_agora {

namespace {

constexpr std::uint64_t kOrderStreamTag = std::numeric_limits<std::uint64_t>::max();

std::vector<Matrix> constrain_volume(std::vector<Matrix> covariances, const std::optional<double>& target) {
    if (!target) return covariances;
    for (auto& cov : covariances) cov = volume_rescale(cov, *target);
    return covariances;
}

// Weight (and, in variable mode, covariance) M-step for one agent's memory.
void model_update(const RagSet& rag, const SimulationConfig& config, WeightVector& weights,
                  std::optional<MixtureParams>& own_params) {
    if (!own_params) {
        weights = update_weights(rag, config.params, weights, config.mass_offset);
        return;
    }
    CovarianceUpdateOptions options;
    options.regularization = config.covariance_regularization;
    options.weight_mass_offset = config.mass_offset;
    options.denominator_offset = config.mass_offset;
    // With an offset every component gets a finite update, so nothing is left stale.
    if (config.mass_offset > 0.0) options.vanishing_responsibility = 0.0;
    auto updated = update_weights_and_covariances(rag, *own_params, weights, options);
    weights = std::move(updated.weights);
    own_params = own_params->with_covariances(constrain_volume(std::move(updated.covariances),
                                                               config.volume_constraint));
}

}  // namespace

void SimulationConfig::validate() const {
    require(m >= 1, "m must be at least 1");
    require(n >= 1, "n must be at least 1");
    require(r >= 1, "r must be at least 1");
    require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    require(k <= m - 1, "k must satisfy k <= m - 1 (got k=" + std::to_string(k) +
                            ", m=" + std::to_string(m) + ")");
    require(k >= 1 || p == 1.0, "k must be at least 1 unless every interaction is mirrored (p = 1)");
    require(params.components() == n, "mixture has " + std::to_string(params.components()) +
                                          " components but n=" + std::to_string(n));
    if (volume_constraint) {
        require(variable_covariance, "a volume constraint requires variable covariance");
        require(*volume_constraint > 0.0 && std::isfinite(*volume_constraint),
                "volume constraint must be a positive determinant");
    }
    require(covariance_regularization >= 0.0, "covariance regularization must be non-negative");
    require(mass_offset >= 0.0 && std::isfinite(mass_offset), "mass offset must be non-negative");
}

std::vector<WeightVector> SystemState::weights() const {
    std::vector<WeightVector> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(a.weights);
    return out;
}

AgentStreams::AgentStreams(std::uint64_t seed, std::uint64_t replicate, std::size_t agents)
    : order_(derive_seed(seed, replicate, kOrderStreamTag)) {
    agents_.reserve(agents);
    for (std::size_t i = 0; i < agents; ++i) agents_.emplace_back(derive_seed(seed, replicate, i));
}

std::vector<WeightVector> init_weights(std::size_t n, std::size_t m, double epsilon) {
    require(n >= 1 && m >= 1, "n and m must be positive");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    std::vector<WeightVector> out;
    out.reserve(m);
    const double floor = epsilon / static_cast<double>(n);
    for (std::size_t i = 0; i < m; ++i) {
        Vector w = Vector::Constant(static_cast<Eigen::Index>(n), floor);
        w[static_cast<Eigen::Index>(i % n)] += 1.0 - epsilon;
        out.emplace_back(std::move(w));
    }
    return out;
}

std::vector<RagSet> init_rags(const std::vector<WeightVector>& weights, const MixtureParams& params,
                              std::size_t r, AgentStreams& streams) {
    require(r >= 1, "r must be at least 1");
    require(streams.size() >= weights.size(), "need one stream per agent");
    std::vector<RagSet> out;
    out.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        out.emplace_back(sample_from_gmm(weights[i], params, r, streams.agent(i)));
    return out;
}

std::vector<std::size_t> k_nearest_gmms(std::size_t k, std::size_t i,
                                        const std::vector<WeightVector>& weights) {
    const auto m = weights.size();
    require(i < m, "agent index out of range");
    require(k < m, "k must be smaller than the agent count");
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(m - 1);
    for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        ranked.emplace_back((weights[i].values() - weights[j].values()).squaredNorm(), j);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    std::vector<std::size_t> out(k);
    for (std::size_t s = 0; s < k; ++s) out[s] = ranked[s].second;
    return out;
}

std::size_t choose_partner(std::size_t i, double p, std::size_t k,
                           const std::vector<WeightVector>& weights, RandomSource& rng) {
    const double u = rng.uniform();
    if (u < p) return i;
    const auto neighbors = k_nearest_gmms(k, i, weights);
    require(!neighbors.empty(), "no neighbors to choose from (k = 0)");
    return neighbors[rng.index_below(neighbors.size())];
}

std::size_t rag_replace(RagSet& rag, const Vector& y) {
    std::size_t farthest = 0;
    double best = -1.0;
    for (std::size_t s = 0; s < rag.capacity(); ++s) {
        const double dist = (rag[s] - y).squaredNorm();
        if (dist > best) {
            best = dist;
            farthest = s;
        }
    }
    rag.replace(farthest, y);
    return farthest;
}

SystemState initial_state(const SimulationConfig& config, AgentStreams& streams) {
    auto weights = init_weights(config.n, config.m, config.epsilon);
    std::optional<MixtureParams> start_params;
    if (config.variable_covariance) {
        start_params = config.params.with_covariances(
            constrain_volume(config.params.covariances(), config.volume_constraint));
    }
    const MixtureParams& sampling = start_params ? *start_params : config.params;
    auto rags = init_rags(weights, sampling, config.r, streams);

    SystemState state;
    state.agents.reserve(config.m);
    for (std::size_t i = 0; i < config.m; ++i)
        state.agents.push_back(AgentState{std::move(weights[i]), std::move(rags[i]), start_params});
    return state;
}

InteractionRecord interaction_step(SystemState& state, std::size_t i, const SimulationConfig& config,
                                   RandomSource& rng) {
    require(i < state.agents.size(), "agent index out of range");
    InteractionRecord record;
    record.t = state.t + 1;
    record.agent = i;

    const auto weights = state.weights();
    const std::size_t j = choose_partner(i, config.p, config.k, weights, rng);
    record.partner = j;
    record.mirrored = (j == i);

    // Query from agent i's current model.
    const AgentState& asker = state.agents[i];
    const Vector x = sample_from_gmm(asker.weights, asker.mixture(config.params), 1, rng).front();

    // Pseudo-update of a copy of agent j; its stored state stays untouched.
    const AgentState& answerer = state.agents[j];
    RagSet pseudo_rag = answerer.rag;
    rag_replace(pseudo_rag, x);
    WeightVector pseudo_weights = answerer.weights;
    std::optional<MixtureParams> pseudo_params = answerer.own_params;
    model_update(pseudo_rag, config, pseudo_weights, pseudo_params);
    const MixtureParams& answer_mixture = pseudo_params ? *pseudo_params : config.params;
    const Vector y = sample_from_gmm(pseudo_weights, answer_mixture, 1, rng).front();

    AgentState& self = state.agents[i];
    record.removed_slot = rag_replace(self.rag, y);
    model_update(self.rag, config, self.weights, self.own_params);
    return record;
}

std::vector<InteractionRecord> sweep(SystemState& state, const SimulationConfig& config,
                                     AgentStreams& streams) {
    const auto m = state.agents.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (config.sweep_order == SweepOrder::permuted) {
        // Fisher-Yates driven by the dedicated order stream.
        for (std::size_t s = m; s > 1; --s) std::swap(order[s - 1], order[streams.order().index_below(s)]);
    }
    std::vector<InteractionRecord> records;
    records.reserve(m);
    for (const auto i : order) records.push_back(interaction_step(state, i, config, streams.agent(i)));
    ++state.t;
    return records;
}

Snapshot snapshot(const SystemState& state) {
    Snapshot snap;
    snap.t = state.t;
    snap.weights.reserve(state.agents.size());
    for (const auto& a : state.agents) {
        snap.weights.push_back(a.weights.values());
        if (a.own_params) snap.covariances.push_back(a.own_params->covariances());
    }
    return snap;
}

Trajectory run_simulation(const SimulationConfig& config) {
    config.validate();
    AgentStreams streams(config.seed, config.replicate, config.m);
    SystemState state = initial_state(config, streams);

    Trajectory trajectory;
    trajectory.snapshots.reserve(config.T + 1);
    trajectory.interactions.reserve(config.T * config.m);
    trajectory.snapshots.push_back(snapshot(state));
    for (std::size_t t = 0; t < config.T; ++t) {
        auto records = sweep(state, config, streams);
        trajectory.interactions.insert(trajectory.interactions.end(), records.begin(), records.end());
        trajectory.snapshots.push_back(snapshot(state));
    }
    return trajectory;
}

}  // namespace gmm_agora
