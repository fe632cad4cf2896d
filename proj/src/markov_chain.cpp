#include "gmm_agora/markov_chain.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "gmm_agora/errors.hpp"
#include "gmm_agora/mixture.hpp"

namespace gmm_agora {

namespace {

// ln(1 / (1 + exp(-z))) without overflow.
double log_sigmoid(double z) {
    return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

}  // namespace

void McConfig::validate() const {
    require(m >= 1, "m must be at least 1");
    require(r >= 1, "r must be at least 1");
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
    require(k < m, "k must be smaller than m");
}

double weight_of_logit(double logit) {
    return logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit)) : std::exp(logit) / (1.0 + std::exp(logit));
}

double McAgent::weight() const { return weight_of_logit(logit); }

McState McState::from_weights(const std::vector<double>& weights,
                              const std::vector<std::vector<double>>& rags) {
    require(weights.size() == rags.size(), "need one RAG per agent");
    McState state;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        require(weights[i] > 0.0 && weights[i] < 1.0, "chain weights must lie in (0, 1)");
        require(!rags[i].empty(), "RAG must be nonempty");
        state.agents.push_back(McAgent{logit_of(weights[i]), rags[i]});
    }
    return state;
}

double mc_logit_update(double logit, const std::vector<double>& rag, double sigma) {
    require(!rag.empty(), "RAG must be nonempty");
    require(sigma > 0.0, "sigma must be positive");
    std::vector<double> log_h(rag.size());
    std::vector<double> log_one_minus_h(rag.size());
    for (std::size_t s = 0; s < rag.size(); ++s) {
        const double a = h_sigma_logit(logit, rag[s], sigma);
        log_h[s] = log_sigmoid(a);
        log_one_minus_h[s] = log_sigmoid(-a);
    }
    // logit of the mean: ln(sum h) - ln(sum (1 - h)); the 1/r factors cancel.
    return log_sum_exp(log_h.data(), log_h.size()) -
           log_sum_exp(log_one_minus_h.data(), log_one_minus_h.size());
}

double mc_weight_update(double w, const std::vector<double>& rag, double sigma) {
    require(!rag.empty(), "RAG must be nonempty");
    double total = 0.0;
    for (const double x : rag) total += h_sigma(w, x, sigma);
    return total / static_cast<double>(rag.size());
}

std::size_t mc_removal_slot(const std::vector<double>& rag, double y, RemovalRule rule) {
    std::size_t chosen = 0;
    double best = std::abs(rag[0] - y);
    for (std::size_t s = 1; s < rag.size(); ++s) {
        const double dist = std::abs(rag[s] - y);
        if (rule == RemovalRule::farthest ? dist > best : dist < best) {
            best = dist;
            chosen = s;
        }
    }
    return chosen;
}

double mc_sample(double logit, double sigma, RandomSource& rng) {
    const double mean = rng.uniform() < weight_of_logit(logit) ? -1.0 : 1.0;
    return mean + sigma * rng.standard_normal();
}

McRecord mc_apply(McState& state, std::size_t receiver, std::size_t sender, double y,
                  const McConfig& config) {
    require(receiver < state.agents.size() && sender < state.agents.size(), "agent index out of range");
    McAgent& agent = state.agents[receiver];
    McRecord record{receiver, sender, y, mc_removal_slot(agent.rag, y, config.removal)};
    agent.rag[record.removed_slot] = y;
    agent.logit = mc_logit_update(agent.logit, agent.rag, config.sigma);
    ++state.t;
    return record;
}

McRecord mc_step(McState& state, const McConfig& config, RandomSource& rng) {
    const auto m = state.agents.size();
    const std::size_t i = rng.index_below(m);
    std::size_t j = 0;
    if (config.k == 0) {
        j = rng.index_below(m);
    } else {
        std::vector<std::pair<double, std::size_t>> ranked;
        ranked.reserve(m - 1);
        const double wi = state.agents[i].weight();
        for (std::size_t h = 0; h < m; ++h)
            if (h != i) ranked.emplace_back(std::abs(state.agents[h].weight() - wi), h);
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(config.k),
                          ranked.end());
        j = ranked[rng.index_below(config.k)].second;
    }
    const double y = mc_sample(state.agents[j].logit, config.sigma, rng);
    return mc_apply(state, i, j, y, config);
}

McState mc_default_initial(const McConfig& config, RandomSource& rng) {
    McState state;
    state.agents.resize(config.m);
    for (auto& agent : state.agents) {
        const double w = 0.05 + 0.9 * rng.uniform();
        agent.logit = logit_of(w);
        agent.rag.resize(config.r);
        for (auto& x : agent.rag) x = mc_sample(agent.logit, config.sigma, rng);
    }
    return state;
}

McState mc_adversarial_initial(const McConfig& config) {
    McState state;
    state.agents.assign(config.m, McAgent{0.0, std::vector<double>(config.r, 0.0)});
    return state;
}

std::vector<McState> mc_run(const McConfig& config, std::size_t steps, std::optional<McState> initial) {
    config.validate();
    Mt19937Source rng(config.seed);
    McState state = initial ? std::move(*initial) : mc_default_initial(config, rng);
    require(state.agents.size() == config.m, "initial state has the wrong agent count");
    for (const auto& a : state.agents) require(a.rag.size() == config.r, "initial RAG has the wrong size");

    std::vector<McState> trajectory;
    trajectory.reserve(steps + 1);
    trajectory.push_back(state);
    for (std::size_t s = 0; s < steps; ++s) {
        mc_step(state, config, rng);
        trajectory.push_back(state);
    }
    return trajectory;
}

}  // namespace gmm_agora
