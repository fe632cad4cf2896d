#pragma once

// Single-agent-update chain over 1-d two-component mixtures
// w N(-1, sigma^2) + (1 - w) N(1, sigma^2). Each step picks a receiver and a
// sender uniformly, draws y from the sender's mixture, swaps y into the
// receiver's RAG and recomputes the receiver's weight.
//
// Weights are stored as log-odds logit(w) = ln(w / (1 - w)). Level-l
// polarization needs w resolved to within 1/(1 + C^l) of 1, which for small
// sigma is far below double spacing near 1; log-odds keep both tails exact.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gmm_agora/random.hpp"

namespace gmm_agora {

enum class RemovalRule { farthest, nearest };

struct McConfig {
    std::size_t m = 3;
    std::size_t r = 2;
    double sigma = 0.1;
    std::uint64_t seed = 1;
    RemovalRule removal = RemovalRule::farthest;
    // 0: sender uniform over all m agents (receiver included). Otherwise the
    // sender is uniform over the k agents with the nearest weights.
    std::size_t k = 0;

    void validate() const;
};

struct McAgent {
    double logit = 0.0;
    std::vector<double> rag;

    double weight() const;
};

struct McState {
    std::vector<McAgent> agents;
    std::size_t t = 0;

    static McState from_weights(const std::vector<double>& weights,
                                const std::vector<std::vector<double>>& rags);
};

struct McRecord {
    std::size_t receiver = 0;
    std::size_t sender = 0;
    double y = 0.0;
    std::size_t removed_slot = 0;
};

inline double logit_of(double w) { return std::log(w) - std::log1p(-w); }
double weight_of_logit(double logit);

// (1/r) sum_h h_sigma(w, x_h) over the post-replacement RAG.
double mc_weight_update(double w, const std::vector<double>& rag, double sigma);
// Same update carried out on log-odds.
double mc_logit_update(double logit, const std::vector<double>& rag, double sigma);

// Slot removed when y arrives under the given rule (lowest slot on ties).
std::size_t mc_removal_slot(const std::vector<double>& rag, double y, RemovalRule rule);

// Draws y from w N(-1, sigma^2) + (1 - w) N(1, sigma^2), w = weight_of_logit(logit).
double mc_sample(double logit, double sigma, RandomSource& rng);

McRecord mc_step(McState& state, const McConfig& config, RandomSource& rng);

// Applies one update with a given receiver and arriving point.
McRecord mc_apply(McState& state, std::size_t receiver, std::size_t sender, double y,
                  const McConfig& config);

// w_i uniform on (0.05, 0.95), RAG drawn from the agent's own mixture.
McState mc_default_initial(const McConfig& config, RandomSource& rng);

// w_i = 0.5 with every RAG point at 0.
McState mc_adversarial_initial(const McConfig& config);

// Returns steps + 1 states: the initial one and one after each step.
std::vector<McState> mc_run(const McConfig& config, std::size_t steps,
                            std::optional<McState> initial = std::nullopt);

}  // namespace gmm_agora
