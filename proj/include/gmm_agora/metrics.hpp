#pragma once

// Silo assignment and the summary statistics built on it, plus the
// polarization predicates for the two-component chain.

#include <optional>
#include <utility>
#include <vector>

#include "gmm_agora/markov_chain.hpp"
#include "gmm_agora/mixture.hpp"

namespace gmm_agora {

// trace[t][agent] -> silo label (0-based component index), one replicate.
using SiloTrace = std::vector<std::vector<std::size_t>>;

// Gaussian interval masses and exponential constants for given (rho, sigma, r).
// C and B are kept as logarithms; C itself overflows for sigma much below 0.04.
struct PolarizationConstants {
    double rho = 0.0;
    double sigma = 0.0;
    std::size_t r = 1;
    double eta = 0.0;      // P(N(-1, sigma^2) in -1 +/- rho)
    double log_eta = 0.0;
    double xi = 0.0;       // P(N(1, sigma^2) in 1 +/- rho / (2r))
    double log_xi = 0.0;
    double log_C = 0.0;    // 2 (1 - rho) / sigma^2
    double log_B = 0.0;    // 2 (1 + rho) / sigma^2
};

enum class SiloSystem { stable, unstable, neither };

// Index of the largest weight; the smaller index wins ties.
std::size_t silo(const Vector& weights);
inline std::size_t silo(const WeightVector& weights) { return silo(weights.values()); }

std::vector<std::size_t> silos(const std::vector<Vector>& weights);

// Fraction of agents whose silo changed between two consecutive snapshots.
double stability(const std::vector<std::size_t>& previous, const std::vector<std::size_t>& current);

std::size_t silo_count(const std::vector<std::size_t>& labels);

// Classifies the window [t0, t0 + length] of one replicate's trace.
SiloSystem classify_silo_system(const SiloTrace& trace, std::size_t t0, std::size_t length);

// First time t* from which exactly one silo exists at every snapshot through
// the end of the trace. Empty when the final snapshot has more than one silo.
std::optional<std::size_t> convergence_time(const SiloTrace& trace);

// I_l = (1 / (1 + C^l), 1 / (1 + C^-l)).
std::pair<double, double> interval_I(std::size_t ell, const PolarizationConstants& constants);

// I_l bounds in log-odds: (-l ln C, l ln C).
std::pair<double, double> interval_I_logit(std::size_t ell, const PolarizationConstants& constants);

bool is_level_polarized(const McState& state, std::size_t ell, const PolarizationConstants& constants);

// Every RAG point of every agent lies in (1 +/- rho) or (-1 +/- rho).
bool well_behaved(const McState& state, double rho);

}  // namespace gmm_agora
