#pragma once

// Polarization lower bounds for the two-component chain, evaluated in log
// space, and the Monte Carlo harness that checks them against the chain.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmm_agora/markov_chain.hpp"
#include "gmm_agora/metrics.hpp"

namespace gmm_agora {

enum class BoundSource { theorem1, theorem2_part_i, theorem2_part_ii, lemma_behave, lemma_pol };

struct BoundResult {
    double log_value = 0.0;
    double value = 0.0;  // exp(log_value); underflows to 0 below ~1e-308
    BoundSource source = BoundSource::theorem1;
    // False when the formula has no meaning for the inputs (e.g. c <= 1 for part ii).
    bool defined = true;
    // True when the bound degenerates to the trivial bound 0.
    bool vacuous = false;
};

struct BoundQuery {
    std::size_t m = 30;
    std::size_t r = 1;
    double rho = 0.5;
    double sigma = 0.1;
    double c = 2.0;
    std::size_t ell = 1;
};

// Requires 0 < rho < 1/2 and sigma > 0.
PolarizationConstants constants(double rho, double sigma, std::size_t r);

// Lower bounds on staying level-ell polarized (part i) and on reaching level
// ell + 1 (part ii) after c m ln m steps. Accepts rho = 1/2, the boundary the
// published tables are evaluated at.
std::pair<BoundResult, BoundResult> theorem2_bounds(const BoundQuery& query);

// P(well-behaved RAG after r m steps) >= m!/m^{mr} ((m/2 - 1)/m xi)^{rm}.
BoundResult lemma_behave_log_bound(std::size_t m, std::size_t r, double rho, double sigma);

// P(level-1 polarized after (4r+2) m steps | well-behaved) lower bound.
BoundResult lemma_pol_log_bound(std::size_t m, std::size_t r, double rho, double sigma);

// Product of the two lemmas: a uniform lower bound on level-1 polarization
// within (5r + 2) m steps from any state.
BoundResult theorem1_log_bound(std::size_t m, std::size_t r, double rho, double sigma);

struct BoundTableRow {
    double sigma = 0.0;
    std::size_t ell = 1;
    double c = 0.0;
    std::size_t m = 0;
    double rho = 0.0;
    BoundResult part_i;
    BoundResult part_ii;
};

std::vector<BoundTableRow> generate_tables(double c, std::size_t m, double rho,
                                           const std::vector<double>& sigma_list,
                                           const std::vector<std::size_t>& ell_list);

// Header: sigma,ell,c,m,rho,bound_part_i,bound_part_ii,log_part_i,log_part_ii
std::string bounds_csv(const std::vector<BoundTableRow>& rows);

// Layouts of the three published tables (1: c=10; 2 and 3: c=2), m=30, rho=1/2.
struct TableLayout {
    double c;
    std::size_t m;
    double rho;
    std::vector<double> sigmas;
    std::vector<std::size_t> ells;
};
TableLayout published_table_layout(int table);

struct MonteCarloEstimate {
    std::size_t step = 0;
    std::size_t successes = 0;
    std::size_t trials = 0;
    double frequency = 0.0;
    double standard_error = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
};

MonteCarloEstimate make_estimate(std::size_t step, std::size_t successes, std::size_t trials);

// Runs `trials` independent chains (trial seeds derived from config.seed) and
// reports the fraction level-ell polarized at each checkpoint. Chains start
// from `initial` if given, otherwise from the default initializer.
std::vector<MonteCarloEstimate> monte_carlo_polarization_series(
    const McConfig& config, const PolarizationConstants& constants, std::size_t ell,
    const std::vector<std::size_t>& checkpoints, std::size_t trials,
    const std::optional<McState>& initial = std::nullopt, std::size_t jobs = 1);

MonteCarloEstimate monte_carlo_polarization(const McConfig& config,
                                            const PolarizationConstants& constants,
                                            std::size_t ell, std::size_t horizon, std::size_t trials,
                                            const std::optional<McState>& initial = std::nullopt,
                                            std::size_t jobs = 1);

}  // namespace gmm_agora
