#include "gmm_agora/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "gmm_agora/errors.hpp"
#include "gmm_agora/format.hpp"
#include "gmm_agora/parallel.hpp"

namespace gmm_agora {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln P(|Z| < z) for a standard normal Z, accurate in both tails.
double log_central_mass(double z) {
    if (z > 0.5) return std::log1p(-std::erfc(z / kSqrt2));
    return std::log(std::erf(z / kSqrt2));
}

// ln(1 + e^z)
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

BoundResult finish(double log_value, BoundSource source) {
    BoundResult out;
    out.source = source;
    out.log_value = log_value;
    out.value = std::exp(log_value);
    out.vacuous = (log_value == kNegInf);
    return out;
}

PolarizationConstants make_constants(double rho, double sigma, std::size_t r) {
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
    require(r >= 1, "r must be at least 1");
    PolarizationConstants k;
    k.rho = rho;
    k.sigma = sigma;
    k.r = r;
    k.log_eta = log_central_mass(rho / sigma);
    k.eta = std::exp(k.log_eta);
    k.log_xi = log_central_mass(rho / (2.0 * static_cast<double>(r) * sigma));
    k.xi = std::exp(k.log_xi);
    k.log_C = 2.0 * (1.0 - rho) / (sigma * sigma);
    k.log_B = 2.0 * (1.0 + rho) / (sigma * sigma);
    return k;
}

void require_chain_inputs(std::size_t m, std::size_t r, double rho, double sigma) {
    require(m >= 1, "m must be at least 1");
    require(r >= 1, "r must be at least 1");
    require(rho > 0.0 && rho < 0.5, "rho must lie in (0, 1/2)");
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
}

std::string format_value(const BoundResult& b, const char* format) {
    if (!b.defined) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, format, b.value);
    return buf;
}

std::string format_log(const BoundResult& b) {
    if (!b.defined) return "";
    return shortest(b.log_value);
}

std::string format_number(double v) { return shortest(v); }

}  // namespace

PolarizationConstants constants(double rho, double sigma, std::size_t r) {
    require(rho > 0.0 && rho < 0.5, "rho must lie in (0, 1/2)");
    return make_constants(rho, sigma, r);
}

std::pair<BoundResult, BoundResult> theorem2_bounds(const BoundQuery& q) {
    require(q.m >= 1, "m must be at least 1");
    require(q.ell >= 1, "polarization level must be at least 1");
    require(q.c > 0.0 && std::isfinite(q.c), "c must be positive");
    require(q.rho > 0.0 && q.rho <= 0.5, "rho must lie in (0, 1/2]");
    const auto k = make_constants(q.rho, q.sigma, q.r);

    const double m = static_cast<double>(q.m);
    const double steps = q.c * m * std::log(m);
    const double log_i = steps * k.log_eta - steps * std::exp(-static_cast<double>(q.ell) * k.log_C);
    BoundResult part_i = finish(log_i, BoundSource::theorem2_part_i);

    BoundResult part_ii;
    part_ii.source = BoundSource::theorem2_part_ii;
    if (q.c <= 1.0) {
        part_ii.defined = false;
        part_ii.log_value = std::numeric_limits<double>::quiet_NaN();
        part_ii.value = std::numeric_limits<double>::quiet_NaN();
    } else {
        part_ii = finish(log_i + std::log1p(-std::pow(m, 1.0 - q.c)), BoundSource::theorem2_part_ii);
    }
    return {part_i, part_ii};
}

BoundResult lemma_behave_log_bound(std::size_t m_count, std::size_t r_count, double rho, double sigma) {
    require_chain_inputs(m_count, r_count, rho, sigma);
    const auto k = make_constants(rho, sigma, r_count);
    const double m = static_cast<double>(m_count);
    const double r = static_cast<double>(r_count);
    if (m / 2.0 - 1.0 <= 0.0) return finish(kNegInf, BoundSource::lemma_behave);
    const double log_value = std::lgamma(m + 1.0) - m * r * std::log(m) +
                             r * m * (std::log(m / 2.0 - 1.0) - std::log(m) + k.log_xi);
    return finish(log_value, BoundSource::lemma_behave);
}

BoundResult lemma_pol_log_bound(std::size_t m_count, std::size_t r_count, double rho, double sigma) {
    require_chain_inputs(m_count, r_count, rho, sigma);
    const auto k = make_constants(rho, sigma, r_count);
    const double m = static_cast<double>(m_count);
    const double r = static_cast<double>(r_count);
    const double half = std::floor(m / 2.0);
    if (half == 0.0) return finish(kNegInf, BoundSource::lemma_pol);
    const double block = 4.0 * r + 2.0;
    const double total = block * m;
    const double multinomial = std::lgamma(total + 1.0) - m * std::lgamma(block + 1.0) - total * std::log(m);
    const double per_step = std::log(half) - std::log(m) + k.log_eta - softplus(k.log_C + r * k.log_B);
    return finish(multinomial + total * per_step, BoundSource::lemma_pol);
}

BoundResult theorem1_log_bound(std::size_t m, std::size_t r, double rho, double sigma) {
    const auto pol = lemma_pol_log_bound(m, r, rho, sigma);
    const auto behave = lemma_behave_log_bound(m, r, rho, sigma);
    return finish(pol.log_value + behave.log_value, BoundSource::theorem1);
}

std::vector<BoundTableRow> generate_tables(double c, std::size_t m, double rho,
                                           const std::vector<double>& sigma_list,
                                           const std::vector<std::size_t>& ell_list) {
    require(!sigma_list.empty() && !ell_list.empty(), "sigma and ell lists must be nonempty");
    std::vector<BoundTableRow> rows;
    rows.reserve(sigma_list.size() * ell_list.size());
    for (const double sigma : sigma_list) {
        for (const auto ell : ell_list) {
            const auto [part_i, part_ii] = theorem2_bounds(BoundQuery{m, 1, rho, sigma, c, ell});
            rows.push_back(BoundTableRow{sigma, ell, c, m, rho, part_i, part_ii});
        }
    }
    return rows;
}

std::string bounds_csv(const std::vector<BoundTableRow>& rows) {
    std::ostringstream out;
    out << "sigma,ell,c,m,rho,bound_part_i,bound_part_ii,log_part_i,log_part_ii\n";
    for (const auto& row : rows) {
        out << format_number(row.sigma) << ',' << row.ell << ',' << format_number(row.c) << ','
            << row.m << ',' << format_number(row.rho) << ','
            << format_value(row.part_i, "%.6e") << ',' << format_value(row.part_ii, "%.6e") << ','
            << format_log(row.part_i) << ',' << format_log(row.part_ii) << '\n';
    }
    return out.str();
}

TableLayout published_table_layout(int table) {
    const std::vector<std::size_t> ells{1, 2, 3, 4, 5};
    switch (table) {
        case 1: return {10.0, 30, 0.5, {0.3, 0.2, 0.1, 0.05}, ells};
        case 2:
        case 3: return {2.0, 30, 0.5, {0.4, 0.3, 0.2, 0.1, 0.05}, ells};
        default: throw ParameterError("table must be 1, 2 or 3");
    }
}

MonteCarloEstimate make_estimate(std::size_t step, std::size_t successes, std::size_t trials) {
    MonteCarloEstimate e;
    e.step = step;
    e.successes = successes;
    e.trials = trials;
    if (trials == 0) return e;
    const double n = static_cast<double>(trials);
    const double f = static_cast<double>(successes) / n;
    e.frequency = f;
    e.standard_error = std::sqrt(f * (1.0 - f) / n);
    constexpr double z = 1.959963984540054;
    const double denom = 1.0 + z * z / n;
    const double center = (f + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(f * (1.0 - f) / n + z * z / (4.0 * n * n)) / denom;
    e.wilson_low = std::max(0.0, center - half);
    e.wilson_high = std::min(1.0, center + half);
    return e;
}

std::vector<MonteCarloEstimate> monte_carlo_polarization_series(
    const McConfig& config, const PolarizationConstants& k, std::size_t ell,
    const std::vector<std::size_t>& checkpoints, std::size_t trials,
    const std::optional<McState>& initial, std::size_t jobs) {
    config.validate();
    require(trials >= 1, "need at least one trial");
    for (std::size_t c = 1; c < checkpoints.size(); ++c)
        require(checkpoints[c] > checkpoints[c - 1], "checkpoints must be strictly increasing");

    // hits[trial][checkpoint]
    std::vector<std::vector<char>> hits(trials, std::vector<char>(checkpoints.size(), 0));
    parallel_for(trials, jobs, [&](std::size_t trial) {
        Mt19937Source rng(derive_seed(config.seed, trial));
        McState state = initial ? *initial : mc_default_initial(config, rng);
        std::size_t step = 0;
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            for (; step < checkpoints[c]; ++step) mc_step(state, config, rng);
            hits[trial][c] = is_level_polarized(state, ell, k) ? 1 : 0;
        }
    });

    std::vector<MonteCarloEstimate> out;
    out.reserve(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        std::size_t successes = 0;
        for (const auto& h : hits) successes += static_cast<std::size_t>(h[c]);
        out.push_back(make_estimate(checkpoints[c], successes, trials));
    }
    return out;
}

MonteCarloEstimate monte_carlo_polarization(const McConfig& config, const PolarizationConstants& k,
                                            std::size_t ell, std::size_t horizon, std::size_t trials,
                                            const std::optional<McState>& initial, std::size_t jobs) {
    return monte_carlo_polarization_series(config, k, ell, {horizon}, trials, initial, jobs).front();
}

}  // namespace gmm_agora
