#include "gmm_agora/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "gmm_agora/errors.hpp"

namespace gmm_agora {

namespace {

bool inside(double x, double center, double half_width) {
    return std::abs(x - center) < half_width;
}

}  // namespace

std::size_t silo(const Vector& weights) {
    require(weights.size() > 0, "silo of an empty weight vector");
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < weights.size(); ++j)
        if (weights[j] > weights[best]) best = j;
    return static_cast<std::size_t>(best);
}

std::vector<std::size_t> silos(const std::vector<Vector>& weights) {
    std::vector<std::size_t> out;
    out.reserve(weights.size());
    for (const auto& w : weights) out.push_back(silo(w));
    return out;
}

double stability(const std::vector<std::size_t>& previous, const std::vector<std::size_t>& current) {
    require(previous.size() == current.size(), "stability needs equal-length label sequences");
    require(!current.empty(), "stability of an empty system");
    std::size_t changed = 0;
    for (std::size_t i = 0; i < current.size(); ++i) changed += previous[i] != current[i];
    return static_cast<double>(changed) / static_cast<double>(current.size());
}

std::size_t silo_count(const std::vector<std::size_t>& labels) {
    require(!labels.empty(), "silo count of an empty system");
    return std::unordered_set<std::size_t>(labels.begin(), labels.end()).size();
}

SiloSystem classify_silo_system(const SiloTrace& trace, std::size_t t0, std::size_t length) {
    require(t0 + length < trace.size(), "classification window extends past the trace");
    const std::size_t count = silo_count(trace[t0]);
    bool changed = false;
    for (std::size_t t = t0 + 1; t <= t0 + length; ++t) {
        if (silo_count(trace[t]) != count) return SiloSystem::neither;
        if (trace[t] != trace[t - 1]) changed = true;
    }
    return changed ? SiloSystem::unstable : SiloSystem::stable;
}

std::optional<std::size_t> convergence_time(const SiloTrace& trace) {
    require(!trace.empty(), "convergence time of an empty trace");
    std::size_t t = trace.size() - 1;
    if (silo_count(trace[t]) != 1) return std::nullopt;
    while (t > 0 && silo_count(trace[t - 1]) == 1) --t;
    return t;
}

std::pair<double, double> interval_I_logit(std::size_t ell, const PolarizationConstants& constants) {
    require(ell >= 1, "polarization level must be at least 1");
    const double edge = static_cast<double>(ell) * constants.log_C;
    return {-edge, edge};
}

std::pair<double, double> interval_I(std::size_t ell, const PolarizationConstants& constants) {
    const auto [lo, hi] = interval_I_logit(ell, constants);
    return {weight_of_logit(lo), weight_of_logit(hi)};
}

bool is_level_polarized(const McState& state, std::size_t ell, const PolarizationConstants& constants) {
    const auto [lo, hi] = interval_I_logit(ell, constants);
    const double rho = constants.rho;
    for (const auto& agent : state.agents) {
        double center = 0.0;
        if (agent.logit <= lo) {
            center = 1.0;  // weight on N(-1) below the interval: RAG must sit at +1
        } else if (agent.logit >= hi) {
            center = -1.0;
        } else {
            return false;
        }
        for (const double x : agent.rag)
            if (!inside(x, center, rho)) return false;
    }
    return true;
}

bool well_behaved(const McState& state, double rho) {
    for (const auto& agent : state.agents)
        for (const double x : agent.rag)
            if (!inside(x, 1.0, rho) && !inside(x, -1.0, rho)) return false;
    return true;
}

}  // namespace gmm_agora
