#pragma once

// Randomized property checks shared by the unit tests (small counts) and the
// acceptance binary (full counts). Each returns a violation count or an error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gmm_agora/bounds.hpp"
#include "gmm_agora/markov_chain.hpp"
#include "gmm_agora/metrics.hpp"
#include "gmm_agora/mixture.hpp"

namespace properties {

using gmm_agora::Mt19937Source;

// Uniform on the open interval (lo, hi).
inline double open_uniform(Mt19937Source& rng, double lo, double hi) {
    double u = 0.0;
    while (u == 0.0) u = rng.uniform();
    return lo + (hi - lo) * u;
}

// A point in (c - half, c + half) with c = +1 or -1 chosen at random.
inline double compliant_point(Mt19937Source& rng, double half) {
    const double c = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return open_uniform(rng, c - half, c + half);
}

inline gmm_agora::McState single_agent(double logit, std::vector<double> rag) {
    gmm_agora::McState state;
    state.agents.push_back({logit, std::move(rag)});
    return state;
}

inline gmm_agora::McConfig chain_config(std::size_t r, double sigma) {
    gmm_agora::McConfig config;
    config.m = 1;
    config.r = r;
    config.sigma = sigma;
    return config;
}

// One update in (+-1 +- rho) from w in I_1 with a compliant RAG lands in
// (1/(1+CB), 1/(1+(CB)^-1)); in log-odds, |logit| < ln C + ln B.
inline std::size_t one_step_violations(double rho, double sigma, std::size_t r, std::size_t instances,
                                       std::uint64_t seed) {
    const auto k = gmm_agora::constants(rho, sigma, r);
    const auto config = chain_config(r, sigma);
    const double limit = k.log_C + k.log_B;
    Mt19937Source rng(seed);
    std::size_t violations = 0;
    for (std::size_t n = 0; n < instances; ++n) {
        std::vector<double> rag(r);
        for (auto& x : rag) x = compliant_point(rng, rho);
        auto state = single_agent(open_uniform(rng, -k.log_C, k.log_C), rag);
        gmm_agora::mc_apply(state, 0, 0, compliant_point(rng, rho), config);
        const double l = state.agents[0].logit;
        if (!(l > -limit && l < limit)) ++violations;
    }
    return violations;
}

// Exactly r arrivals in s +- rho/(2r) leave every RAG point in s +- rho, from
// any starting weight and RAG.
inline std::size_t behave_violations(double rho, double sigma, std::size_t r, std::size_t instances,
                                     std::uint64_t seed) {
    const auto config = chain_config(r, sigma);
    Mt19937Source rng(seed);
    std::size_t violations = 0;
    for (std::size_t n = 0; n < instances; ++n) {
        std::vector<double> rag(r);
        for (auto& x : rag) {
            const double u = rng.uniform();
            if (u < 0.25)
                x = open_uniform(rng, -10.0, 10.0);
            else if (u < 0.5)
                x = compliant_point(rng, 1.5 * rho);
            else if (u < 0.75)
                x = (rng.uniform() < 0.5 ? -1.0 : 1.0) * open_uniform(rng, 50.0, 1e4);
            else
                x = compliant_point(rng, rho);
        }
        auto state = single_agent(open_uniform(rng, -60.0, 60.0), rag);
        const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double half = rho / (2.0 * static_cast<double>(r));
        for (std::size_t u = 0; u < r; ++u)
            gmm_agora::mc_apply(state, 0, 0, open_uniform(rng, side - half, side + half), config);
        for (double x : state.agents[0].rag)
            if (!(std::abs(x - side) < rho)) {
                ++violations;
                break;
            }
    }
    return violations;
}

// 4r + 2 arrivals in 1 +- rho from w in I_1 with a compliant RAG push the
// weight to at most 1/(1+C) (logit <= -ln C); the mirrored case to logit >= ln C.
inline std::size_t many_step_violations(double rho, double sigma, std::size_t r, std::size_t instances,
                                        std::uint64_t seed) {
    const auto k = gmm_agora::constants(rho, sigma, r);
    const auto config = chain_config(r, sigma);
    Mt19937Source rng(seed);
    std::size_t violations = 0;
    for (std::size_t n = 0; n < instances; ++n) {
        std::vector<double> rag(r);
        for (auto& x : rag) x = compliant_point(rng, rho);
        auto state = single_agent(open_uniform(rng, -k.log_C, k.log_C), rag);
        const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (std::size_t u = 0; u < 4 * r + 2; ++u)
            gmm_agora::mc_apply(state, 0, 0, open_uniform(rng, side - rho, side + rho), config);
        const double l = state.agents[0].logit;
        const bool ok = side > 0.0 ? l <= -k.log_C : l >= k.log_C;
        if (!ok) ++violations;
    }
    return violations;
}

struct EquivalenceError {
    double update_vs_h = 0.0;
    double g_vs_h = 0.0;
};

// 1-d, means -1 and +1: the weight M-step against (1/r) sum h_sigma, and
// g_{0,sigma} against h_sigma.
inline EquivalenceError em_equivalence(std::size_t instances, std::uint64_t seed) {
    using gmm_agora::Vector;
    Mt19937Source rng(seed);
    EquivalenceError worst;
    for (std::size_t n = 0; n < instances; ++n) {
        const double sigma = open_uniform(rng, 0.05, 2.0);
        const double w = open_uniform(rng, 0.0, 1.0);
        const std::size_t r = 1 + rng.index_below(10);
        const auto params = gmm_agora::MixtureParams::isotropic({Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                                                sigma);
        Vector wv(2);
        wv << w, 1.0 - w;
        const gmm_agora::WeightVector weights(wv);
        std::vector<Vector> points;
        double mean_h = 0.0;
        for (std::size_t h = 0; h < r; ++h) {
            const double x = rng.uniform() < 0.5 ? compliant_point(rng, 1.0) + sigma * rng.standard_normal()
                                                 : open_uniform(rng, -4.0, 4.0);
            points.push_back(Vector::Constant(1, x));
            const double hx = gmm_agora::h_sigma(w, x, sigma);
            mean_h += hx;
            const double g = gmm_agora::g_j_sigma(weights, points.back(), params, 0);
            worst.g_vs_h = std::max(worst.g_vs_h, std::abs(g - hx));
        }
        mean_h /= static_cast<double>(r);
        const auto updated = gmm_agora::update_weights(gmm_agora::RagSet(points), params, weights);
        worst.update_vs_h = std::max(worst.update_vs_h, std::abs(updated[0] - mean_h));
    }
    return worst;
}

// Means are distinct sign vectors in {-1, 1}^d; every RAG point lies in a ball
// of radius b <= 1/2 about mean j. Both g_j and the updated weight j must sit
// between w_j / (w_j + S e^{(2b-2)/sigma^2}) and w_j / (w_j + S e^{-(2+b)^2/(2 sigma^2)}),
// S the prior mass off component j.
struct BallViolations {
    std::size_t lower = 0;
    std::size_t upper = 0;
    // Upper side with (2 + b) replaced by (D + b), D the largest distance from mu_j to another mean.
    std::size_t upper_far_means = 0;
};

// Means are distinct sign vectors. With adjacent_only every other mean differs from mu_j in one coordinate.
inline BallViolations ball_bound_violations(std::size_t d, std::size_t instances, std::uint64_t seed,
                                            bool adjacent_only = false) {
    using gmm_agora::Vector;
    Mt19937Source rng(seed);
    BallViolations out;
    const double slack = 1e-12;
    for (std::size_t n = 0; n < instances; ++n) {
        std::size_t max_components = d >= 3 ? 8 : (std::size_t{1} << d);
        if (adjacent_only) max_components = std::min(max_components, d + 1);
        const std::size_t count = 2 + rng.index_below(max_components - 1);
        std::vector<int> centre(d);
        for (auto& s : centre) s = rng.uniform() < 0.5 ? -1 : 1;
        std::set<std::vector<int>> used{centre};
        std::vector<std::vector<int>> signs{centre};
        while (signs.size() < count) {
            std::vector<int> v = centre;
            if (adjacent_only) {
                v[rng.index_below(d)] *= -1;
            } else {
                for (auto& s : v) s = rng.uniform() < 0.5 ? -1 : 1;
            }
            if (used.insert(v).second) signs.push_back(v);
        }
        const std::size_t j = rng.index_below(count);
        std::swap(signs[0], signs[j]);
        std::vector<Vector> means;
        for (const auto& v : signs) {
            Vector mu(static_cast<Eigen::Index>(d));
            for (std::size_t c = 0; c < d; ++c) mu[static_cast<Eigen::Index>(c)] = v[c];
            means.push_back(mu);
        }
        double far = 0.0;
        for (std::size_t h = 0; h < count; ++h)
            if (h != j) far = std::max(far, (means[h] - means[j]).norm());

        const double sigma = open_uniform(rng, 0.3, 2.0);
        const auto params = gmm_agora::MixtureParams::isotropic(means, sigma);
        Vector w(static_cast<Eigen::Index>(count));
        for (Eigen::Index c = 0; c < w.size(); ++c) w[c] = open_uniform(rng, 0.01, 1.0);
        w /= w.sum();
        const gmm_agora::WeightVector weights(w);
        const double wj = w[static_cast<Eigen::Index>(j)];
        const double rest = 1.0 - wj;
        const double b = open_uniform(rng, 0.0, 0.5);
        const double s2 = sigma * sigma;
        const double lower = 1.0 / (1.0 + rest / wj * std::exp((2.0 * b - 2.0) / s2));
        const double upper = 1.0 / (1.0 + rest / wj * std::exp(-(2.0 + b) * (2.0 + b) / (2.0 * s2)));
        const double upper_far = 1.0 / (1.0 + rest / wj * std::exp(-(far + b) * (far + b) / (2.0 * s2)));

        const std::size_t r = 1 + rng.index_below(5);
        std::vector<Vector> rag;
        std::vector<double> values;
        for (std::size_t h = 0; h < r; ++h) {
            Vector dir(static_cast<Eigen::Index>(d));
            for (Eigen::Index c = 0; c < dir.size(); ++c) dir[c] = rng.standard_normal();
            const double radius = b * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
            rag.push_back(means[j] + radius * dir / dir.norm());
            values.push_back(gmm_agora::g_j_sigma(weights, rag.back(), params, j));
        }
        values.push_back(gmm_agora::update_weights(gmm_agora::RagSet(rag), params, weights)[j]);
        bool below = false, above = false, above_far = false;
        for (double v : values) {
            below = below || v < lower * (1.0 - slack);
            above = above || v > upper * (1.0 + slack);
            above_far = above_far || v > upper_far * (1.0 + slack);
        }
        out.lower += below;
        out.upper += above;
        out.upper_far_means += above_far;
    }
    return out;
}

}  // namespace properties
