#include <doctest.h>

#include <cmath>

#include "gmm_agora/bounds.hpp"
#include "gmm_agora/errors.hpp"
#include "published_tables.hpp"

using namespace gmm_agora;

TEST_CASE("constants") {
    CHECK_THROWS_AS(constants(0.5, 0.1, 1), ParameterError);
    CHECK_THROWS_AS(constants(0.3, 0.0, 1), ParameterError);

    const auto k = constants(0.49, 0.5, 1);
    CHECK(std::abs(k.eta - 0.67291388134461530793) <= 1e-12);
    CHECK(constants(0.4999999999, 0.1, 1).log_C == doctest::Approx(100.0).epsilon(1e-8));
    CHECK(std::abs(constants(0.49, 0.5, 1).xi - std::erf(0.49 / 2.0 / (0.5 * std::sqrt(2.0)))) <= 1e-15);
}

TEST_CASE("published tables") {
    for (const auto& table : tables::published()) {
        for (const auto& row : table.rows) {
            for (std::size_t ell = 1; ell <= 5; ++ell) {
                BoundQuery q;
                q.c = table.c;
                q.m = 30;
                q.rho = 0.5;
                q.sigma = row.sigma;
                q.ell = ell;
                const auto [i, ii] = theorem2_bounds(q);
                const double value = table.part_ii ? ii.value : i.value;
                CAPTURE(table.id);
                CAPTURE(row.sigma);
                CAPTURE(ell);
                CHECK(tables::matches_six_figures(value, row.values[ell - 1]));
                if (table.id == 1) CHECK(tables::matches_six_figures(ii.value, row.values[ell - 1]));
            }
        }
    }
}

TEST_CASE("theorem 2 spot values and structure") {
    BoundQuery q;
    q.c = 10.0;
    q.sigma = 0.1;
    CHECK(std::abs(theorem2_bounds(q).first.value - 9.994152e-01) <= 1e-6);
    q.c = 2.0;
    q.sigma = 0.2;
    CHECK(std::abs(theorem2_bounds(q).first.value - 7.805784e-02) <= 1e-7);
    q.sigma = 0.05;
    CHECK(std::abs(theorem2_bounds(q).second.value - 9.666667e-01) <= 1e-6);

    SUBCASE("the horizon uses the natural logarithm") {
        q.sigma = 0.1;
        q.c = 10.0;
        const auto k = constants(0.4999999, 0.1, 1);
        const double s = 10.0 * 30.0 * std::log(30.0);
        CHECK(theorem2_bounds(q).first.log_value ==
              doctest::Approx(s * k.log_eta - s * std::exp(-k.log_C)).epsilon(1e-6));
        const double s10 = 10.0 * 30.0 * std::log10(30.0);
        CHECK_FALSE(tables::matches_six_figures(std::exp(s10 * k.log_eta - s10 * std::exp(-k.log_C)), 9.994152e-01));
    }

    SUBCASE("part ii is undefined for c <= 1") {
        q.c = 1.0;
        const auto [i, ii] = theorem2_bounds(q);
        CHECK(i.defined);
        CHECK_FALSE(ii.defined);
    }

    SUBCASE("monotone in ell and sigma") {
        for (double sigma : {0.05, 0.1, 0.2, 0.3, 0.4}) {
            double previous = -INFINITY;
            for (std::size_t ell = 1; ell <= 6; ++ell) {
                q.sigma = sigma;
                q.ell = ell;
                const double v = theorem2_bounds(q).first.log_value;
                CHECK(v >= previous);
                previous = v;
            }
        }
    }
}

TEST_CASE("theorem 1 components") {
    CHECK(std::abs(lemma_behave_log_bound(3, 1, 0.49, 0.1).log_value - -6.9225217343357946169) <= 1e-12 * 6.93);
    CHECK(std::abs(lemma_behave_log_bound(3, 2, 0.49, 0.1).log_value - -17.045665639414732461) <= 1e-12 * 17.1);
    CHECK(std::abs(lemma_pol_log_bound(3, 2, 0.49, 0.1).log_value - -20976.571767441493335) <= 1e-12 * 20977.0);
    const auto t1 = theorem1_log_bound(3, 2, 0.49, 0.1);
    CHECK(std::abs(t1.log_value - -20993.617433080908068) <= 1e-12 * 20994.0);
    CHECK(t1.value == 0.0);

    SUBCASE("multinomial factor") {
        // m = 2, r = 1: 12 steps in two blocks of 6 give 12!/(6!6!)/2^12 = 231/1024.
        const auto k = constants(0.49, 0.1, 1);
        const double per_step = std::log(0.5) + k.log_eta - (k.log_C + k.log_B + std::log1p(std::exp(-(k.log_C + k.log_B))));
        const double lp = lemma_pol_log_bound(2, 1, 0.49, 0.1).log_value;
        CHECK(lp - 12.0 * per_step == doctest::Approx(std::log(231.0 / 1024.0)).epsilon(1e-9));
    }

    SUBCASE("degenerate agent counts are vacuous") {
        CHECK(lemma_behave_log_bound(2, 1, 0.49, 0.1).vacuous);
        CHECK(lemma_behave_log_bound(1, 1, 0.49, 0.1).vacuous);
    }

    SUBCASE("large sigma drives the reset bound down") {
        double previous = lemma_behave_log_bound(4, 2, 0.4, 1.0).log_value;
        for (double sigma : {5.0, 50.0, 500.0, 5000.0}) {
            const double v = lemma_behave_log_bound(4, 2, 0.4, sigma).log_value;
            CHECK(v < previous);
            previous = v;
        }
        CHECK(previous < -40.0);
    }

    CHECK_THROWS_AS(theorem1_log_bound(3, 2, 0.5, 0.1), ParameterError);
}

TEST_CASE("table generation and CSV") {
    const auto layout = published_table_layout(2);
    const auto rows = generate_tables(layout.c, layout.m, layout.rho, layout.sigmas, layout.ells);
    CHECK(rows.size() == 25);
    const auto csv = bounds_csv(rows);
    CHECK(csv.rfind("sigma,ell,c,m,rho,bound_part_i,bound_part_ii,log_part_i,log_part_ii\n", 0) == 0);
    CHECK(csv.find("\n0.2,1,2,30,0.5,7.805784e-02,") != std::string::npos);
    CHECK_THROWS_AS(published_table_layout(4), ParameterError);
}

TEST_CASE("Monte Carlo estimates") {
    McConfig config;
    const auto k = constants(0.49, 0.1, config.r);

    McState polarized;
    polarized.agents = {{-300.0, {1.0, 1.0}}, {-300.0, {1.0, 1.0}}, {300.0, {-1.0, -1.0}}};
    CHECK(monte_carlo_polarization(config, k, 1, 0, 20, polarized).frequency == 1.0);
    CHECK(monte_carlo_polarization(config, k, 1, 0, 20, mc_adversarial_initial(config)).frequency == 0.0);

    const auto e = make_estimate(0, 30, 100);
    CHECK(e.standard_error == doctest::Approx(std::sqrt(0.3 * 0.7 / 100)));
    CHECK(e.wilson_low < 0.3);
    CHECK(e.wilson_high > 0.3);

    SUBCASE("theorem 1 domination over short prefixes") {
        const std::size_t window = (5 * config.r + 2) * config.m;
        const auto est = monte_carlo_polarization(config, k, 1, window, 20000, mc_adversarial_initial(config));
        CHECK(est.frequency >= theorem1_log_bound(config.m, config.r, 0.49, 0.1).value);
    }

    SUBCASE("theorem 2 domination with k-restricted communication") {
        McConfig big;
        big.m = 30;
        big.r = 2;
        big.sigma = 0.1;
        big.k = 5;
        big.seed = 3;
        const auto kk = constants(0.49, 0.1, big.r);
        for (std::size_t ell : {1u, 2u}) {
            // 15 agents on each side, so the smaller side exceeds k.
            McState start;
            for (std::size_t i = 0; i < big.m; ++i) {
                const bool low = i % 2 == 0;
                const double logit = (low ? -1.0 : 1.0) * (static_cast<double>(ell) + 0.5) * kk.log_C;
                const double centre = low ? 1.0 : -1.0;
                start.agents.push_back({logit, {centre + 0.05, centre - 0.1}});
            }
            REQUIRE(is_level_polarized(start, ell, kk));
            const double c = 2.0;
            const auto steps = static_cast<std::size_t>(std::ceil(c * 30.0 * std::log(30.0)));
            const auto est = monte_carlo_polarization(big, kk, ell, steps, 400, start);
            BoundQuery q;
            q.m = 30;
            q.rho = 0.49;
            q.sigma = 0.1;
            q.c = c;
            q.ell = ell;
            q.r = big.r;
            CHECK(est.frequency >= theorem2_bounds(q).first.value - 3.0 * est.standard_error);
        }
    }
}
