#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include <json.hpp>

#include "gmm_agora/commands.hpp"
#include "gmm_agora/config.hpp"
#include "gmm_agora/errors.hpp"
#include "gmm_agora/harness.hpp"
#include "support.hpp"

using namespace gmm_agora;
namespace fs = std::filesystem;

namespace {

std::size_t line_count(const fs::path& path) {
    const auto text = testing::read_file(path);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

ConfigMap small_run(const fs::path& out) {
    ConfigMap c;
    c.set("n", "4");
    c.set("m", "5");
    c.set("k", "2");
    c.set("r", "3");
    c.set("T", "6");
    c.set("seed", "7");
    c.set("jobs", "1");
    c.set("out", out.string());
    return c;
}

}  // namespace

TEST_CASE("mean geometries") {
    const auto linear = mean_geometry(GeometryKind::linear, 3, 1.0, 0.3);
    CHECK(linear.dimension() == 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(linear.mean(i)[0] == doctest::Approx(static_cast<double>(i + 1)));
    CHECK(linear.covariance(0)(0, 0) == doctest::Approx(0.09));

    const auto circle = mean_geometry(GeometryKind::circle, 6, 0.5, 0.2);
    CHECK(circle.dimension() == 2);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK((circle.mean(i) - circle.mean((i + 1) % 6)).norm() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(circle.mean(i).norm() == doctest::Approx(0.5 / (2.0 * std::sin(std::numbers::pi / 6))));
    }

    const auto simplex = mean_geometry(GeometryKind::simplex, 5, 2.0, 0.3);
    CHECK(simplex.dimension() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j)
            CHECK((simplex.mean(i) - simplex.mean(j)).norm() == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(mean_geometry(GeometryKind::linear, 1, 1.0, 0.3), ParameterError);
    CHECK_THROWS_AS(mean_geometry(GeometryKind::circle, 4, 0.0, 0.3), ParameterError);
}

TEST_CASE("names and grids") {
    CHECK(parse_geometry("circle") == GeometryKind::circle);
    CHECK(parse_experiment("appendixB") == ExperimentId::appendixB);
    CHECK(to_string(ExperimentId::fig7) == "fig7");
    CHECK_THROWS_AS(parse_geometry("torus"), ParameterError);
    CHECK_THROWS_AS(parse_experiment("fig3"), ParameterError);

    const auto linear = separation_grid(GeometryKind::linear);
    CHECK(linear.front() == 0.75);
    CHECK(linear.back() == 5.0);
    CHECK(linear.size() == 18);
    CHECK(separation_grid(GeometryKind::circle).front() == 0.5);
    CHECK(separation_grid(GeometryKind::simplex).back() == 6.0);
}

TEST_CASE("experiment defaults and settings") {
    const auto fig6 = default_experiment(ExperimentId::fig6);
    CHECK(fig6.base.p == 0.2);
    CHECK(fig6.base.r == 10);
    CHECK(fig6.base.T == 200);

    auto spec = default_experiment(ExperimentId::custom);
    apply_setting(spec, "sigma", 0.2);
    apply_setting(spec, "delta_mu_over_sigma", 3.0);
    CHECK(spec.geometry.delta_mu == doctest::Approx(0.6));
    apply_setting(spec, "k", 4);
    CHECK(spec.base.k == 4);
    CHECK_THROWS_AS(apply_setting(spec, "k", 2.5), ParameterError);
    CHECK_THROWS_AS(apply_setting(spec, "zeta", 1.0), ParameterError);

    const auto config = materialize(spec);
    CHECK(config.params.mean(1)[0] == doctest::Approx(1.2));
    apply_setting(spec, "k", 30);
    CHECK_THROWS_AS(materialize(spec), ParameterError);
}

TEST_CASE("mean and standard error") {
    const auto [mean, se] = mean_and_standard_error({1.0, 2.0, 3.0, 4.0});
    CHECK(mean == 2.5);
    CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(mean_and_standard_error({7.0}).second == 0.0);
}

TEST_CASE("replicates are independent of the worker count") {
    auto spec = default_experiment(ExperimentId::custom);
    spec.base.n = 4;
    spec.base.m = 6;
    spec.base.k = 2;
    spec.base.T = 8;
    spec.geometry.delta_mu = 1.0;
    const auto config = materialize(spec);
    const auto one = run_replicates(config, 4, 1, true);
    const auto three = run_replicates(config, 4, 3, true);
    REQUIRE(one.size() == 4);
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(one[r].seed == three[r].seed);
        CHECK(one[r].silos == three[r].silos);
        CHECK(one[r].weights == three[r].weights);
    }
    CHECK(one[0].silos != one[1].silos);
}

TEST_CASE("configuration map") {
    ConfigMap c;
    c.set("--delta-mu", "0.5");
    CHECK(c.has("delta_mu"));
    CHECK(c.get_double("delta_mu", 1.0) == 0.5);
    c.set("k", "abc");
    CHECK_THROWS_AS(c.get_size("k", 1), ParameterError);
    c.set("k", "-3");
    CHECK_THROWS_AS(c.get_size("k", 1), ParameterError);
    c.set("flag", "yes");
    CHECK(c.get_bool("flag", false));
    c.set("flag", "maybe");
    CHECK_THROWS_AS(c.get_bool("flag", false), ParameterError);
    c.set("p", "nan");
    CHECK_THROWS_AS(c.get_double("p", 0.0), ParameterError);

    c.load_json_text(R"({"sweep-p": [0, 0.5], "sigma": 0.2, "variable_cov": true, "delta_mu": null})");
    CHECK(c.get_double_list("sweep_p", {}) == std::vector<double>{0.0, 0.5});
    CHECK(c.get_bool("variable_cov", false));
    CHECK_FALSE(c.has("delta_mu"));
    CHECK_THROWS_AS(c.load_json_text("[1, 2]"), ParameterError);
    CHECK_THROWS_AS(c.load_json_text("{"), ParameterError);

    CHECK_THROWS_AS(c.reject_unknown({"sigma"}, "run"), ParameterError);

    ConfigMap seeded;
    ::setenv("GMM_AGORA_SEED", "99", 1);
    CHECK(seeded.seed(1) == 99);
    seeded.set("seed", "5");
    CHECK(seeded.seed(1) == 5);
    ::unsetenv("GMM_AGORA_SEED");
    CHECK(ConfigMap{}.seed(3) == 3);
}

TEST_CASE("resolving experiment settings") {
    ConfigMap c;
    c.set("sweep_k", "1,29");
    c.set("ratio", "2");
    c.set("sigma", "0.25");
    const auto spec = resolve_experiment(ExperimentId::fig4, c);
    CHECK(spec.geometry.delta_mu == doctest::Approx(0.5));
    REQUIRE(spec.sweeps.size() == 1);
    CHECK(spec.sweeps[0].parameter == "k");
    CHECK(spec.sweeps[0].values == std::vector<double>{1.0, 29.0});

    ConfigMap both;
    both.set("ratio", "2");
    both.set("delta_mu", "1");
    CHECK_THROWS_AS(resolve_experiment(ExperimentId::run, both), ParameterError);

    ConfigMap bad_sweep;
    bad_sweep.set("sweep_k", "5,30");
    CHECK_THROWS_AS(resolve_experiment(ExperimentId::fig4, bad_sweep), ParameterError);
}

TEST_CASE("run command output") {
    testing::TempDir dir("run_cmd");
    const auto out = dir.path() / "a";
    cmd_run(small_run(out));
    for (const char* name : {"silos.csv", "weights.csv", "stability.csv", "silo_counts.csv", "interactions.csv",
                             "manifest.json"})
        CHECK(fs::exists(out / name));

    CHECK(line_count(out / "silos.csv") == 1 + 7 * 5);
    CHECK(line_count(out / "weights.csv") == 1 + 7 * 5 * 4);
    CHECK(line_count(out / "stability.csv") == 1 + 6);
    CHECK(line_count(out / "interactions.csv") == 1 + 6 * 5);
    CHECK(testing::read_file(out / "silos.csv").rfind("replicate,t,agent,silo\n", 0) == 0);

    const auto manifest = nlohmann::json::parse(testing::read_file(out / "manifest.json"));
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["config"]["n"] == 4);
    CHECK(manifest["config"]["k"] == 2);

    const auto again = dir.path() / "b";
    cmd_run(small_run(again));
    for (const char* name : {"silos.csv", "weights.csv", "stability.csv", "silo_counts.csv", "interactions.csv",
                             "manifest.json"})
        CHECK(testing::read_file(out / name) == testing::read_file(again / name));
}

TEST_CASE("invalid commands write nothing") {
    testing::TempDir dir("invalid_cmd");
    const auto out = dir.path() / "x";

    auto c = small_run(out);
    c.set("k", "5");
    CHECK_THROWS_AS(cmd_run(c), ParameterError);
    CHECK_FALSE(fs::exists(out));

    auto v = small_run(out);
    v.set("volume_constraint", "0.1");
    CHECK_THROWS_AS(cmd_run(v), ParameterError);
    CHECK_FALSE(fs::exists(out));

    auto unknown = small_run(out);
    unknown.set("zeta", "1");
    CHECK_THROWS_AS(cmd_run(unknown), ParameterError);

    ConfigMap missing;
    CHECK_THROWS_AS(cmd_run(missing), ParameterError);
    CHECK_THROWS_AS(cmd_experiment("run", small_run(out)), ParameterError);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("bounds command") {
    ConfigMap t1;
    t1.set("table", "1");
    const auto csv = cmd_bounds(t1);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
    CHECK(csv.find("\n0.1,1,10,30,0.5,9.994152e-01,") != std::string::npos);

    ConfigMap theorem1;
    theorem1.set("theorem", "1");
    const auto t1csv = cmd_bounds(theorem1);
    CHECK(t1csv.rfind("m,r,rho,sigma,log_lemma_behave,log_lemma_pol,log_theorem1,theorem1\n", 0) == 0);

    ConfigMap conflicting;
    conflicting.set("theorem", "1");
    conflicting.set("table", "2");
    CHECK_THROWS_AS(cmd_bounds(conflicting), ParameterError);
}

TEST_CASE("chain command output") {
    testing::TempDir dir("mc_cmd");
    ConfigMap c;
    c.set("steps", "40");
    c.set("trials", "3");
    c.set("every", "10");
    c.set("init", "adversarial");
    c.set("jobs", "2");
    c.set("out", (dir.path() / "a").string());
    cmd_mc(c);
    CHECK(line_count(dir.path() / "a" / "trace.csv") == 1 + 3 * 5 * 3);
    CHECK(line_count(dir.path() / "a" / "polarization.csv") == 1 + 5);
    c.set("jobs", "1");
    c.set("out", (dir.path() / "b").string());
    cmd_mc(c);
    for (const char* name : {"trace.csv", "polarization.csv"})
        CHECK(testing::read_file(dir.path() / "a" / name) == testing::read_file(dir.path() / "b" / name));
}

TEST_CASE("experiment runners write their summaries") {
    testing::TempDir dir("experiments");
    auto base = [&](const std::string& sub) {
        ConfigMap c;
        c.set("n", "4");
        c.set("m", "4");
        c.set("k", "3");
        c.set("r", "2");
        c.set("T", "5");
        c.set("replicates", "2");
        c.set("out", (dir.path() / sub).string());
        return c;
    };

    auto fig4 = base("fig4");
    fig4.set("sweep_k", "1,3");
    cmd_experiment("fig4", fig4);
    CHECK(line_count(dir.path() / "fig4" / "silos_vs_k.csv") == 3);

    auto fig5 = base("fig5");
    fig5.set("sweep_p", "0,0.5");
    fig5.set("sweep_k", "1,2");
    cmd_experiment("fig5", fig5);
    CHECK(line_count(dir.path() / "fig5" / "cells.csv") == 5);
    CHECK(fs::exists(dir.path() / "fig5" / "p0.5_k2" / "silos.csv"));

    auto fig6 = base("fig6");
    cmd_experiment("fig6", fig6);
    CHECK(line_count(dir.path() / "fig6" / "collapse.csv") == 3);

    auto fig7 = base("fig7");
    fig7.set("sweep_ratio", "1,2");
    fig7.set("geometries", "linear,circle");
    cmd_experiment("fig7", fig7);
    CHECK(line_count(dir.path() / "fig7" / "tstar_summary.csv") == 5);
    CHECK(line_count(dir.path() / "fig7" / "tstar.csv") == 1 + 2 * 2 * 2);

    auto appb = base("appendixB");
    appb.set("variable_cov", "true");
    appb.set("volume_constraint", "0.09");
    cmd_experiment("appendixB", appb);
    CHECK(fs::exists(dir.path() / "appendixB" / "maxstd.csv"));
    CHECK(fs::exists(dir.path() / "appendixB" / "volume.csv"));

    auto custom = base("custom");
    custom.set("sweep_r", "1,2");
    cmd_experiment("custom", custom);
    CHECK(line_count(dir.path() / "custom" / "cells.csv") == 3);
}
