#include "gmm_agora/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gmm_agora/bounds.hpp"
#include "gmm_agora/errors.hpp"
#include "gmm_agora/format.hpp"
#include "gmm_agora/markov_chain.hpp"
#include "gmm_agora/parallel.hpp"

namespace gmm_agora {

namespace {

using json = nlohmann::ordered_json;

// Flag name -> harness parameter for sweeps.
const std::vector<std::pair<std::string, std::string>>& sweep_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"sweep_p", "p"},           {"sweep_k", "k"},
        {"sweep_r", "r"},           {"sweep_T", "T"},
        {"sweep_eps", "epsilon"},   {"sweep_sigma", "sigma"},
        {"sweep_delta_mu", "delta_mu"}, {"sweep_ratio", "delta_mu_over_sigma"},
    };
    return keys;
}

const std::set<std::string> kSimulationKeys = {
    "n", "m", "p", "k", "r", "T", "sigma", "delta_mu", "ratio", "eps", "geometry", "variable_cov",
    "volume_constraint", "cov_reg", "mass_offset", "sweep_order", "seed", "out", "jobs", "replicates", "weights",
    "interactions"};

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::filesystem::path require_out(const ConfigMap& config) {
    const auto out = config.get_string("out", "");
    require(!out.empty(), "an output directory is required (--out)");
    return out;
}

std::string fmt(double v) { return shortest(v); }

}  // namespace

const std::set<std::string>& run_keys() { return kSimulationKeys; }

const std::set<std::string>& experiment_keys() {
    static const std::set<std::string> keys = [] {
        auto k = kSimulationKeys;
        k.insert("geometries");
        for (const auto& [flag, parameter] : sweep_keys()) k.insert(flag);
        return k;
    }();
    return keys;
}

const std::set<std::string>& mc_keys() {
    static const std::set<std::string> keys = {"m",    "r",     "sigma", "seed", "removal", "k",    "steps",
                                               "trials", "every", "init", "rho",  "ell",     "out",  "jobs"};
    return keys;
}

const std::set<std::string>& bounds_keys() {
    static const std::set<std::string> keys = {"table", "theorem", "c", "m", "rho", "sigma", "ell", "r", "out"};
    return keys;
}

ExperimentSpec resolve_experiment(ExperimentId id, const ConfigMap& config) {
    ExperimentSpec spec = default_experiment(id);
    auto& c = spec.base;

    spec.geometry.kind = parse_geometry(config.get_string("geometry", to_string(spec.geometry.kind)));
    spec.geometry.sigma = config.get_double("sigma", spec.geometry.sigma);
    require(spec.geometry.sigma > 0.0, "sigma must be positive");
    require(!(config.has("delta_mu") && config.has("ratio")), "give either delta_mu or ratio, not both");
    if (config.has("delta_mu")) spec.geometry.delta_mu = config.get_double("delta_mu", 1.0);
    if (config.has("ratio")) spec.geometry.delta_mu = config.get_double("ratio", 1.0) * spec.geometry.sigma;

    c.n = config.get_size("n", c.n);
    c.m = config.get_size("m", c.m);
    c.p = config.get_double("p", c.p);
    c.k = config.get_size("k", c.k);
    c.r = config.get_size("r", c.r);
    c.T = config.get_size("T", c.T);
    c.epsilon = config.get_double("eps", c.epsilon);
    c.variable_covariance = config.get_bool("variable_cov", c.variable_covariance);
    if (config.has("volume_constraint")) c.volume_constraint = config.get_double("volume_constraint", 1.0);
    c.covariance_regularization = config.get_double("cov_reg", c.covariance_regularization);
    c.mass_offset = config.get_double("mass_offset", c.mass_offset);
    const auto order = config.get_string("sweep_order", "fixed");
    require(order == "fixed" || order == "permuted", "sweep_order must be fixed or permuted");
    c.sweep_order = order == "fixed" ? SweepOrder::fixed : SweepOrder::permuted;
    c.seed = config.seed(c.seed);

    spec.replicates = config.get_size("replicates", spec.replicates);
    require(spec.replicates >= 1, "replicates must be at least 1");
    spec.jobs = config.get_size("jobs", spec.jobs);
    require(spec.jobs >= 1, "jobs must be at least 1");
    spec.output_dir = config.get_string("out", "");
    const bool single_run = id == ExperimentId::run;
    spec.write_weights = config.get_bool("weights", single_run || id == ExperimentId::fig2);
    spec.write_interactions = config.get_bool("interactions", single_run);

    for (const auto& [flag, parameter] : sweep_keys()) {
        if (!config.has(flag)) continue;
        const auto values = config.get_double_list(flag, {});
        bool replaced = false;
        for (auto& s : spec.sweeps) {
            if (s.parameter == parameter) {
                s.values = values;
                replaced = true;
            }
        }
        if (!replaced) spec.sweeps.push_back({parameter, values});
    }
    if (config.has("geometries")) {
        spec.geometries.clear();
        for (const auto& g : config.get_string_list("geometries", {})) spec.geometries.push_back(parse_geometry(g));
    }

    // Every combination of sweep values must produce a valid configuration before anything runs.
    // Swept fields override the base, so the base alone is only checked when nothing is swept.
    if (id == ExperimentId::fig7) require(!spec.geometries.empty(), "fig7 needs at least one geometry");
    {
        std::vector<ExperimentSpec> probes{spec};
        for (const auto& s : spec.sweeps) {
            std::vector<ExperimentSpec> next;
            for (const auto& probe : probes)
                for (const double v : s.values) {
                    next.push_back(probe);
                    apply_setting(next.back(), s.parameter, v);
                }
            probes = std::move(next);
        }
        for (const auto& probe : probes) materialize(probe);
    }
    return spec;
}

void cmd_run(const ConfigMap& config) {
    config.reject_unknown(run_keys(), "run");
    require_out(config);
    run_traces(resolve_experiment(ExperimentId::run, config));
}

void cmd_experiment(const std::string& name, const ConfigMap& config) {
    const ExperimentId id = parse_experiment(name);
    require(id != ExperimentId::run, "use the run command for a single configuration");
    config.reject_unknown(experiment_keys(), "experiment " + name);
    require_out(config);
    run_experiment(resolve_experiment(id, config));
}

void cmd_mc(const ConfigMap& config) {
    config.reject_unknown(mc_keys(), "mc");
    const auto out_dir = require_out(config);

    McConfig mc;
    mc.m = config.get_size("m", mc.m);
    mc.r = config.get_size("r", mc.r);
    mc.sigma = config.get_double("sigma", mc.sigma);
    mc.seed = config.seed(mc.seed);
    mc.k = config.get_size("k", mc.k);
    const auto removal = config.get_string("removal", "farthest");
    require(removal == "farthest" || removal == "nearest", "removal must be farthest or nearest");
    mc.removal = removal == "farthest" ? RemovalRule::farthest : RemovalRule::nearest;
    mc.validate();

    const auto steps = config.get_size("steps", 5000);
    const auto trials = config.get_size("trials", 1);
    const auto every = config.get_size("every", 1);
    const auto init = config.get_string("init", "default");
    const double rho = config.get_double("rho", 0.49);
    const auto ell = config.get_size("ell", 1);
    const auto jobs = config.get_size("jobs", default_jobs());
    require(trials >= 1, "trials must be at least 1");
    require(every >= 1, "every must be at least 1");
    require(ell >= 1, "ell must be at least 1");
    require(jobs >= 1, "jobs must be at least 1");
    require(init == "default" || init == "adversarial", "init must be default or adversarial");
    const auto pc = constants(rho, mc.sigma, mc.r);

    std::vector<std::size_t> checkpoints;
    for (std::size_t s = 0; s <= steps; s += every) checkpoints.push_back(s);
    if (checkpoints.back() != steps) checkpoints.push_back(steps);

    // Per trial: trace text and polarization hits at every checkpoint.
    std::vector<std::string> traces(trials);
    std::vector<std::vector<char>> hits(trials, std::vector<char>(checkpoints.size(), 0));
    parallel_for(trials, jobs, [&](std::size_t trial) {
        Mt19937Source rng(derive_seed(mc.seed, trial));
        McState state = init == "adversarial" ? mc_adversarial_initial(mc) : mc_default_initial(mc, rng);
        std::ostringstream text;
        std::size_t step = 0;
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            for (; step < checkpoints[c]; ++step) mc_step(state, mc, rng);
            hits[trial][c] = is_level_polarized(state, ell, pc) ? 1 : 0;
            for (std::size_t i = 0; i < state.agents.size(); ++i)
                text << trial << ',' << step << ',' << i << ',' << fmt(state.agents[i].weight()) << ','
                     << fmt(state.agents[i].logit) << '\n';
        }
        traces[trial] = text.str();
    });

    std::string trace = "trial,t,agent,weight,logit\n";
    for (const auto& t : traces) trace += t;
    std::ostringstream pol;
    pol << "t,polarized,trials,frequency,standard_error\n";
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        std::size_t successes = 0;
        for (const auto& h : hits) successes += static_cast<std::size_t>(h[c]);
        const auto est = make_estimate(checkpoints[c], successes, trials);
        pol << est.step << ',' << est.successes << ',' << est.trials << ',' << fmt(est.frequency) << ','
            << fmt(est.standard_error) << '\n';
    }

    json manifest;
    manifest["command"] = "mc";
    manifest["software_version"] = GMM_AGORA_VERSION;
    manifest["seed"] = mc.seed;
    manifest["config"] = {{"m", mc.m},         {"r", mc.r},         {"sigma", mc.sigma},
                          {"k", mc.k},         {"removal", removal}, {"steps", steps},
                          {"trials", trials},  {"every", every},    {"init", init},
                          {"rho", rho},        {"ell", ell}};
    json seeds = json::array();
    for (std::size_t trial = 0; trial < trials; ++trial) seeds.push_back(derive_seed(mc.seed, trial));
    manifest["trial_seeds"] = seeds;

    write_text(out_dir / "trace.csv", trace);
    write_text(out_dir / "polarization.csv", pol.str());
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string cmd_bounds(const ConfigMap& config) {
    config.reject_unknown(bounds_keys(), "bounds");
    const auto theorem = config.get_size("theorem", 2);
    require(theorem == 1 || theorem == 2, "theorem must be 1 or 2");
    std::string csv;

    if (theorem == 2) {
        require(!config.has("r"), "r applies only to theorem 1");
        TableLayout layout = published_table_layout(1);
        layout.c = 2.0;
        if (config.has("table")) {
            const auto table = config.get_size("table", 1);
            require(table >= 1 && table <= 3, "table must be 1, 2 or 3");
            layout = published_table_layout(static_cast<int>(table));
        }
        layout.c = config.get_double("c", layout.c);
        layout.m = config.get_size("m", layout.m);
        layout.rho = config.get_double("rho", layout.rho);
        layout.sigmas = config.get_double_list("sigma", layout.sigmas);
        if (config.has("ell")) {
            layout.ells.clear();
            for (const double v : config.get_double_list("ell", {})) {
                require(v >= 1.0 && std::floor(v) == v, "ell values must be positive integers");
                layout.ells.push_back(static_cast<std::size_t>(v));
            }
        }
        csv = bounds_csv(generate_tables(layout.c, layout.m, layout.rho, layout.sigmas, layout.ells));
    } else {
        require(!config.has("table") && !config.has("c") && !config.has("ell"),
                "table, c and ell apply only to theorem 2");
        const auto m = config.get_size("m", 3);
        const auto r = config.get_size("r", 2);
        const double rho = config.get_double("rho", 0.49);
        const auto sigmas = config.get_double_list("sigma", {0.1});
        std::ostringstream out;
        out << "m,r,rho,sigma,log_lemma_behave,log_lemma_pol,log_theorem1,theorem1\n";
        for (const double sigma : sigmas) {
            const auto behave = lemma_behave_log_bound(m, r, rho, sigma);
            const auto pol = lemma_pol_log_bound(m, r, rho, sigma);
            const auto total = theorem1_log_bound(m, r, rho, sigma);
            char value[64];
            std::snprintf(value, sizeof value, "%.6e", total.value);
            out << m << ',' << r << ',' << fmt(rho) << ',' << fmt(sigma) << ',' << fmt(behave.log_value) << ','
                << fmt(pol.log_value) << ',' << fmt(total.log_value) << ',' << value << '\n';
        }
        csv = out.str();
    }

    const auto out = config.get_string("out", "");
    if (!out.empty()) write_text(out, csv);
    return csv;
}

}  // namespace gmm_agora
