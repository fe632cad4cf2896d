// Command-line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmm_agora/gmm_agora.h"

namespace {

struct Flag {
    const char* name;  // without leading dashes
    const char* default_text;
    const char* help;
    bool is_switch = false;
};

const std::vector<Flag> kSimulationFlags = {
    {"n", "30", "number of mixture components"},
    {"m", "30", "number of agents"},
    {"p", "0.4", "mirroring probability"},
    {"k", "29", "neighbours considered when choosing a partner"},
    {"r", "5", "RAG capacity"},
    {"T", "100", "number of sweeps"},
    {"sigma", "0.3", "component standard deviation"},
    {"delta-mu", "1", "absolute separation of neighbouring means"},
    {"ratio", "none", "separation as a multiple of sigma (replaces --delta-mu)"},
    {"eps", "0.01", "initialization smoothing epsilon"},
    {"geometry", "linear", "mean layout: linear, circle or simplex"},
    {"variable-cov", "off", "update covariances as well as weights", true},
    {"volume-constraint", "none", "rescale every covariance to this determinant (needs --variable-cov)"},
    {"cov-reg", "1e-6", "diagonal loading after each covariance update"},
    {"mass-offset", "2.220446049250313e-15", "added to each component's responsibility mass per update (0: bare M-step)"},
    {"sweep-order", "fixed", "agent order within a sweep: fixed or permuted"},
    {"seed", "1 or $GMM_AGORA_SEED", "base random seed"},
    {"replicates", "1", "independent replicates"},
    {"weights", "true", "write weights.csv"},
    {"interactions", "true", "write interactions.csv"},
};

const std::vector<Flag> kSweepFlags = {
    {"sweep-p", "runner default", "comma-separated p values"},
    {"sweep-k", "runner default", "comma-separated k values"},
    {"sweep-r", "none", "comma-separated r values"},
    {"sweep-T", "none", "comma-separated T values"},
    {"sweep-eps", "none", "comma-separated epsilon values"},
    {"sweep-sigma", "none", "comma-separated sigma values"},
    {"sweep-delta-mu", "none", "comma-separated absolute separations"},
    {"sweep-ratio", "runner default", "comma-separated separations in sigma units"},
    {"geometries", "linear,circle,simplex", "geometries for fig7"},
};

const std::vector<Flag> kMcFlags = {
    {"m", "3", "number of agents"},
    {"r", "2", "RAG capacity"},
    {"sigma", "0.1", "component standard deviation"},
    {"seed", "1 or $GMM_AGORA_SEED", "base random seed"},
    {"removal", "farthest", "RAG point removed on arrival: farthest or nearest"},
    {"k", "0", "sender drawn from the k nearest agents (0: any agent)"},
    {"steps", "5000", "chain steps per trial"},
    {"trials", "1", "independent chains"},
    {"every", "1", "record the state every this many steps"},
    {"init", "default", "initial state: default or adversarial"},
    {"rho", "0.49", "polarization radius"},
    {"ell", "1", "polarization level reported"},
};

const std::vector<Flag> kBoundsFlags = {
    {"table", "none", "reproduce published table 1, 2 or 3"},
    {"theorem", "2", "2: stay/advance bounds, 1: uniform polarization bound"},
    {"c", "2 (table 1: 10)", "horizon multiplier c"},
    {"m", "30 (theorem 1: 3)", "number of agents"},
    {"rho", "0.5 (theorem 1: 0.49)", "polarization radius"},
    {"sigma", "0.4,0.3,0.2,0.1,0.05 (theorem 1: 0.1)", "comma-separated sigma values"},
    {"ell", "1,2,3,4,5", "comma-separated polarization levels"},
    {"r", "2", "RAG capacity (theorem 1)"},
};

struct Command {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> switches;
    std::string config_path;
};

void add_flags(Command& cmd, const std::vector<Flag>& flags) {
    for (const auto& f : flags) {
        const std::string option = std::string("--") + f.name;
        if (f.is_switch) {
            cmd.switches[f.name] = false;
            cmd.app->add_flag(option, cmd.switches[f.name], std::string(f.help) + " [default: " + f.default_text + "]");
        } else {
            cmd.values[f.name];
            cmd.app->add_option(option, cmd.values[f.name], f.help)->default_str(f.default_text);
        }
    }
}

void add_common(Command& cmd, bool needs_out, bool with_jobs) {
    cmd.values["out"];
    auto* out = cmd.app->add_option("--out", cmd.values["out"],
                                    needs_out ? "output directory" : "output file (default: standard output)");
    if (needs_out) out->required();
    if (with_jobs) {
        cmd.values["jobs"];
        cmd.app->add_option("--jobs", cmd.values["jobs"], "worker threads")->default_str("available cores");
    }
    cmd.app->add_option("--config", cmd.config_path, "JSON file of settings; flags override it");
}

// Config file first, then every flag given on the command line.
gmm_config* build_config(const Command& cmd) {
    gmm_config* config = gmm_config_new();
    if (!config) return nullptr;
    bool ok = true;
    if (!cmd.config_path.empty()) ok = gmm_config_load_json(config, cmd.config_path.c_str()) == GMM_OK;
    for (const auto& [name, value] : cmd.values) {
        if (!ok) break;
        if (cmd.app->count("--" + name) > 0) ok = gmm_config_set(config, name.c_str(), value.c_str()) == GMM_OK;
    }
    for (const auto& [name, on] : cmd.switches) {
        if (!ok) break;
        if (cmd.app->count("--" + name) > 0) ok = gmm_config_set(config, name.c_str(), on ? "true" : "false") == GMM_OK;
    }
    if (!ok) {
        gmm_config_free(config);
        return nullptr;
    }
    return config;
}

int report(gmm_status status) {
    if (status != GMM_OK) std::fprintf(stderr, "error: %s\n", gmm_last_error());
    return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interacting Gaussian-mixture agents: simulation, chain Monte Carlo and polarization bounds"};
    app.set_version_flag("--version", std::string(gmm_version()));
    app.require_subcommand(1);

    Command run, mc, bounds, experiment;
    run.app = app.add_subcommand("run", "simulate one configuration and write its traces");
    add_flags(run, kSimulationFlags);
    add_common(run, true, true);

    mc.app = app.add_subcommand("mc", "run the two-component chain and record weights and polarization");
    add_flags(mc, kMcFlags);
    add_common(mc, true, true);

    bounds.app = app.add_subcommand("bounds", "evaluate the polarization lower bounds as CSV");
    add_flags(bounds, kBoundsFlags);
    add_common(bounds, false, false);

    std::string experiment_name;
    experiment.app = app.add_subcommand("experiment", "run a replicated experiment");
    experiment.app->add_option("name", experiment_name, "fig2, fig4, fig5, fig6, fig7, appendixB or custom")
        ->required();
    add_flags(experiment, kSimulationFlags);
    add_flags(experiment, kSweepFlags);
    add_common(experiment, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return GMM_ERR_CONFIG;
    }

    Command* active = run.app->parsed()          ? &run
                      : mc.app->parsed()         ? &mc
                      : bounds.app->parsed()     ? &bounds
                                                 : &experiment;
    std::unique_ptr<gmm_config, decltype(&gmm_config_free)> config(build_config(*active), &gmm_config_free);
    if (!config) return report(GMM_ERR_CONFIG);

    if (active == &run) return report(gmm_run(config.get()));
    if (active == &mc) return report(gmm_mc(config.get()));
    if (active == &experiment) return report(gmm_experiment(config.get(), experiment_name.c_str()));

    char* csv = nullptr;
    const gmm_status status = gmm_bounds(config.get(), &csv);
    if (status == GMM_OK && active->values["out"].empty()) std::fputs(csv, stdout);
    gmm_string_free(csv);
    return report(status);
}
