#include "gmm_agora/gmm_agora.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "gmm_agora/bounds.hpp"
#include "gmm_agora/commands.hpp"
#include "gmm_agora/config.hpp"
#include "gmm_agora/engine.hpp"
#include "gmm_agora/errors.hpp"
#include "gmm_agora/harness.hpp"
#include "gmm_agora/metrics.hpp"

struct gmm_config {
    gmm_agora::ConfigMap map;
};

struct gmm_simulation {
    gmm_agora::SimulationConfig config;
    gmm_agora::AgentStreams streams;
    gmm_agora::SystemState state;
};

namespace {

thread_local std::string last_error;

gmm_status fail(gmm_status status, const char* message) {
    last_error = message;
    return status;
}

// Runs body, translating exceptions into status codes.
template <typename Body>
gmm_status guarded(Body&& body) {
    try {
        body();
        last_error.clear();
        return GMM_OK;
    } catch (const gmm_agora::ParameterError& e) {
        return fail(GMM_ERR_CONFIG, e.what());
    } catch (const gmm_agora::NumericError& e) {
        return fail(GMM_ERR_NUMERIC, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(GMM_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(GMM_ERR_INTERNAL, "out of memory");
    } catch (const std::runtime_error& e) {
        return fail(GMM_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(GMM_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(GMM_ERR_INTERNAL, "unknown error");
    }
}

}  // namespace

extern "C" {

const char* gmm_version(void) { return GMM_AGORA_VERSION; }

const char* gmm_last_error(void) { return last_error.c_str(); }

gmm_config* gmm_config_new(void) { return new (std::nothrow) gmm_config{}; }

void gmm_config_free(gmm_config* config) { delete config; }

gmm_status gmm_config_set(gmm_config* config, const char* key, const char* value) {
    if (!config || !key || !value) return fail(GMM_ERR_INTERNAL, "null argument");
    return guarded([&] { config->map.set(key, value); });
}

gmm_status gmm_config_load_json(gmm_config* config, const char* path) {
    if (!config || !path) return fail(GMM_ERR_INTERNAL, "null argument");
    return guarded([&] { config->map.load_json_file(path); });
}

gmm_status gmm_run(const gmm_config* config) {
    if (!config) return fail(GMM_ERR_INTERNAL, "null config");
    return guarded([&] { gmm_agora::cmd_run(config->map); });
}

gmm_status gmm_mc(const gmm_config* config) {
    if (!config) return fail(GMM_ERR_INTERNAL, "null config");
    return guarded([&] { gmm_agora::cmd_mc(config->map); });
}

gmm_status gmm_experiment(const gmm_config* config, const char* name) {
    if (!config || !name) return fail(GMM_ERR_INTERNAL, "null argument");
    return guarded([&] { gmm_agora::cmd_experiment(name, config->map); });
}

gmm_status gmm_bounds(const gmm_config* config, char** csv) {
    if (!config || !csv) return fail(GMM_ERR_INTERNAL, "null argument");
    *csv = nullptr;
    return guarded([&] {
        const std::string text = gmm_agora::cmd_bounds(config->map);
        char* copy = new char[text.size() + 1];
        std::memcpy(copy, text.c_str(), text.size() + 1);
        *csv = copy;
    });
}

void gmm_string_free(char* text) { delete[] text; }

gmm_status gmm_simulation_new(const gmm_config* config, gmm_simulation** out) {
    if (!config || !out) return fail(GMM_ERR_INTERNAL, "null argument");
    *out = nullptr;
    return guarded([&] {
        config->map.reject_unknown(gmm_agora::run_keys(), "simulation");
        const auto spec = gmm_agora::resolve_experiment(gmm_agora::ExperimentId::run, config->map);
        auto sim_config = gmm_agora::materialize(spec);
        gmm_agora::AgentStreams streams(sim_config.seed, sim_config.replicate, sim_config.m);
        auto state = gmm_agora::initial_state(sim_config, streams);
        *out = new gmm_simulation{std::move(sim_config), std::move(streams), std::move(state)};
    });
}

void gmm_simulation_free(gmm_simulation* simulation) { delete simulation; }

gmm_status gmm_simulation_sweep(gmm_simulation* simulation) {
    if (!simulation) return fail(GMM_ERR_INTERNAL, "null simulation");
    return guarded([&] { gmm_agora::sweep(simulation->state, simulation->config, simulation->streams); });
}

size_t gmm_simulation_time(const gmm_simulation* simulation) { return simulation ? simulation->state.t : 0; }

size_t gmm_simulation_agents(const gmm_simulation* simulation) {
    return simulation ? simulation->state.agents.size() : 0;
}

size_t gmm_simulation_components(const gmm_simulation* simulation) { return simulation ? simulation->config.n : 0; }

gmm_status gmm_simulation_weights(const gmm_simulation* simulation, size_t agent, double* out, size_t count) {
    if (!simulation || !out) return fail(GMM_ERR_INTERNAL, "null argument");
    if (agent >= simulation->state.agents.size()) return fail(GMM_ERR_CONFIG, "agent index out of range");
    const auto& w = simulation->state.agents[agent].weights;
    if (count != w.size()) return fail(GMM_ERR_CONFIG, "buffer size must equal the component count");
    for (size_t j = 0; j < count; ++j) out[j] = w[j];
    last_error.clear();
    return GMM_OK;
}

gmm_status gmm_simulation_silos(const gmm_simulation* simulation, size_t* out, size_t count) {
    if (!simulation || !out) return fail(GMM_ERR_INTERNAL, "null argument");
    if (count != simulation->state.agents.size()) return fail(GMM_ERR_CONFIG, "buffer size must equal the agent count");
    for (size_t i = 0; i < count; ++i) out[i] = gmm_agora::silo(simulation->state.agents[i].weights);
    last_error.clear();
    return GMM_OK;
}

gmm_status gmm_h_sigma(double w, double x, double sigma, double* out) {
    if (!out) return fail(GMM_ERR_INTERNAL, "null argument");
    return guarded([&] { *out = gmm_agora::h_sigma(w, x, sigma); });
}

gmm_status gmm_theorem2_log_bounds(size_t m, double rho, double sigma, double c, size_t ell, double* log_part_i,
                                   double* log_part_ii) {
    if (!log_part_i || !log_part_ii) return fail(GMM_ERR_INTERNAL, "null argument");
    return guarded([&] {
        gmm_agora::BoundQuery query;
        query.m = m;
        query.rho = rho;
        query.sigma = sigma;
        query.c = c;
        query.ell = ell;
        const auto [part_i, part_ii] = gmm_agora::theorem2_bounds(query);
        *log_part_i = part_i.log_value;
        *log_part_ii = part_ii.defined ? part_ii.log_value : std::numeric_limits<double>::quiet_NaN();
    });
}

gmm_status gmm_theorem1_log_bound(size_t m, size_t r, double rho, double sigma, double* out) {
    if (!out) return fail(GMM_ERR_INTERNAL, "null argument");
    return guarded([&] { *out = gmm_agora::theorem1_log_bound(m, r, rho, sigma).log_value; });
}

}  // extern "C"
