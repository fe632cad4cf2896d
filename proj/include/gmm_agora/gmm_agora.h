#ifndef GMM_AGORA_H
#define GMM_AGORA_H

/*
 * C interface to the gmm_agora library. All objects are opaque handles owned
 * by the caller and released with the matching *_free function. Every call
 * that can fail returns a gmm_status; the message of the most recent failure
 * on the calling thread is available from gmm_last_error().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GMM_AGORA_BUILDING)
#    define GMM_API __declspec(dllexport)
#  else
#    define GMM_API __declspec(dllimport)
#  endif
#else
#  define GMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gmm_status {
    GMM_OK = 0,
    GMM_ERR_IO = 1,       /* file system failure */
    GMM_ERR_CONFIG = 2,   /* invalid, unknown or inconsistent settings */
    GMM_ERR_NUMERIC = 3,  /* numerical breakdown during a run */
    GMM_ERR_INTERNAL = 4  /* anything else, including a null handle */
} gmm_status;

typedef struct gmm_config gmm_config;
typedef struct gmm_simulation gmm_simulation;

GMM_API const char* gmm_version(void);
GMM_API const char* gmm_last_error(void);

/* Key/value settings. Keys use the command-line spelling ("delta-mu" and
 * "delta_mu" are the same key). Later values replace earlier ones. */
GMM_API gmm_config* gmm_config_new(void);
GMM_API void gmm_config_free(gmm_config* config);
GMM_API gmm_status gmm_config_set(gmm_config* config, const char* key, const char* value);
GMM_API gmm_status gmm_config_load_json(gmm_config* config, const char* path);

/* Commands. Each validates the whole configuration before writing anything. */
GMM_API gmm_status gmm_run(const gmm_config* config);
GMM_API gmm_status gmm_mc(const gmm_config* config);
GMM_API gmm_status gmm_experiment(const gmm_config* config, const char* name);
/* On success *csv holds a NUL-terminated string to release with gmm_string_free. */
GMM_API gmm_status gmm_bounds(const gmm_config* config, char** csv);
GMM_API void gmm_string_free(char* text);

/* Step-by-step interacting-agent simulation built from a run configuration. */
GMM_API gmm_status gmm_simulation_new(const gmm_config* config, gmm_simulation** out);
GMM_API void gmm_simulation_free(gmm_simulation* simulation);
GMM_API gmm_status gmm_simulation_sweep(gmm_simulation* simulation);
GMM_API size_t gmm_simulation_time(const gmm_simulation* simulation);
GMM_API size_t gmm_simulation_agents(const gmm_simulation* simulation);
GMM_API size_t gmm_simulation_components(const gmm_simulation* simulation);
/* Copies agent's weights into out[0..count); count must equal the component count. */
GMM_API gmm_status gmm_simulation_weights(const gmm_simulation* simulation, size_t agent, double* out,
                                          size_t count);
GMM_API gmm_status gmm_simulation_silos(const gmm_simulation* simulation, size_t* out, size_t count);

/* Scalar helpers. */
GMM_API gmm_status gmm_h_sigma(double w, double x, double sigma, double* out);
GMM_API gmm_status gmm_theorem2_log_bounds(size_t m, double rho, double sigma, double c, size_t ell,
                                           double* log_part_i, double* log_part_ii);
GMM_API gmm_status gmm_theorem1_log_bound(size_t m, size_t r, double rho, double sigma, double* out);

#ifdef __cplusplus
}
#endif

#endif /* GMM_AGORA_H */
