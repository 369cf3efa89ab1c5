/* C interface to the star-graph biharmonic Schrodinger control library.
 *
 * All functions return an sg_status. On failure, sg_last_error() gives a message for the
 * calling thread. Handles are opaque and must be released with the matching *_destroy.
 *
 * Functions producing JSON write a NUL-terminated string into (buf, cap). If buf is NULL or
 * cap is too small they return SG_ERR_BUFFER_TOO_SMALL; *needed (if non-NULL) always
 * receives the required size including the terminator.
 */
#ifndef SGHUM_H
#define SGHUM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SGHUM_BUILDING)
#    define SG_API __declspec(dllexport)
#  else
#    define SG_API __declspec(dllimport)
#  endif
#else
#  define SG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_INVALID_ARGUMENT = 1,
  SG_ERR_INVALID_CONFIG = 2,
  SG_ERR_DOMAIN = 3,
  SG_ERR_NOT_CONVERGED = 4,
  SG_ERR_IO = 5,
  SG_ERR_BUFFER_TOO_SMALL = 6,
  SG_ERR_INTERNAL = 7
} sg_status;

typedef struct sg_complex {
  double re;
  double im;
} sg_complex;

typedef struct sg_graph sg_graph;           /* edge lengths and coupling weights */
typedef struct sg_model sg_model;           /* discretized graph with cached solvers */
typedef struct sg_trajectory sg_trajectory; /* homogeneous forward trajectory */
typedef struct sg_hum_result sg_hum_result; /* synthesized controls and diagnostics */

SG_API const char* sg_version(void);
SG_API const char* sg_last_error(void);
SG_API const char* sg_status_name(sg_status s);

/* lengths: l_1..l_N; alphas: alpha_2..alpha_N (n_edges - 1 values). Any values are accepted
 * here; sg_graph_validate_json reports violations and sg_model_create rejects them. */
SG_API sg_status sg_graph_create(const double* lengths, size_t n_edges, const double* alphas, size_t n_alphas,
                                 sg_graph** out);
SG_API void sg_graph_destroy(sg_graph* g);

/* {"ok", "violations", "n_edges", "L", "Lbar", "epsilon_opt", "T_opt"}; the constants are
 * null when the graph is invalid. Returns SG_OK even when violations are present. */
SG_API sg_status sg_graph_validate_json(const sg_graph* g, char* buf, size_t cap, size_t* needed);
SG_API sg_status sg_graph_length_constants(const sg_graph* g, double* L, double* Lbar);
SG_API sg_status sg_graph_optimal_horizon(const sg_graph* g, double* epsilon, double* T);
SG_API sg_status sg_graph_t_min(const sg_graph* g, double epsilon, double* T);
SG_API sg_status sg_graph_c_theory(const sg_graph* g, double epsilon, double T, double* C);

/* Cubic Hermite discretization with elements_per_edge elements on each edge. */
SG_API sg_status sg_model_create(const sg_graph* g, int elements_per_edge, sg_model** out);
SG_API void sg_model_destroy(sg_model* m);
SG_API int sg_model_n_dof(const sg_model* m);
SG_API int sg_model_n_slots(const sg_model* m);

/* State from a JSON profile description (object or array of objects); out has n_dof entries. */
SG_API sg_status sg_model_state_from_json(const sg_model* m, const char* profile_json, sg_complex* out, size_t n);
/* u^* M u */
SG_API sg_status sg_model_mass_norm2(const sg_model* m, const sg_complex* u, size_t n, double* out);

/* Homogeneous Crank-Nicolson run from u0 on [0, T]; every thin-th state is kept. */
SG_API sg_status sg_simulate(const sg_model* m, const sg_complex* u0, size_t n, double T, int n_steps, int thin,
                             sg_trajectory** out);
/* Controlled run: controls is a row-major (n_slots x (n_steps + 1)) array of tip slopes. The
 * conservation summary of a controlled run is computed on the projected states and is
 * informational only. */
SG_API sg_status sg_simulate_controlled(const sg_model* m, const sg_complex* u0, size_t n, const sg_complex* controls,
                                        size_t n_controls, double T, int n_steps, int thin, sg_trajectory** out);
SG_API void sg_trajectory_destroy(sg_trajectory* t);
SG_API int sg_trajectory_n_states(const sg_trajectory* t);
/* Last stored state; for a controlled run its projection onto the homogeneous space. */
SG_API sg_status sg_trajectory_final(const sg_trajectory* t, sg_complex* out, size_t n);
/* Columns time, dof, real, imag. */
SG_API sg_status sg_trajectory_write_csv(const sg_trajectory* t, const char* path);
/* Controls of a controlled run, columns time, edge, real, imag. */
SG_API sg_status sg_trajectory_write_controls_csv(const sg_trajectory* t, const char* path);
SG_API sg_status sg_trajectory_conservation_json(const sg_trajectory* t, char* buf, size_t cap, size_t* needed);
/* multiplier: "1", "x" or a JSON array of up to five polynomial coefficients.
 * {"identity": IdentityReport, "vertex_balance": ...} */
SG_API sg_status sg_trajectory_identity_json(const sg_trajectory* t, const char* multiplier, char* buf, size_t cap,
                                             size_t* needed);

/* Gramian diagnostics; epsilon <= 0 selects the optimal epsilon. */
SG_API sg_status sg_observe_json(const sg_model* m, double T, int n_steps, double epsilon, double tol, uint64_t seed,
                                 char* buf, size_t cap, size_t* needed);

/* Steer u0 to uT in time T (uT NULL: null control). */
SG_API sg_status sg_hum_solve(const sg_model* m, const sg_complex* u0, const sg_complex* uT, size_t n, double T,
                              int n_steps, double cg_tol, sg_hum_result** out);
SG_API void sg_hum_result_destroy(sg_hum_result* r);
SG_API sg_status sg_hum_result_json(const sg_hum_result* r, char* buf, size_t cap, size_t* needed);
/* Columns time, edge, real, imag. */
SG_API sg_status sg_hum_result_write_controls_csv(const sg_hum_result* r, const char* path);
/* Controls as a row-major (n_slots x (n_steps + 1)) array. */
SG_API sg_status sg_hum_result_controls(const sg_hum_result* r, sg_complex* out, size_t n);

#ifdef __cplusplus
}
#endif

#endif /* SGHUM_H */
