/* Ptychography simulation, Cramer-Rao bound and Monte Carlo estimator
 * benchmarking library. C interface: every object is an opaque handle,
 * every function returns a status code, and buffers are caller-owned.
 * ptycho_last_error() describes the most recent failure on the calling
 * thread. */

#ifndef PTYCHO_H
#define PTYCHO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ptycho_status {
  PTYCHO_OK = 0,
  PTYCHO_ERROR_INVALID_ARGUMENT = 1,
  PTYCHO_ERROR_CONFIG = 2,
  PTYCHO_ERROR_NUMERIC = 3,
  PTYCHO_ERROR_IO = 4
} ptycho_status;

typedef enum ptycho_algorithm {
  PTYCHO_ALGORITHM_ML = 0,  /* Poisson maximum likelihood */
  PTYCHO_ALGORITHM_AMP = 1  /* amplitude-based cost minimization */
} ptycho_algorithm;

typedef struct ptycho_scenario ptycho_scenario;
typedef struct ptycho_stack ptycho_stack;
typedef struct ptycho_crlb ptycho_crlb;
typedef struct ptycho_estimate ptycho_estimate;
typedef struct ptycho_mc ptycho_mc;

const char* ptycho_version(void);
/* Message for the last failing call on this thread; empty if none. */
const char* ptycho_last_error(void);

/* ---- scenarios ------------------------------------------------------- */

ptycho_status ptycho_scenario_from_json(const char* json_text,
                                        ptycho_scenario** out);
ptycho_status ptycho_scenario_from_file(const char* path,
                                        ptycho_scenario** out);
void ptycho_scenario_free(ptycho_scenario* scenario);

ptycho_status ptycho_scenario_object_size(const ptycho_scenario* scenario,
                                          int32_t* nx, int32_t* ny);
ptycho_status ptycho_scenario_detector_size(const ptycho_scenario* scenario,
                                            int32_t* nx, int32_t* ny);
ptycho_status ptycho_scenario_num_positions(const ptycho_scenario* scenario,
                                            int32_t* count);
ptycho_status ptycho_scenario_case_id(const ptycho_scenario* scenario,
                                      int32_t* case_id);
ptycho_status ptycho_scenario_photon_number(const ptycho_scenario* scenario,
                                            double* pn);
ptycho_status ptycho_scenario_seed(const ptycho_scenario* scenario,
                                   uint64_t* seed);
/* Ground-truth object; each buffer holds nx*ny doubles (row-major). */
ptycho_status ptycho_scenario_truth(const ptycho_scenario* scenario,
                                    double* transmission, double* phase);

/* ---- forward model and measurements ---------------------------------- */

/* Expected photon counts for every scan position. */
ptycho_status ptycho_expected_counts(const ptycho_scenario* scenario,
                                     ptycho_stack** out);
/* Poisson draws on deterministic streams; repeats > 1 averages that many
 * measurements per position (streams trial*repeats .. trial*repeats+repeats-1). */
ptycho_status ptycho_sample_counts(const ptycho_scenario* scenario,
                                   const ptycho_stack* expected,
                                   uint64_t master_seed, uint64_t trial,
                                   int32_t repeats, ptycho_stack** out);
ptycho_status ptycho_stack_num_positions(const ptycho_stack* stack,
                                         int32_t* count);
ptycho_status ptycho_stack_plane_size(const ptycho_stack* stack, int32_t* nx,
                                      int32_t* ny);
/* kind: 0 = expected counts, 1 = observed counts. */
ptycho_status ptycho_stack_get_plane(const ptycho_stack* stack, int32_t kind,
                                     int32_t position, double* out);
ptycho_status ptycho_stack_save(const ptycho_stack* stack, const char* dir,
                                uint64_t master_seed, uint64_t trial);
ptycho_status ptycho_stack_load(const char* dir, ptycho_stack** out);
void ptycho_stack_free(ptycho_stack* stack);

/* ---- Fisher information / CRLB --------------------------------------- */

/* rel_tol < 0 selects the default eigenvalue cutoff (K * machine epsilon). */
ptycho_status ptycho_compute_crlb(const ptycho_scenario* scenario,
                                  double rel_tol, ptycho_crlb** out);
ptycho_status ptycho_crlb_get(const ptycho_crlb* crlb, double* transmission,
                              double* phase);
ptycho_status ptycho_crlb_rank(const ptycho_crlb* crlb, int32_t* rank);
ptycho_status ptycho_crlb_save(const ptycho_crlb* crlb, const char* dir);
ptycho_status ptycho_crlb_load(const char* dir, const ptycho_scenario* scenario,
                               ptycho_crlb** out);
void ptycho_crlb_free(ptycho_crlb* crlb);

/* ---- reconstruction --------------------------------------------------- */

typedef struct ptycho_cg_options {
  int32_t max_iterations;        /* <= 0: default 1000 */
  double objective_change_stop;  /* < 0: default 1e-20 */
  double gamma_initial;          /* < 0: per-algorithm default */
  double gamma_after;            /* < 0: default 1e-20 */
  int32_t gamma_switch_iteration; /* <= 0: default 11 */
} ptycho_cg_options;

/* Conjugate-gradient reconstruction from observed counts, initialized at the
 * scenario truth. options may be NULL. A trace CSV (iteration, objective,
 * step sizes, betas, gradient norms) is written when trace_csv_path is
 * non-NULL. */
ptycho_status ptycho_reconstruct(const ptycho_scenario* scenario,
                                 const ptycho_stack* observed,
                                 ptycho_algorithm algorithm,
                                 const ptycho_cg_options* options,
                                 const char* trace_csv_path,
                                 ptycho_estimate** out);
ptycho_status ptycho_estimate_get(const ptycho_estimate* estimate,
                                  double* transmission, double* phase);
ptycho_status ptycho_estimate_save(const ptycho_estimate* estimate,
                                   const char* dir);
void ptycho_estimate_free(ptycho_estimate* estimate);

/* ---- Monte Carlo campaigns -------------------------------------------- */

typedef struct ptycho_mc_aggregates {
  double var_sum_transmission;
  double var_sum_phase;
  double crlb_sum_transmission;
  double crlb_sum_phase;
  double ratio_transmission;
  double ratio_phase;
  double bvr_transmission;
  double bvr_phase;
} ptycho_mc_aggregates;

/* Runs `trials` reconstructions of independently drawn data sets and keeps
 * per-pixel mean/variance/bias-squared statistics. Deterministic in
 * (scenario, algorithm, trials, repeats, master_seed). */
ptycho_status ptycho_run_campaign(const ptycho_scenario* scenario,
                                  ptycho_algorithm algorithm, int32_t trials,
                                  int32_t repeats, uint64_t master_seed,
                                  const ptycho_cg_options* options,
                                  ptycho_mc** out);

typedef enum ptycho_mc_map {
  PTYCHO_MC_MEAN_A = 0,
  PTYCHO_MC_MEAN_PHI = 1,
  PTYCHO_MC_VAR_A = 2,
  PTYCHO_MC_VAR_PHI = 3,
  PTYCHO_MC_BIAS2_A = 4,
  PTYCHO_MC_BIAS2_PHI = 5
} ptycho_mc_map;

ptycho_status ptycho_mc_get_map(const ptycho_mc* mc, ptycho_mc_map which,
                                double* out);
/* Aggregate variance/CRLB comparison restricted to pixels with a positive
 * bound. */
ptycho_status ptycho_mc_compare(const ptycho_mc* mc, const ptycho_crlb* crlb,
                                ptycho_mc_aggregates* out);
/* Writes statistics maps, the manifest, and (when crlb is non-NULL) the
 * aggregate CSV row into dir. */
ptycho_status ptycho_mc_save(const ptycho_mc* mc, const ptycho_crlb* crlb,
                             const char* dir);
ptycho_status ptycho_mc_load(const char* dir, const ptycho_scenario* scenario,
                             ptycho_mc** out);
void ptycho_mc_free(ptycho_mc* mc);

/* Recomputes the aggregate CSV row of a saved campaign directory (used by
 * report generation). `row` must hold at least 512 bytes. */
ptycho_status ptycho_campaign_csv_row(const char* campaign_dir, char* row,
                                      size_t row_size);
const char* ptycho_campaign_csv_header(void);

#ifdef __cplusplus
}
#endif

#endif /* PTYCHO_H */
