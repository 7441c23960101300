/*
 * cpdetect: exact multiple-changepoint detection for univariate series.
 *
 * All functions returning cpd_status report CPD_OK on success; on failure a
 * thread-local message is available from cpd_last_error(). Out-parameters are
 * untouched on failure, except that array accessors zero their count when
 * given a null handle. Handles are created and destroyed in pairs; accessors
 * return pointers into the handle that stay valid until it is destroyed.
 *
 * Index convention: observations are numbered 1..n and a changepoint at
 * index t marks a boundary after observation t, so t ranges over 1..n-1 and
 * segments are [1..t1], [t1+1..t2], ..., [tm+1..n].
 */
#ifndef CPDETECT_H
#define CPDETECT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CPD_API __declspec(dllexport)
#else
#  define CPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cpd_status {
  CPD_OK = 0,
  CPD_ERR_INVALID_ARGUMENT = 1,
  CPD_ERR_NONFINITE_DATA = 2,
  CPD_ERR_INFEASIBLE = 3,
  CPD_ERR_NOMEM = 4,
  CPD_ERR_INTERNAL = 5
} cpd_status;

CPD_API const char* cpd_version(void);
CPD_API const char* cpd_status_name(cpd_status status);
/* Message from the most recent failing call on this thread ("" if none). */
CPD_API const char* cpd_last_error(void);

/* ------------------------------------------------------------------ series */

typedef struct cpd_series cpd_series;

CPD_API cpd_status cpd_series_create(const double* values, size_t count, cpd_series** out);
/* First differences applied `order` times (length shrinks by `order`). */
CPD_API cpd_status cpd_series_diff(const cpd_series* series, int order, cpd_series** out);
CPD_API void cpd_series_destroy(cpd_series* series);
CPD_API int64_t cpd_series_length(const cpd_series* series);
CPD_API const double* cpd_series_values(const cpd_series* series, size_t* count);

/* --------------------------------------------------------------- detection */

/*
 * model:     "mean" | "var" | "meanvar" | "ar-mdl"
 * penalty:   "sic" | "aic" | "manual:<value>" | "concave:sqrt" |
 *            "concave:log" | "mdl"
 * algorithm: "pelt" | "op" | "bs" | "sn"
 */
typedef struct cpd_options {
  const char* model;
  const char* penalty;
  const char* algorithm;
  int32_t p_max;                /* ar-mdl: largest candidate order */
  double mu;                    /* var: the known mean; NAN = sample mean */
  int64_t min_segment;          /* 0 = model default; raise-only */
  int64_t sn_max_changepoints;  /* sn: largest count considered */
  int64_t bs_max_changepoints;  /* bs: force this many splits; -1 = off */
  int32_t max_iterations;       /* concave penalties */
} cpd_options;

/* Fills the defaults: meanvar model, sic penalty, pelt, p_max 7, mu NAN,
 * min_segment 0, sn_max_changepoints 20, bs_max_changepoints -1,
 * max_iterations 20. */
CPD_API void cpd_options_init(cpd_options* options);

typedef struct cpd_result cpd_result;

CPD_API cpd_status cpd_detect(const cpd_series* series, const cpd_options* options,
                              cpd_result** out);
CPD_API void cpd_result_destroy(cpd_result* result);

CPD_API const int64_t* cpd_result_changepoints(const cpd_result* result, size_t* count);
CPD_API int64_t cpd_result_series_length(const cpd_result* result);
/* Value of the minimized penalized objective. */
CPD_API double cpd_result_objective(const cpd_result* result);
/* Constant penalty value used; NAN for concave penalties. */
CPD_API double cpd_result_beta(const cpd_result* result);

#define CPD_MAX_SEGMENT_PARAMS 34

typedef struct cpd_segment {
  int64_t start;  /* 1-based, inclusive */
  int64_t end;
  double cost;    /* NAN for simulated truth segments */
  int32_t ar_order;  /* -1 unless autoregressive */
  int32_t num_params;
  double params[CPD_MAX_SEGMENT_PARAMS];
} cpd_segment;

CPD_API size_t cpd_result_num_segments(const cpd_result* result);
CPD_API cpd_status cpd_result_segment(const cpd_result* result, size_t index, cpd_segment* out);
/* Name of parameter `param_index` of the given segment, e.g. "mean",
 * "variance", "phi_1". */
CPD_API const char* cpd_result_param_name(const cpd_result* result, size_t index,
                                          int32_t param_index);

/* PELT candidate-set statistics; CPD_ERR_INVALID_ARGUMENT for other
 * algorithms. */
CPD_API cpd_status cpd_result_pruning(const cpd_result* result, int64_t* max_candidates,
                                      double* mean_candidates);
/* Concave-penalty iteration count and convergence flag;
 * CPD_ERR_INVALID_ARGUMENT for constant penalties. */
CPD_API cpd_status cpd_result_iterations(const cpd_result* result, int64_t* iterations,
                                         int32_t* converged);

/* Samples `trials` random admissible split triples (t, s, u) and counts how
 * often cost(t,s) + cost(s,u) + K exceeds cost(t,u) + tol under the model in
 * `options`. A nonzero count means PELT's pruning is not safe there. */
CPD_API cpd_status cpd_check_pruning(const cpd_series* series, const cpd_options* options,
                                     uint64_t seed, int64_t trials, double tol,
                                     int64_t* violations);

/* -------------------------------------------------------------- simulation */

/*
 * law:    "variance" | "ar"
 * growth: "linear" (m = n/100) | "sqrt" (m = floor(sqrt(n)/4)) |
 *         "fixed" (m = 2) | "explicit" (m = m field)
 */
typedef struct cpd_sim_design {
  int64_t n;
  const char* law;
  const char* growth;
  int64_t m;        /* used iff growth == "explicit" */
  int64_t min_gap;  /* 0 = law default (variance 30, ar 50) */
  uint64_t seed;
} cpd_sim_design;

CPD_API void cpd_sim_design_init(cpd_sim_design* design);

typedef struct cpd_sim cpd_sim;

CPD_API cpd_status cpd_simulate(const cpd_sim_design* design, cpd_sim** out);
CPD_API void cpd_sim_destroy(cpd_sim* sim);
CPD_API const double* cpd_sim_values(const cpd_sim* sim, size_t* count);
CPD_API const int64_t* cpd_sim_changepoints(const cpd_sim* sim, size_t* count);
CPD_API size_t cpd_sim_num_segments(const cpd_sim* sim);
/* True generating parameters of one segment (variance law: {variance};
 * ar law: {phi_1..phi_p, innovation_variance} with ar_order = p). */
CPD_API cpd_status cpd_sim_segment(const cpd_sim* sim, size_t index, cpd_segment* out);
/* Per-observation true parameter (variance law: the segment variance). */
CPD_API const double* cpd_sim_theta(const cpd_sim* sim, size_t* count);

typedef struct cpd_eval_report {
  double mse; /* NAN when no parameter rule applies */
  int64_t true_detected;
  int64_t false_detected;
} cpd_eval_report;

/* theta_rule: "none" | "variance" (segment variances about mean zero) |
 * "meanvar". Matching pairs detected to true changepoints one-to-one,
 * nearest first, within +/- window. */
CPD_API cpd_status cpd_evaluate(const cpd_sim* sim, const cpd_result* result, int64_t window,
                                const char* theta_rule, cpd_eval_report* out);

/* --------------------------------------------------------------- benchmark */

typedef struct cpd_bench_spec {
  const cpd_sim_design* scenarios;  /* seed fields are ignored */
  size_t num_scenarios;
  const char* algorithms; /* comma-separated: pelt,op,bs,sn,subbs */
  const char* model;
  const char* penalty;
  int32_t p_max;
  double mu;              /* NAN = sample mean */
  int64_t reps;
  uint64_t seed;
  int64_t sn_max_changepoints;
  int64_t eval_window;
  const char* theta_rule;
} cpd_bench_spec;

CPD_API void cpd_bench_spec_init(cpd_bench_spec* spec);

typedef struct cpd_bench cpd_bench;

typedef struct cpd_bench_row {
  char scenario[64];
  int64_t n;
  int64_t m_true;
  char algorithm[16];
  int64_t rep;
  double runtime_s;
  double cost;
  double mse;
  int64_t true_detected;
  int64_t false_detected;
  double cost_gap;
  int32_t ok;
  char error[160];
} cpd_bench_row;

typedef struct cpd_bench_group {
  char scenario[64];
  char algorithm[16];
  int64_t n;
  int64_t reps_ok;
  double mean_runtime_s;
  double se_runtime_s;
  double mean_cost;
  double mean_mse;
  double se_mse;
  double mean_true_detected;
  double mean_false_detected;
  double mean_cost_gap;
} cpd_bench_group;

CPD_API cpd_status cpd_bench_run(const cpd_bench_spec* spec, cpd_bench** out);
CPD_API void cpd_bench_destroy(cpd_bench* bench);
CPD_API size_t cpd_bench_num_rows(const cpd_bench* bench);
CPD_API cpd_status cpd_bench_row_get(const cpd_bench* bench, size_t index, cpd_bench_row* out);
CPD_API size_t cpd_bench_num_groups(const cpd_bench* bench);
CPD_API cpd_status cpd_bench_group_get(const cpd_bench* bench, size_t index,
                                       cpd_bench_group* out);
/* Per-rep rows as CSV (header included). Free with cpd_string_free. */
CPD_API cpd_status cpd_bench_csv(const cpd_bench* bench, char** out);
/* Aggregate table, human-readable. Free with cpd_string_free. */
CPD_API cpd_status cpd_bench_summary(const cpd_bench* bench, char** out);
CPD_API void cpd_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* CPDETECT_H */
