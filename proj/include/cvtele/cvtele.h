#ifndef CVTELE_H
#define CVTELE_H

/* C interface to the cavity teleportation library. Every function returns a
 * cvt_status; on failure cvt_last_error() describes the problem for the
 * calling thread. Handles are opaque and must be released with the matching
 * destroy function. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CVT_BUILDING_LIBRARY)
#    define CVT_API __declspec(dllexport)
#  else
#    define CVT_API __declspec(dllimport)
#  endif
#else
#  define CVT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cvt_status {
    CVT_OK = 0,
    CVT_ERR_ARGUMENT = 1,   /* value outside its domain, bad handle, small buffer */
    CVT_ERR_PARSE = 2,      /* malformed config or trajectory text */
    CVT_ERR_NUMERIC = 3,    /* quadrature, extrapolation or physicality failure */
    CVT_ERR_IO = 4,
    CVT_ERR_VALIDATION = 5,
    CVT_ERR_INTERNAL = 6
} cvt_status;

typedef enum cvt_alice_clock {
    CVT_CLOCK_LAB = 0,    /* Alice ages by the lab coordinate time of each segment */
    CVT_CLOCK_PROPER = 1  /* Alice ages by Rob's proper time */
} cvt_alice_clock;

typedef enum cvt_weight {
    CVT_WEIGHT_TANH_R = 0,
    CVT_WEIGHT_TANH_2R = 1
} cvt_weight;

typedef struct cvt_config {
    double r;
    size_t k;
    size_t kp;
    double length_m;
    double c_m_per_s;
    size_t n_max;
    int alice_clock; /* cvt_alice_clock */
    int weight;      /* cvt_weight */

    /* sweep grid */
    double tau_min_s;
    double tau_max_s;
    size_t tau_steps;
    double a_min_m_s2;
    double a_max_m_s2;
    size_t a_steps;
} cvt_config;

typedef struct cvt_context cvt_context;
typedef struct cvt_trajectory cvt_trajectory;

typedef struct cvt_fidelity_report {
    double F_raw;
    double F_corrected;
    double F_opt_numeric;
    double F_pert;
    double F_pert_opt;
    double nu;
    double phi;
    double h;
    double residual_pert;
    double f_alpha;
    double f_beta;
    double t_alice_s;
    double tau_rob_s;
    double truncation_defect;
    double clamped_violation;
    size_t n_notes;
    char notes[1024]; /* newline separated, truncated if needed */
} cvt_fidelity_report;

typedef struct cvt_sweep_row {
    double tau_s;
    double a_m_s2;
    double h;
    double phi;
    double F_raw;
    double F_corrected;
    double F_opt_numeric;
    double F_pert;
    double F_pert_opt;
    double nu;
    double residual_pert;
} cvt_sweep_row;

typedef struct cvt_sweep_summary {
    double max_truncation_defect;
    double max_relative_opt_deficit;
    size_t regime_warnings;
    size_t clamped_points;
} cvt_sweep_summary;

typedef struct cvt_coefficient {
    size_t m;
    size_t n;
    double alpha_re;
    double alpha_im;
    double beta_re;
    double beta_im;
    double abs_alpha1;
    double abs_beta1;
    int closed_form_match;
} cvt_coefficient;

typedef struct cvt_check {
    char name[64];
    int passed;
    double value;
    double threshold;
    char detail[256];
} cvt_check;

CVT_API const char* cvt_version(void);
/* Message for the last failure on this thread; empty after success. */
CVT_API const char* cvt_last_error(void);

/* "fig3" or "experiment". */
CVT_API cvt_status cvt_config_preset(const char* name, cvt_config* out);
/* Applies `key = value` lines on top of *config. */
CVT_API cvt_status cvt_config_parse(const char* text, cvt_config* config);

CVT_API cvt_status cvt_context_create(const cvt_config* config, cvt_context** out);
CVT_API void cvt_context_destroy(cvt_context* ctx);

/* Empty trajectory; with no segments added it means "stay at rest". */
CVT_API cvt_status cvt_trajectory_create(const cvt_context* ctx, cvt_trajectory** out);
CVT_API cvt_status cvt_trajectory_parse(const cvt_context* ctx, const char* text, cvt_trajectory** out);
CVT_API cvt_status cvt_trajectory_add_inertial(cvt_trajectory* traj, double duration_s);
CVT_API cvt_status cvt_trajectory_add_accel(cvt_trajectory* traj, double acceleration_m_s2, double proper_time_s);
CVT_API void cvt_trajectory_destroy(cvt_trajectory* traj);

CVT_API cvt_status cvt_fidelity(cvt_context* ctx, const cvt_trajectory* traj, cvt_fidelity_report* out);

CVT_API cvt_status cvt_sweep_size(const cvt_context* ctx, size_t* out);
/* rows must hold cvt_sweep_size() entries. summary may be NULL. */
CVT_API cvt_status cvt_sweep(cvt_context* ctx, cvt_sweep_row* rows, size_t capacity, unsigned jobs,
                             cvt_sweep_summary* summary);

/* n_max * n_max rows, m-major. */
CVT_API cvt_status cvt_coefficients(cvt_context* ctx, double h, cvt_coefficient* rows, size_t capacity,
                                    size_t* count);

/* Runs the self-consistency checks. Returns CVT_ERR_VALIDATION if any
 * check fails; the rows are filled either way. */
CVT_API cvt_status cvt_validate(size_t n_max, int inject_fault, cvt_check* checks, size_t capacity,
                                size_t* count);

CVT_API cvt_status cvt_h_parameter(double acceleration_m_s2, double length_m, double c_m_per_s, double* out);

#ifdef __cplusplus
}
#endif

#endif
