/*
 * C interface to the hardyveto library.
 *
 * Objects are opaque handles released with the matching *_free call. Every
 * fallible function returns an hv_status; on failure hv_last_error() holds a
 * message for the calling thread until its next failing call. Strings
 * returned through char** are owned by the caller and released with
 * hv_string_free.
 *
 * Parties are numbered from 1 in this interface. Settings are HV_U / HV_V,
 * outcomes are 1..d (for qubits 1 means +1 and 2 means -1).
 */
#ifndef HARDYVETO_H_
#define HARDYVETO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HARDYVETO_BUILDING_LIBRARY)
#define HV_API __attribute__((visibility("default")))
#else
#define HV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hv_status {
  HV_OK = 0,
  HV_ERR_INVALID_ARGUMENT = 1,
  HV_ERR_DIMENSION_MISMATCH = 2,
  HV_ERR_DEGENERATE_OBSERVABLES = 3,
  HV_ERR_NO_HARDY_STATE = 4,
  HV_ERR_TOO_LARGE = 5,
  HV_ERR_INFEASIBLE = 6,
  HV_ERR_UNBOUNDED = 7,
  HV_ERR_INSUFFICIENT_TEST_DATA = 8,
  HV_ERR_RATIO_UNREACHABLE = 9,
  HV_ERR_LIST_TOO_SHORT = 10,
  HV_ERR_EMPTY_MATRIX = 11,
  HV_ERR_INSUFFICIENT_RUNS = 12,
  HV_ERR_PARSE = 13,
  HV_ERR_INTERNAL = 99
} hv_status;

typedef enum hv_variant { HV_VARIANT_CONVENTIONAL = 0, HV_VARIANT_MODIFIED = 1 } hv_variant;
typedef enum hv_setting { HV_U = 0, HV_V = 1 } hv_setting;
typedef enum hv_ratio_mode { HV_RATIO_BORN_DERIVED = 0, HV_RATIO_PAPER_STATED = 1 } hv_ratio_mode;
typedef enum hv_verdict {
  HV_VERDICT_NONE = -1, /* run aborted by the test-round witness */
  HV_VERDICT_APPROVED_UNANIMOUS_FAVOR = 0,
  HV_VERDICT_VETOED_MIXED = 1,
  HV_VERDICT_VETOED_ALL_AGAINST = 2
} hv_verdict;

typedef struct hv_state hv_state;
typedef struct hv_observables hv_observables;
typedef struct hv_simulation hv_simulation;

HV_API const char* hv_version(void);
HV_API const char* hv_status_name(hv_status status);
HV_API const char* hv_last_error(void);
HV_API void hv_string_free(char* s);

/* ---- states ---------------------------------------------------------- */

/* amps holds 2 * n_amps doubles, interleaved re, im. The state is normalized. */
HV_API hv_status hv_state_create(const int* dims, size_t n_parties, const double* amps, size_t n_amps,
                                 hv_state** out);
HV_API hv_status hv_state_from_json(const char* json, hv_state** out);
HV_API hv_status hv_state_to_json(const hv_state* state, char** json_out);
/* (2^{N/2}|1>^N - |+>^N) / sqrt(2^N - 1), 2 <= N <= 12 */
HV_API hv_status hv_state_veto(int n, hv_state** out);
HV_API void hv_state_free(hv_state* state);
HV_API size_t hv_state_parties(const hv_state* state);
HV_API size_t hv_state_size(const hv_state* state);
HV_API hv_status hv_state_amplitude(const hv_state* state, size_t index, double* re, double* im);

/* ---- observables ----------------------------------------------------- */

/* u = sigma_z, v = -sigma_x for each of n qubits. */
HV_API hv_status hv_observables_protocol(size_t n, hv_observables** out);
/* |u=1> = alpha|v=1> + beta|v=2>. beta_re / beta_im may be NULL, in which
 * case beta = sqrt(1 - |alpha|^2). alpha_im may be NULL for real alpha. */
HV_API hv_status hv_observables_qubit(const double* alpha_re, const double* alpha_im, const double* beta_re,
                                      const double* beta_im, size_t n, hv_observables** out);
HV_API void hv_observables_free(hv_observables* obs);

HV_API hv_status hv_born_probability(const hv_state* state, const hv_observables* obs, const int* settings,
                                     const int* outcomes, double* out);
/* side lists 1-based party numbers on one side of the cut. */
HV_API hv_status hv_schmidt_rank(const hv_state* state, const int* side, size_t side_len, double tol,
                                 int* rank_out);

/* ---- Hardy construction ---------------------------------------------- */

/* Builds the Hardy subspace for obs. When it is one-dimensional *unique_out
 * is 1 and *state_out is that state; otherwise *state_out is the state of
 * the subspace with the largest q. */
HV_API hv_status hv_hardy_build(const hv_observables* obs, hv_variant variant, hv_state** state_out,
                                double* q_out, size_t* dim_complement_out, int* unique_out);
/* JSON with q, dim_complement, state, condition residuals, entanglement. */
HV_API hv_status hv_hardy_report(const hv_state* state, const hv_observables* obs, hv_variant variant,
                                 char** json_out, int* pass_out);
HV_API hv_status hv_q_value_3qubit(const double abs_alpha[3], double* q_out);
HV_API hv_status hv_maximize_q_3qubit(double* q_max_out, double* abs_alpha_out);

/* ---- bounds ---------------------------------------------------------- */

/* {variant, n, dims, lhv_max, ns_max, quantum_q}; maxima as exact fractions. */
HV_API hv_status hv_bound(int n, int d, hv_variant variant, char** json_out);
HV_API hv_status hv_lhv_max_q(int n, int d, hv_variant variant, char** fraction_out);
HV_API hv_status hv_ns_max_q(int n, int d, hv_variant variant, char** fraction_out);

/* ---- veto protocol --------------------------------------------------- */

typedef struct hv_protocol_params {
  int n;
  uint64_t rounds;
  double p_test;
  uint64_t list_length; /* 0: floor(0.4 * vote rounds) */
  uint64_t tau_plus;    /* 0: threshold rule */
  uint64_t tau_minus;   /* 0: threshold rule */
  double noise;
  uint64_t seed;
  hv_ratio_mode ratio_mode;
  double test_tolerance;
  int sifting; /* nonzero: vetoers sift (the protocol); 0 only for audits */
} hv_protocol_params;

HV_API void hv_protocol_params_default(hv_protocol_params* params);
/* votes: one 'F' or 'V' per member. */
HV_API hv_status hv_simulate(const hv_protocol_params* params, const char* votes, hv_simulation** out);
HV_API int hv_simulation_aborted(const hv_simulation* sim);
HV_API hv_verdict hv_simulation_verdict(const hv_simulation* sim);
HV_API hv_status hv_simulation_to_json(const hv_simulation* sim, char** json_out);
HV_API void hv_simulation_free(hv_simulation* sim);

/* Paired FAVOR / VETO runs for `member` (1-based) on top of base_votes. */
HV_API hv_status hv_audit(const hv_protocol_params* params, const char* base_votes, int member, size_t runs,
                          double alpha, char** json_out, int* pass_out);

#ifdef __cplusplus
}
#endif

#endif /* HARDYVETO_H_ */
