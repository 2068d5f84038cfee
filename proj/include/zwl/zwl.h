/* C interface to the zwl library. All handles are opaque; every call that
 * can fail returns a zwl_status and leaves a message for zwl_last_error().
 * Strings returned through char** are owned by the caller and released with
 * zwl_string_free. */
#ifndef ZWL_H
#define ZWL_H

#include <stdint.h>

#if defined(_WIN32)
#define ZWL_API
#else
#define ZWL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zwl_status {
  ZWL_OK = 0,
  ZWL_ERR_INVALID_ARGUMENT = 1,
  ZWL_ERR_COMPUTATION = 2,
  ZWL_ERR_INVARIANT = 3,
  ZWL_ERR_IO = 4,
  ZWL_ERR_CACHE_CORRUPT = 5,
  ZWL_ERR_CACHE_MISMATCH = 6,
  ZWL_ERR_OVERFLOW = 7,
  ZWL_ERR_SINGULAR = 8,
  ZWL_ERR_EMPTY_FAMILY = 9,
  ZWL_ERR_SIEVE_CONFIG = 10,
  ZWL_ERR_NOT_CONVERGED = 11,
  ZWL_ERR_INTERNAL = 99
} zwl_status;

typedef struct zwl_family zwl_family;
typedef struct zwl_test_function zwl_test_function;
typedef struct zwl_trace_cache zwl_trace_cache;

ZWL_API const char* zwl_version(void);
/* Message of the last failed call on this thread; empty after success. */
ZWL_API const char* zwl_last_error(void);
ZWL_API void zwl_string_free(char* s);

/* Families. JSON schema: {"A": [ints], "B": [ints], "r": int, "c": int,
 * "t0": int, "B_square": int, "small_prime_policy": "include-once"|"exclude"}
 * where integers may be given as strings. */
ZWL_API zwl_status zwl_family_from_json(const char* json, zwl_family** out);
ZWL_API void zwl_family_free(zwl_family* family);
ZWL_API zwl_status zwl_family_load_conductors(zwl_family* family, const char* csv_path);
ZWL_API zwl_status zwl_family_describe(const zwl_family* family, char** json_out);
ZWL_API zwl_status zwl_family_sieve(const zwl_family* family, int64_t R, int workers, char** json_out);
ZWL_API zwl_status zwl_family_log_conductor(const zwl_family* family, int64_t t, double* out);
ZWL_API zwl_status zwl_family_avg_log_conductor(const zwl_family* family, int64_t R, int workers,
                                                double* out);
ZWL_API zwl_status zwl_first_moment(const zwl_family* family, int64_t p, int64_t* out);

/* Trace caches. scope is "sieved" or "all". */
ZWL_API zwl_status zwl_trace_cache_build(const zwl_family* family, int64_t R, int64_t prime_limit,
                                         const char* scope, int workers, zwl_trace_cache** out);
ZWL_API zwl_status zwl_trace_cache_save(const zwl_trace_cache* cache, const char* path);
/* family may be NULL to skip the fingerprint check. */
ZWL_API zwl_status zwl_trace_cache_load(const char* path, const zwl_family* family,
                                        zwl_trace_cache** out);
ZWL_API zwl_status zwl_trace_cache_info(const zwl_trace_cache* cache, char** json_out);
ZWL_API void zwl_trace_cache_free(zwl_trace_cache* cache);

/* Test functions. Descriptors:
 *   {"kind": "fejer", "sigma": s}
 *   {"kind": "even_polynomial", "q": ["1", "-0.233428", ...], "sigma": s, "tau": t}
 *   {"kind": "bump", "a": "1", "sigma": s, "tau": t}
 * tau defaults to 1 / (pi C(h) sigma). */
ZWL_API zwl_status zwl_test_function_from_json(const char* json, zwl_test_function** out);
ZWL_API void zwl_test_function_free(zwl_test_function* fn);
ZWL_API zwl_status zwl_test_function_eval(const zwl_test_function* fn, double x, double* out);
ZWL_API zwl_status zwl_test_function_eval_hat(const zwl_test_function* fn, double y, double* out);
ZWL_API zwl_status zwl_test_function_sigma(const zwl_test_function* fn, double* out);

/* options: {"R": int, "normalization": "local"|"global", "a": x, "b": x,
 * "kappa": x, "workers": int, "ladder": bool}. cache may be NULL.
 * Output: {"report": {...}, "diagnostics": {...}, "convergence": [...]}. */
ZWL_API zwl_status zwl_density(const zwl_family* family, const zwl_test_function* fn,
                               const char* options_json, const zwl_trace_cache* cache, char** json_out);
ZWL_API zwl_status zwl_predicted_density(const zwl_test_function* fn, const char* group, int forced_rank,
                                         double* out);

/* h descriptors: {"kind": "even_polynomial", "q": [...]} or {"kind": "bump", "a": "..."}. */
ZWL_API zwl_status zwl_c_of_h(const char* h_json, double* out);
/* options: {"starts": int, "tolerance": x, "max_iter": int, "workers": int}. */
ZWL_API zwl_status zwl_optimize(int n, const char* options_json, char** json_out);
ZWL_API zwl_status zwl_scan_candidates(char** json_out);
/* options: {"h": descriptor, "a": x, "b": x, "tau": x, "tau_lower": x}. */
ZWL_API zwl_status zwl_bounds(int r, double sigma, const char* options_json, char** json_out);

/* config: {"N": int, "parity": "even"|"odd"|"mixed", "r": int, "samples": int,
 * "seed": uint, "tau": x}. counts_csv may be NULL. */
ZWL_API zwl_status zwl_simulate(const char* config_json, int workers, char** json_out, char** counts_csv);

#ifdef __cplusplus
}
#endif

#endif
