/* drxp -- distance-restricted abductive/contrastive explanations.
 *
 * C API of the shared library. Handles are opaque; every function returns a
 * drxp_status, with DRXP_OK == 0 on success. On failure a human-readable
 * message is available from drxp_last_error() (thread-local). Strings
 * returned through out-parameters are owned by the caller and must be
 * released with drxp_free_string().
 */

#ifndef DRXP_H
#define DRXP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DRXP_API __declspec(dllexport)
#else
#define DRXP_API __attribute__((visibility("default")))
#endif

typedef enum drxp_status {
  DRXP_OK = 0,
  DRXP_ERR_USAGE = 1,       /* bad arguments / malformed options */
  DRXP_ERR_PARSE = 2,       /* model or instance document rejected */
  DRXP_ERR_ORACLE = 3,      /* oracle transport, protocol or soundness */
  DRXP_ERR_NO_CXP = 4,      /* problem is eps-robust, no CXp exists */
  DRXP_ERR_UNSUPPORTED = 5, /* (model family, norm) pair not decidable */
  DRXP_ERR_INTERNAL = 6
} drxp_status;

typedef struct drxp_model_s drxp_model;
typedef struct drxp_problem_s drxp_problem;

/* Model documents: {"feature_space":{...},"classes":[...],"model":{...}}. */
DRXP_API drxp_status drxp_model_load_json(const char* json,
                                          drxp_model** out);
DRXP_API drxp_status drxp_model_load_file(const char* path,
                                          drxp_model** out);
DRXP_API void drxp_model_free(drxp_model* model);

/* Predicted class identifier (JSON-encoded) for a JSON point array. */
DRXP_API drxp_status drxp_model_predict(const drxp_model* model,
                                        const char* point_json,
                                        char** label_json_out);

/* Draws n instances uniformly from the feature space box, labeled by the
 * model; returns a JSON array of {"point":[...],"label":...}. */
DRXP_API drxp_status drxp_model_sample(const drxp_model* model, int n,
                                       unsigned long long seed,
                                       char** instances_json_out);

/* instance_json: {"point":[...],"label":...}; the label must match the
 * model's prediction. */
DRXP_API drxp_status drxp_problem_create(const drxp_model* model,
                                         const char* instance_json,
                                         drxp_problem** out);
DRXP_API void drxp_problem_free(drxp_problem* problem);

/* options_json:
 *   {"mode":"axp"|"cxp"|"enumerate",
 *    "epsilon":1.0, "norm":"0"|"1"|"2"|"inf",
 *    "algorithm":"del"|"qxp",            (axp only; default "del")
 *    "oracle":"builtin"|"grid:R"|"external:CMD",
 *    "timeout":SECS,                     (optional per-query timeout)
 *    "order":"asc"|"desc"|"random:SEED"|"i,j,...",
 *    "max_xps":N,                        (enumerate only; 0 = unlimited)
 *    "model_ref":"path"}                 (external oracles)
 * Result: the explanation / enumeration JSON document. */
DRXP_API drxp_status drxp_run(const drxp_problem* problem,
                              const char* options_json,
                              char** result_json_out);

/* Validates a candidate {"features":[...],"kind":"axp"|...} under the same
 * options; *verdict_out = 1 when valid, 0 otherwise. */
DRXP_API drxp_status drxp_check(const drxp_problem* problem,
                                const char* options_json,
                                const char* candidate_json,
                                int* verdict_out);

DRXP_API void drxp_free_string(char* s);
DRXP_API const char* drxp_last_error(void);
DRXP_API const char* drxp_status_name(drxp_status status);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DRXP_H */
