#ifndef HERDLENS_H
#define HERDLENS_H

/*
 * C interface to the herdlens engine. Handles are opaque; every fallible
 * call returns an hl_status and leaves a thread-local message readable
 * through hl_last_error_message().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HERDLENS_BUILDING)
#    define HL_API __declspec(dllexport)
#  else
#    define HL_API __declspec(dllimport)
#  endif
#else
#  define HL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hl_status {
    HL_OK = 0,
    HL_ERR_INVALID_ARGUMENT,
    HL_ERR_IO,
    HL_ERR_PARSE,
    HL_ERR_INVARIANT_VIOLATION,
    HL_ERR_MANIFEST_MISMATCH,
    HL_ERR_SUM_MISMATCH,
    HL_ERR_OVERFLOW,
    HL_ERR_EMPTY_MASK,
    HL_ERR_NO_MASKS,
    HL_ERR_DIMENSION_MISMATCH,
    HL_ERR_TOO_FEW_POINTS,
    HL_ERR_TOO_FEW_FEATURES,
    HL_ERR_TOO_FEW_SAMPLES,
    HL_ERR_NO_USABLE_FRAMES,
    HL_ERR_DEGENERATE_BBOX,
    HL_ERR_LENGTH_MISMATCH,
    HL_ERR_EMPTY_GROUP,
    HL_ERR_MISSING_SOCIAL_LABEL,
    HL_ERR_MISSING_VIEW_LABEL,
    HL_ERR_MISSING_IMAGERY,
    HL_ERR_LOW_CONFIDENCE_NOSE,
    HL_ERR_OUT_OF_FRAME,
    HL_ERR_SCHEMA,
    HL_ERR_VALIDATION,
    HL_ERR_INTERNAL
} hl_status;

/* Stable name such as "MissingImagery"; never NULL. */
HL_API const char* hl_status_name(hl_status status);

/* Message of the last failed call on this thread; "" after a success. */
HL_API const char* hl_last_error_message(void);

HL_API const char* hl_version(void);

/* Strings returned through char** out-parameters. */
HL_API void hl_string_free(char* text);

typedef struct hl_string_list hl_string_list;

HL_API size_t hl_string_list_count(const hl_string_list* list);
/* Borrowed pointer, valid until the list is destroyed; NULL when out of range. */
HL_API const char* hl_string_list_get(const hl_string_list* list, size_t index);
HL_API void hl_string_list_destroy(hl_string_list* list);

/* Analysis overrides keyed by flag name without dashes, e.g. "kmeans-k". */
typedef struct hl_params hl_params;

HL_API hl_params* hl_params_create(void);
HL_API hl_status hl_params_set(hl_params* params, const char* key, const char* value);
HL_API void hl_params_destroy(hl_params* params);

/*
 * Validates every video under the paths. On return *diagnostics (optional)
 * lists one "file:line: Code ..." entry per violation; the status is
 * HL_ERR_VALIDATION when any exist.
 */
HL_API hl_status hl_validate(const char* const* paths, size_t n_paths, hl_string_list** diagnostics);

/*
 * Writes a synthetic scenario ("motion", "blobs", "grazing", "resting",
 * "gait") to out_dir. params_json is a JSON object of scenario fields, or
 * NULL. *written (optional) receives the written paths.
 */
HL_API hl_status hl_synth(const char* scenario, const char* params_json, uint64_t seed, const char* out_dir,
                          hl_string_list** written);

/* kind is "run", "graze" or "rest"; params may be NULL. */
HL_API hl_status hl_analyze(const char* kind, const char* const* inputs, size_t n_inputs, const hl_params* params,
                            uint64_t seed, const char* out_dir, hl_string_list** written);

/* Validates the report and renders a text digest into *summary. */
HL_API hl_status hl_report_show(const char* path, char** summary);

/* Decodes run lengths into height*width bytes of 0/1 (row-major). */
HL_API hl_status hl_rle_decode(int height, int width, const uint64_t* counts, size_t n_counts, uint8_t* out_bits);

/*
 * Canonical encoding of height*width bytes. Pass out_counts = NULL to learn
 * the required length through *n_counts.
 */
HL_API hl_status hl_rle_encode(int height, int width, const uint8_t* bits, uint64_t* out_counts, size_t capacity,
                               size_t* n_counts);

typedef struct hl_umap_options {
    int n_neighbors;
    double min_dist;
    int n_components;
    int n_epochs; /* negative selects the size-dependent default */
    double learning_rate;
    int negative_sample_rate;
    uint64_t seed;
} hl_umap_options;

HL_API hl_umap_options hl_umap_default_options(void);

/* data is n x d row-major; out is n x n_components row-major. */
HL_API hl_status hl_umap(const double* data, size_t n, size_t d, const hl_umap_options* options, double* out);

/* labels receives n ids in [0, k); inertia and centroids (k x d) may be NULL. */
HL_API hl_status hl_kmeans(const double* data, size_t n, size_t d, int k, int max_iters, double tol, uint64_t seed,
                           int* labels, double* centroids, double* inertia);

#ifdef __cplusplus
}
#endif

#endif
