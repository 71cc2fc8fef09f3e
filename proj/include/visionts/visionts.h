#ifndef VISIONTS_VISIONTS_H
#define VISIONTS_VISIONTS_H

/* C interface to the forecasting engine. Handles are opaque; every call
 * that can fail returns a vts_status and leaves a message retrievable with
 * vts_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with vts_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define VTS_API __attribute__((visibility("default")))

typedef enum vts_status {
    VTS_OK = 0,
    VTS_ERR_ARGUMENT,
    VTS_ERR_INGESTION,
    VTS_ERR_SPLIT,
    VTS_ERR_WINDOW,
    VTS_ERR_SELECTION,
    VTS_ERR_SEGMENT,
    VTS_ERR_CAPACITY,
    VTS_ERR_LOAD,
    VTS_ERR_SHAPE,
    VTS_ERR_NUMERICS,
    VTS_ERR_METRIC,
    VTS_ERR_BASELINE,
    VTS_ERR_AGGREGATION,
    VTS_ERR_CONFIG,
    VTS_ERR_IO,
    VTS_ERR_INTERNAL
} vts_status;

typedef struct vts_frame vts_frame;
typedef struct vts_model vts_model;

/* "LoadError", "WindowError", ... ("OK" for VTS_OK). */
VTS_API const char* vts_status_name(vts_status status);
/* Module that raises the status: "series_core", "imaging", "mae_infer", ... */
VTS_API const char* vts_status_module(vts_status status);
/* Message of the last failed call on this thread; "" if none. */
VTS_API const char* vts_last_error(void);
VTS_API void vts_string_free(char* s);

/* ---- series ---- */

/* `frequency` may be NULL (inferred from a "date" column, else OTHER). */
VTS_API vts_status vts_frame_load_csv(const char* path, const char* frequency, vts_frame** out);
VTS_API void vts_frame_free(vts_frame* frame);
VTS_API size_t vts_frame_rows(const vts_frame* frame);
VTS_API size_t vts_frame_variables(const vts_frame* frame);
/* NULL when out of range. Valid for the frame's lifetime. */
VTS_API const char* vts_frame_variable_name(const vts_frame* frame, size_t variable);
/* Frequency tag such as "15T" (valid for the frame's lifetime). */
VTS_API const char* vts_frame_frequency(const vts_frame* frame);
/* Borrowed pointer to a column of vts_frame_rows values. */
VTS_API vts_status vts_frame_column(const vts_frame* frame, size_t variable, const double** data);

/* ---- periodicity ---- */

/* Writes up to `capacity` candidates; `*count` receives the full count. */
VTS_API vts_status vts_candidate_periods(const char* frequency, size_t* out, size_t capacity,
                                         size_t* count);

typedef struct vts_dataset_preset {
    size_t period;
    size_t context_length; /* 0 when the dataset has no zero-shot default */
    double r;
    double c;
    char frequency[16];
    char split[64]; /* accepted by the `split` fields below */
} vts_dataset_preset;

/* VTS_ERR_CONFIG for an unknown name. */
VTS_API vts_status vts_find_dataset_preset(const char* name, vts_dataset_preset* out);

/* ---- model ---- */

VTS_API vts_status vts_model_load(const char* path, vts_model** out);
VTS_API void vts_model_free(vts_model* model);

typedef struct vts_model_info {
    size_t encoder_dim, encoder_depth, encoder_heads;
    size_t decoder_dim, decoder_depth, decoder_heads;
    size_t patch_size, grid_side;
    uint64_t parameter_count;
} vts_model_info;

VTS_API vts_status vts_model_get_info(const vts_model* model, vts_model_info* out);

/* Small seeded random-weight archive for tests and smoke runs. */
VTS_API vts_status vts_write_fixture(const char* path, uint64_t seed);

/* ---- forecasting ---- */

typedef struct vts_forecast_params {
    size_t context_length;
    size_t horizon;
    size_t period;
    double r; /* 0 picks 0.4 */
    double c; /* 0 picks 0.4 */
} vts_forecast_params;

/* `model` NULL selects the row-mean stand-in reconstructor. `out` must
 * hold params->horizon values. */
VTS_API vts_status vts_forecast(const vts_model* model, const double* context, size_t context_length,
                                const vts_forecast_params* params, double* out);

#define VTS_BASELINE_SEASONAL_NAIVE 1
#define VTS_BASELINE_SEASONAL_AVG 2

typedef struct vts_benchmark_params {
    const char* dataset;    /* report label */
    const char* split;      /* NULL: preset for `dataset`, else 0.7,0.1,0.2 */
    size_t context_length;
    const size_t* horizons;
    size_t horizon_count;
    size_t period;          /* 0: select on the validation split */
    double r;               /* 0 picks 0.4 */
    double c;               /* 0 picks 0.4 */
    size_t stride;          /* 0 picks 1 */
    size_t selection_stride;/* 0: about 32 validation windows per variable */
    int baselines;          /* VTS_BASELINE_* flags */
    int run_model;          /* evaluate the model (row-mean stand-in if NULL) */
    size_t threads;         /* 0: hardware concurrency, capped by VISIONTS_THREADS */
    const char* config_echo;/* optional JSON object merged into the report config */
} vts_benchmark_params;

/* Period used by vts_benchmark when params->period is 0, with its source
 * name ("VALIDATION_SELECTED", "FORCED"). */
VTS_API vts_status vts_select_period(const vts_model* model, const vts_frame* frame,
                                     const vts_benchmark_params* params, size_t* period,
                                     const char** source);

/* Report JSON in *report_json. */
VTS_API vts_status vts_benchmark(const vts_model* model, const vts_frame* frame,
                                 const vts_benchmark_params* params, char** report_json);

/* Combines two report documents (rows concatenated, configs joined). */
VTS_API vts_status vts_report_merge(const char* a, const char* b, char** out);

/* Writes <prefix>input.pgm, visible.pgm, mask.pgm and reconstructed.pgm
 * for the window whose first target row is `origin`. VTS_ERR_WINDOW when
 * the window does not lie inside the frame. */
VTS_API vts_status vts_inspect(const vts_model* model, const vts_frame* frame, size_t variable,
                               size_t origin, const vts_forecast_params* params,
                               const char* prefix);

#ifdef __cplusplus
}
#endif

#endif
