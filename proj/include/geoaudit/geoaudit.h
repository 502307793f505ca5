/*
 * geoaudit C API.
 *
 * Every object is an opaque handle released by its *_free function. Functions
 * return a ga_status; on failure ga_last_error() describes the problem (the
 * message is thread-local and valid until the next failing call on the same
 * thread). Strings returned through char** out-parameters are owned by the
 * caller and released with ga_string_free.
 */
#ifndef GEOAUDIT_H
#define GEOAUDIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef GEOAUDIT_BUILD
#    define GA_API __declspec(dllexport)
#  else
#    define GA_API __declspec(dllimport)
#  endif
#else
#  define GA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 1..3 double as CLI exit codes. */
typedef enum ga_status {
    GA_OK = 0,
    GA_ERR_CONFIG = 1,
    GA_ERR_DATA = 2,
    GA_ERR_NUMERIC = 3,
    GA_ERR_ARGUMENT = 4,
    GA_ERR_IO = 5,
    GA_ERR_INTERNAL = 6
} ga_status;

typedef struct ga_config ga_config;
typedef struct ga_dataset ga_dataset;
typedef struct ga_model ga_model;

typedef enum ga_model_kind { GA_MODEL_LINEAR = 0, GA_MODEL_MLP = 1 } ga_model_kind;

typedef struct ga_train_config {
    double learning_rate;
    size_t epochs;
    size_t batch_size;
    uint64_t seed;
    double l1_lambda;
    double init_scale;
} ga_train_config;

typedef struct ga_ingest_summary {
    size_t rows_read;
    size_t rows_dropped;
    size_t train_rows;
    size_t test_rows;
    size_t dims;
} ga_ingest_summary;

GA_API const char* ga_version(void);
GA_API const char* ga_last_error(void);
GA_API void ga_string_free(char* s);

/* ---- experiment configuration and pipeline ---- */

GA_API ga_status ga_config_load(const char* path, ga_config** out);
GA_API ga_status ga_config_set_seed(ga_config* config, uint64_t seed);
GA_API ga_status ga_config_set_output_dir(ga_config* config, const char* dir);
GA_API ga_status ga_config_output_dir(const ga_config* config, char** out);
GA_API void ga_config_free(ga_config* config);

GA_API ga_status ga_ingest_check(const ga_config* config, ga_ingest_summary* out);

/* stages: comma-separated subset of ingest,audit,sweep,stress,baselines or
 * "all". manifest_json may be NULL. */
GA_API ga_status ga_pipeline_run(const ga_config* config, const char* stages, char** manifest_json);

/* ---- datasets ---- */

GA_API ga_status ga_dataset_create(const double* features, const uint8_t* targets, size_t rows, size_t cols,
                                   const char* const* feature_names, ga_dataset** out);
GA_API ga_status ga_dataset_xor_shortcut(size_t n, double leak_rate, double noise_std, uint64_t seed,
                                         ga_dataset** out);
GA_API size_t ga_dataset_rows(const ga_dataset* data);
GA_API size_t ga_dataset_cols(const ga_dataset* data);
/* NULL when index is out of range. Valid while the dataset lives. */
GA_API const char* ga_dataset_feature_name(const ga_dataset* data, size_t index);
GA_API ga_status ga_dataset_drop(const ga_dataset* data, const char* const* names, size_t count, ga_dataset** out);
GA_API void ga_dataset_free(ga_dataset* data);

/* ---- models ---- */

GA_API void ga_train_config_defaults(ga_train_config* cfg, ga_model_kind kind);
GA_API ga_status ga_train_linear(const ga_dataset* data, const ga_train_config* cfg, ga_model** out);
GA_API ga_status ga_train_mlp(const ga_dataset* data, size_t hidden_width, const ga_train_config* cfg,
                              ga_model** out);
GA_API ga_status ga_model_predict(const ga_model* model, const double* x, size_t len, double* out);
GA_API ga_status ga_model_accuracy(const ga_model* model, const ga_dataset* data, double* out);
GA_API size_t ga_model_parameter_count(const ga_model* model);
GA_API void ga_model_free(ga_model* model);

GA_API ga_status ga_check_gradients(ga_model_kind kind, const ga_dataset* data, double epsilon,
                                    size_t hidden_width, uint64_t seed, double* out);

/* ---- auditor ---- */

GA_API ga_status ga_prune_threshold(const double* abs_weights, size_t count, double* tau);
/* Audit report as JSON (keys: bias, features, flagged, probe_train_accuracy, seed, tau). */
GA_API ga_status ga_audit_run(const ga_dataset* train, const ga_train_config* cfg, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* GEOAUDIT_H */
