#include "geoaudit/geoaudit.h"

#include <cstring>
#include <new>
#include <string>

#include "geoaudit/auditor.hpp"
#include "geoaudit/dataprep.hpp"
#include "geoaudit/nncore.hpp"
#include "geoaudit/pipeline.hpp"
#include "geoaudit/report_io.hpp"

struct ga_config {
    geoaudit::ExperimentConfig value;
};

struct ga_dataset {
    geoaudit::DatasetMatrix value;
};

struct ga_model {
    geoaudit::Model value;
};

namespace {

thread_local std::string g_last_error;

ga_status status_of(geoaudit::ErrorKind kind) {
    switch (kind) {
    case geoaudit::ErrorKind::Config: return GA_ERR_CONFIG;
    case geoaudit::ErrorKind::Data: return GA_ERR_DATA;
    case geoaudit::ErrorKind::Numeric: return GA_ERR_NUMERIC;
    case geoaudit::ErrorKind::Argument: return GA_ERR_ARGUMENT;
    case geoaudit::ErrorKind::Io: return GA_ERR_IO;
    }
    return GA_ERR_INTERNAL;
}

template <class Fn>
ga_status guarded(Fn&& fn) {
    try {
        fn();
        return GA_OK;
    } catch (const geoaudit::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return GA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return GA_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return GA_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) geoaudit::fail(geoaudit::ErrorKind::Argument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

geoaudit::TrainConfig to_cpp(const ga_train_config* cfg) {
    geoaudit::TrainConfig out;
    out.learning_rate = cfg->learning_rate;
    out.epochs = cfg->epochs;
    out.batch_size = cfg->batch_size;
    out.seed = cfg->seed;
    out.l1_lambda = cfg->l1_lambda;
    out.init_scale = cfg->init_scale;
    return out;
}

} // namespace

extern "C" {

const char* ga_version(void) { return geoaudit::kToolVersion; }

const char* ga_last_error(void) { return g_last_error.c_str(); }

void ga_string_free(char* s) { delete[] s; }

ga_status ga_config_load(const char* path, ga_config** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new ga_config{geoaudit::load_config(path)};
    });
}

ga_status ga_config_set_seed(ga_config* config, uint64_t seed) {
    return guarded([&] {
        require(config, "config");
        config->value.seed = seed;
    });
}

ga_status ga_config_set_output_dir(ga_config* config, const char* dir) {
    return guarded([&] {
        require(config, "config");
        require(dir, "dir");
        config->value.output_dir = dir;
    });
}

ga_status ga_config_output_dir(const ga_config* config, char** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        *out = dup_string(config->value.output_dir.string());
    });
}

void ga_config_free(ga_config* config) { delete config; }

ga_status ga_ingest_check(const ga_config* config, ga_ingest_summary* out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        auto result = geoaudit::ingest(config->value);
        *out = {result.rows_read, result.rows_dropped, result.train.rows(), result.test.rows(), result.train.dims()};
    });
}

ga_status ga_pipeline_run(const ga_config* config, const char* stages, char** manifest_json) {
    return guarded([&] {
        require(config, "config");
        auto selected = geoaudit::parse_stages(stages ? stages : "all");
        auto manifest = geoaudit::run_pipeline(config->value, selected);
        if (manifest_json) *manifest_json = dup_string(geoaudit::render_json(geoaudit::to_json(manifest)));
    });
}

ga_status ga_dataset_create(const double* features, const uint8_t* targets, size_t rows, size_t cols,
                            const char* const* feature_names, ga_dataset** out) {
    return guarded([&] {
        require(out, "out");
        if (rows * cols > 0) require(features, "features");
        if (rows > 0) require(targets, "targets");
        if (cols > 0) require(feature_names, "feature_names");
        geoaudit::DatasetMatrix data;
        data.features = geoaudit::Matrix(rows, cols, std::vector<double>(features, features + rows * cols));
        data.targets.assign(targets, targets + rows);
        for (size_t c = 0; c < cols; ++c) {
            require(feature_names[c], "feature name");
            data.feature_names.emplace_back(feature_names[c]);
        }
        geoaudit::validate(data);
        *out = new ga_dataset{std::move(data)};
    });
}

ga_status ga_dataset_xor_shortcut(size_t n, double leak_rate, double noise_std, uint64_t seed, ga_dataset** out) {
    return guarded([&] {
        require(out, "out");
        *out = new ga_dataset{geoaudit::gen_xor_shortcut(n, leak_rate, noise_std, seed)};
    });
}

size_t ga_dataset_rows(const ga_dataset* data) { return data ? data->value.rows() : 0; }

size_t ga_dataset_cols(const ga_dataset* data) { return data ? data->value.dims() : 0; }

const char* ga_dataset_feature_name(const ga_dataset* data, size_t index) {
    if (!data || index >= data->value.feature_names.size()) return nullptr;
    return data->value.feature_names[index].c_str();
}

ga_status ga_dataset_drop(const ga_dataset* data, const char* const* names, size_t count, ga_dataset** out) {
    return guarded([&] {
        require(data, "data");
        require(out, "out");
        if (count > 0) require(names, "names");
        std::set<std::string> drop;
        for (size_t i = 0; i < count; ++i) {
            require(names[i], "name");
            drop.insert(names[i]);
        }
        *out = new ga_dataset{geoaudit::drop_features(data->value, drop)};
    });
}

void ga_dataset_free(ga_dataset* data) { delete data; }

void ga_train_config_defaults(ga_train_config* cfg, ga_model_kind kind) {
    if (!cfg) return;
    auto d = kind == GA_MODEL_MLP ? geoaudit::TrainConfig::mlp_defaults() : geoaudit::TrainConfig::probe_defaults();
    *cfg = {d.learning_rate, d.epochs, d.batch_size, d.seed, d.l1_lambda, d.init_scale};
}

ga_status ga_train_linear(const ga_dataset* data, const ga_train_config* cfg, ga_model** out) {
    return guarded([&] {
        require(data, "data");
        require(cfg, "cfg");
        require(out, "out");
        auto trained = geoaudit::train_linear(data->value, to_cpp(cfg));
        *out = new ga_model{std::move(trained.model)};
    });
}

ga_status ga_train_mlp(const ga_dataset* data, size_t hidden_width, const ga_train_config* cfg, ga_model** out) {
    return guarded([&] {
        require(data, "data");
        require(cfg, "cfg");
        require(out, "out");
        auto trained = geoaudit::train_mlp(data->value, hidden_width, to_cpp(cfg));
        *out = new ga_model{std::move(trained.model)};
    });
}

ga_status ga_model_predict(const ga_model* model, const double* x, size_t len, double* out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        if (len > 0) require(x, "x");
        *out = geoaudit::predict(model->value, std::span<const double>(x, len));
    });
}

ga_status ga_model_accuracy(const ga_model* model, const ga_dataset* data, double* out) {
    return guarded([&] {
        require(model, "model");
        require(data, "data");
        require(out, "out");
        *out = geoaudit::accuracy(model->value, data->value);
    });
}

size_t ga_model_parameter_count(const ga_model* model) {
    return model ? geoaudit::parameter_count(model->value) : 0;
}

void ga_model_free(ga_model* model) { delete model; }

ga_status ga_check_gradients(ga_model_kind kind, const ga_dataset* data, double epsilon, size_t hidden_width,
                             uint64_t seed, double* out) {
    return guarded([&] {
        require(data, "data");
        require(out, "out");
        auto k = kind == GA_MODEL_MLP ? geoaudit::ModelKind::Mlp : geoaudit::ModelKind::Linear;
        *out = geoaudit::check_gradients(k, data->value, epsilon, hidden_width, seed);
    });
}

ga_status ga_prune_threshold(const double* abs_weights, size_t count, double* tau) {
    return guarded([&] {
        require(tau, "tau");
        if (count > 0) require(abs_weights, "abs_weights");
        *tau = geoaudit::prune_threshold(std::span<const double>(abs_weights, count));
    });
}

ga_status ga_audit_run(const ga_dataset* train, const ga_train_config* cfg, char** report_json) {
    return guarded([&] {
        require(train, "train");
        require(cfg, "cfg");
        require(report_json, "report_json");
        auto report = geoaudit::run_audit(train->value, to_cpp(cfg));
        *report_json = dup_string(geoaudit::render_json(geoaudit::to_json(report)));
    });
}

} // extern "C"
