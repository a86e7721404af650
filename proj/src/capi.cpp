#include "custprof.h"

#include <cstring>
#include <exception>
#include <string>

#include <nlohmann/json.hpp>

#include "custprof/clustering.hpp"
#include "custprof/errors.hpp"
#include "custprof/evaluation.hpp"
#include "custprof/models.hpp"
#include "custprof/pipeline.hpp"
#include "custprof/table.hpp"

namespace {

thread_local std::string tlsLastError;

void setError(const std::string& message) { tlsLastError = message; }

int translateException() {
    try {
        throw;
    } catch (const custprof::Error& e) {
        setError(e.what());
        return e.exitCode();
    } catch (const std::exception& e) {
        setError(e.what());
        return CUSTPROF_ERR_INTERNAL;
    } catch (...) {
        setError("unknown error");
        return CUSTPROF_ERR_INTERNAL;
    }
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        tlsLastError.clear();
        return CUSTPROF_OK;
    } catch (...) {
        return translateException();
    }
}

char* copyString(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct custprof_dataset {
    custprof::Dataset ds;
};

struct custprof_matrix {
    custprof::FeatureMatrix m;
};

struct custprof_kmeans {
    custprof::KMeansModel model;
};

struct custprof_model {
    custprof::Predictor predictor;
};

extern "C" {

const char* custprof_version(void) { return "1.0.0"; }

const char* custprof_last_error(void) { return tlsLastError.c_str(); }

void custprof_string_free(char* s) { delete[] s; }

int custprof_run(const char* command, const char* config_json, const char* out_dir,
                 uint64_t seed_override, int has_seed, int verbose) {
    return guarded([&] {
        if (!command || !config_json) {
            throw custprof::ConfigError("command and config_json must be non-null");
        }
        custprof::Overrides overrides;
        if (out_dir && *out_dir) overrides.outputDir = std::string(out_dir);
        if (has_seed) overrides.seed = seed_override;
        overrides.verbose = verbose != 0;
        const custprof::PipelineConfig config = custprof::loadConfig(config_json, overrides);
        custprof::runCommand(command, config);
    });
}

int custprof_dataset_load(const char* path, const char* schema_preset, char delimiter,
                          custprof_dataset** out) {
    return guarded([&] {
        if (!path || !schema_preset || !out) {
            throw custprof::ConfigError("null argument to custprof_dataset_load");
        }
        auto ds = custprof::loadTable(path, custprof::schemaPreset(schema_preset), delimiter);
        *out = new custprof_dataset{std::move(ds)};
    });
}

void custprof_dataset_free(custprof_dataset* ds) { delete ds; }

int64_t custprof_dataset_rows(const custprof_dataset* ds) {
    return ds ? static_cast<int64_t>(ds->ds.rowCount()) : -1;
}

int64_t custprof_dataset_cols(const custprof_dataset* ds) {
    return ds ? static_cast<int64_t>(ds->ds.columnCount()) : -1;
}

int custprof_dataset_write_csv(const custprof_dataset* ds, const char* path) {
    return guarded([&] {
        if (!ds || !path) throw custprof::ConfigError("null argument to dataset_write_csv");
        custprof::writeCsv(ds->ds, path);
    });
}

int custprof_matrix_create(int64_t rows, int64_t cols, const double* values,
                           custprof_matrix** out) {
    return guarded([&] {
        if (rows < 0 || cols < 0 || !values || !out) {
            throw custprof::ConfigError("bad arguments to custprof_matrix_create");
        }
        const auto r = static_cast<std::size_t>(rows);
        const auto c = static_cast<std::size_t>(cols);
        std::vector<double> data(values, values + r * c);
        std::vector<std::string> names(c);
        for (std::size_t i = 0; i < c; ++i) names[i] = "x" + std::to_string(i);
        std::vector<long long> ids(r);
        for (std::size_t i = 0; i < r; ++i) ids[i] = static_cast<long long>(i);
        *out = new custprof_matrix{
            custprof::FeatureMatrix(r, c, std::move(data), std::move(names), std::move(ids))};
    });
}

void custprof_matrix_free(custprof_matrix* m) { delete m; }

int64_t custprof_matrix_rows(const custprof_matrix* m) {
    return m ? static_cast<int64_t>(m->m.rowCount()) : -1;
}

int64_t custprof_matrix_cols(const custprof_matrix* m) {
    return m ? static_cast<int64_t>(m->m.columnCount()) : -1;
}

int custprof_kmeans_fit(const custprof_matrix* m, int64_t k, const char* measure, uint64_t seed,
                        int64_t max_iter, double tol, custprof_kmeans** out) {
    return guarded([&] {
        if (!m || !measure || !out || k < 1 || max_iter < 1) {
            throw custprof::ConfigError("bad arguments to custprof_kmeans_fit");
        }
        auto model = custprof::kmeansFit(m->m, static_cast<std::size_t>(k),
                                         custprof::parseMeasure(measure), seed,
                                         static_cast<std::size_t>(max_iter), tol);
        *out = new custprof_kmeans{std::move(model)};
    });
}

void custprof_kmeans_free(custprof_kmeans* model) { delete model; }

double custprof_kmeans_wcss(const custprof_kmeans* model) {
    return model ? model->model.finalWcss : -1.0;
}

int64_t custprof_kmeans_iterations(const custprof_kmeans* model) {
    return model ? static_cast<int64_t>(model->model.iterationsRun) : -1;
}

int custprof_kmeans_centroids(const custprof_kmeans* model, double* centroids_out) {
    return guarded([&] {
        if (!model || !centroids_out) {
            throw custprof::ConfigError("null argument to kmeans_centroids");
        }
        std::size_t pos = 0;
        for (const auto& row : model->model.centroids) {
            for (double v : row) centroids_out[pos++] = v;
        }
    });
}

int custprof_kmeans_assign(const custprof_kmeans* model, const custprof_matrix* m,
                           int* labels_out) {
    return guarded([&] {
        if (!model || !m || !labels_out) {
            throw custprof::ConfigError("null argument to kmeans_assign");
        }
        const auto labels = custprof::assign(model->model, m->m);
        for (std::size_t i = 0; i < labels.size(); ++i) labels_out[i] = labels[i];
    });
}

int custprof_model_fit(const char* spec_json, const custprof_matrix* train, const int* labels,
                       custprof_model** out) {
    return guarded([&] {
        if (!spec_json || !train || !labels || !out) {
            throw custprof::ConfigError("null argument to custprof_model_fit");
        }
        nlohmann::json specDoc;
        try {
            specDoc = nlohmann::json::parse(spec_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw custprof::ConfigError(std::string("spec_json is not valid JSON: ") + e.what());
        }
        const auto spec = custprof::PredictorSpec::fromJson(specDoc);
        std::vector<int> y(labels, labels + train->m.rowCount());
        auto predictor = custprof::Predictor::fit(spec, train->m, y);
        *out = new custprof_model{std::move(predictor)};
    });
}

void custprof_model_free(custprof_model* model) { delete model; }

int custprof_model_predict(const custprof_model* model, const custprof_matrix* m,
                           double* probabilities_out) {
    return guarded([&] {
        if (!model || !m || !probabilities_out) {
            throw custprof::ConfigError("null argument to model_predict");
        }
        const auto probs = model->predictor.predictProba(m->m);
        for (std::size_t i = 0; i < probs.size(); ++i) probabilities_out[i] = probs[i];
    });
}

int custprof_model_to_json(const custprof_model* model, char** json_out) {
    return guarded([&] {
        if (!model || !json_out) throw custprof::ConfigError("null argument to model_to_json");
        *json_out = copyString(model->predictor.toJson().dump(2));
    });
}

int custprof_model_from_json(const char* json, custprof_model** out) {
    return guarded([&] {
        if (!json || !out) throw custprof::ConfigError("null argument to model_from_json");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json);
        } catch (const nlohmann::json::parse_error& e) {
            throw custprof::DataError(std::string("model document is not valid JSON: ") +
                                      e.what());
        }
        *out = new custprof_model{custprof::Predictor::fromJson(doc)};
    });
}

double custprof_mcc(int64_t tp, int64_t fp, int64_t tn, int64_t fn) {
    return custprof::mcc(custprof::ConfusionCounts{tp, fp, tn, fn});
}

}  // extern "C"
