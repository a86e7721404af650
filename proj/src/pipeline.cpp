#include "custprof/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "custprof/errors.hpp"
#include "custprof/rng.hpp"

namespace fs = std::filesystem;

namespace custprof {

namespace {

using nlohmann::json;

void writeTextFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    out << content;
    if (!out) throw DataError("write failed: " + path);
}

void writeJsonFile(const std::string& path, const json& doc) {
    writeTextFile(path, doc.dump(2) + "\n");
}

std::string outPath(const PipelineConfig& config, const std::string& name) {
    return (fs::path(config.outputDir) / name).string();
}

void ensureOutputDir(const PipelineConfig& config) {
    if (config.outputDir.empty()) throw ConfigError("output directory not set");
    std::error_code ec;
    fs::create_directories(config.outputDir, ec);
    if (ec) throw DataError("cannot create output directory: " + config.outputDir);
}

CleaningRule parseCleaningRule(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const CleanAction action =
        j.value("action", std::string("drop_row")) == "flag_only" ? CleanAction::FlagOnly
                                                                  : CleanAction::DropRow;
    if (kind == "dedup_on_key") {
        return CleaningRule::dedupOnKey(j.at("column").get<std::string>(), action);
    }
    if (kind == "range_bound") {
        return CleaningRule::rangeBound(j.at("column").get<std::string>(),
                                        j.at("min").get<double>(), j.at("max").get<double>(),
                                        action);
    }
    if (kind == "quantile_fence") {
        return CleaningRule::quantileFence(j.at("column").get<std::string>(),
                                           j.value("k_iqr", 1.5), action);
    }
    if (kind == "impossible_age") {
        return CleaningRule::impossibleAge(j.at("column").get<std::string>(),
                                           j.at("reference_year").get<int>(),
                                           j.value("max_age", 100), action);
    }
    throw ConfigError("unknown cleaning rule kind '" + kind + "'");
}

ImputeSpec parseImputeSpec(const json& j) {
    ImputeSpec spec;
    spec.column = j.at("column").get<std::string>();
    const std::string strategy = j.value("strategy", std::string("mean"));
    if (strategy == "mean") spec.strategy = ImputeSpec::Strategy::Mean;
    else if (strategy == "median") spec.strategy = ImputeSpec::Strategy::Median;
    else if (strategy == "knn") spec.strategy = ImputeSpec::Strategy::Knn;
    else throw ConfigError("unknown impute strategy '" + strategy + "'");
    spec.k = j.value("k", 5);
    if (j.contains("distance_columns")) {
        spec.distanceColumns = j.at("distance_columns").get<std::vector<std::string>>();
    }
    return spec;
}

Recipe parseRecipe(const json& j, const std::optional<int>& defaultReferenceYear) {
    if (j.is_string()) {
        Recipe r = Recipe::builtin(j.get<std::string>());
        if (r.kind == Recipe::Kind::YearDiff && !r.referenceYear) {
            r.referenceYear = defaultReferenceYear;
        }
        return r;
    }
    Recipe r;
    r.name = j.at("name").get<std::string>();
    if (j.contains("sum")) {
        r.kind = Recipe::Kind::Sum;
        r.columns = j.at("sum").get<std::vector<std::string>>();
    } else if (j.contains("year_diff")) {
        r.kind = Recipe::Kind::YearDiff;
        r.columns = {j.at("year_diff").get<std::string>()};
        if (j.contains("reference_year")) r.referenceYear = j.at("reference_year").get<int>();
        else r.referenceYear = defaultReferenceYear;
    } else {
        throw ConfigError("recipe '" + r.name + "' needs a 'sum' or 'year_diff' field");
    }
    return r;
}

SegmentRule parseSegmentRule(const json& j) {
    SegmentRule rule;
    rule.name = j.at("name").get<std::string>();
    rule.rMin = j.value("r_min", 1);
    rule.rMax = j.value("r_max", 5);
    rule.fMin = j.value("f_min", 1);
    rule.fMax = j.value("f_max", 5);
    rule.mMin = j.value("m_min", 1);
    rule.mMax = j.value("m_max", 5);
    return rule;
}

BalanceSpec parseBalance(const json& j) {
    const std::string method = j.value("method", std::string("none"));
    if (method == "none") return BalanceSpec::none();
    if (method == "smote") return BalanceSpec::smote(j.value("k", 5), j.value("ratio", 1.0));
    if (method == "undersample") return BalanceSpec::undersample(j.value("ratio", 1.0));
    throw ConfigError("unknown balance method '" + method + "'");
}

ColumnKind parseColumnKind(const std::string& kind) {
    if (kind == "integer") return ColumnKind::Integer;
    if (kind == "real") return ColumnKind::Real;
    if (kind == "categorical") return ColumnKind::Categorical;
    if (kind == "date") return ColumnKind::Date;
    if (kind == "boolean") return ColumnKind::Boolean;
    throw ConfigError("unknown column kind '" + kind + "'");
}

}  // namespace

PipelineConfig PipelineConfig::fromJson(const json& j) {
    PipelineConfig config;
    if (!j.contains("version")) throw ConfigError("config needs a 'version' field");
    config.version = j.at("version").get<int>();
    if (config.version != 1) {
        throw ConfigError("unsupported config version " + std::to_string(config.version));
    }

    if (j.contains("input")) {
        const auto& in = j.at("input");
        config.input.path = in.value("path", std::string());
        const std::string delim = in.value("delimiter", std::string(","));
        if (delim.size() != 1) throw ConfigError("delimiter must be a single character");
        config.input.delimiter = delim[0];
        config.input.schema = in.value("schema", std::string("merged"));
        config.input.kind = in.value("kind", std::string("dataset"));
        config.input.dateFormat = in.value("date_format", std::string("YYYY-MM-DD"));
        if (config.input.schema == "custom") {
            if (!in.contains("columns")) {
                throw ConfigError("custom schema needs input.columns");
            }
            for (const auto& cj : in.at("columns")) {
                ColumnSpec spec;
                spec.name = cj.at("name").get<std::string>();
                spec.kind = parseColumnKind(cj.value("kind", std::string("real")));
                spec.nullable = cj.value("nullable", false);
                spec.dateFormat = cj.value("date_format", config.input.dateFormat);
                config.input.customColumns.push_back(std::move(spec));
            }
        }
    }

    config.outputDir = j.value("output_dir", std::string());
    config.seed = j.value("seed", 0ULL);

    if (j.contains("stages")) {
        const auto& st = j.at("stages");
        config.stages.clean = st.value("clean", true);
        config.stages.impute = st.value("impute", true);
        config.stages.engineer = st.value("engineer", true);
        config.stages.scale = st.value("scale", true);
        config.stages.select = st.value("select", true);
    }

    if (j.contains("cleaning")) {
        const auto& cleaning = j.at("cleaning");
        if (cleaning.contains("rules")) {
            for (const auto& rj : cleaning.at("rules")) {
                config.cleaningRules.push_back(parseCleaningRule(rj));
            }
        }
        if (cleaning.contains("flag_mislabeled")) {
            const auto& fm = cleaning.at("flag_mislabeled");
            config.mislabeledCheck.enabled = true;
            config.mislabeledCheck.folds = fm.value("folds", 5);
            if (fm.contains("model")) {
                config.mislabeledCheck.model = PredictorSpec::fromJson(fm.at("model"));
            }
        }
    }
    if (j.contains("impute")) {
        for (const auto& ij : j.at("impute")) config.imputeSpecs.push_back(parseImputeSpec(ij));
    }
    if (j.contains("engineer")) {
        const auto& e = j.at("engineer");
        std::optional<int> refYear;
        if (e.contains("reference_year") && !e.at("reference_year").is_null()) {
            refYear = e.at("reference_year").get<int>();
        }
        if (e.contains("recipes")) {
            for (const auto& rj : e.at("recipes")) {
                config.recipes.push_back(parseRecipe(rj, refYear));
            }
        }
    }

    if (j.contains("features")) {
        const auto& f = j.at("features");
        if (f.contains("include")) {
            config.features.include = f.at("include").get<std::vector<std::string>>();
        }
        if (f.contains("exclude")) {
            config.features.exclude = f.at("exclude").get<std::vector<std::string>>();
        }
        if (f.contains("one_hot")) {
            config.features.oneHot = f.at("one_hot").get<std::vector<std::string>>();
        }
        if (f.contains("ordinal")) {
            for (const auto& [name, order] : f.at("ordinal").items()) {
                config.features.ordinal[name] = order.get<std::vector<std::string>>();
            }
        }
        config.features.dropConstant = f.value("drop_constant", true);
    }

    if (j.contains("scaling")) {
        config.scaleTMin = j.at("scaling").value("t_min", 0.0);
        config.scaleTMax = j.at("scaling").value("t_max", 1.0);
    }

    if (j.contains("rfm")) {
        const auto& r = j.at("rfm");
        config.rfm.bins = r.value("bins", 5);
        config.rfm.includeDealsInFrequency = r.value("include_deals_in_frequency", false);
        if (r.contains("rules")) {
            for (const auto& rj : r.at("rules")) {
                config.rfm.rules.push_back(parseSegmentRule(rj));
            }
        }
    }

    if (j.contains("clustering")) {
        const auto& c = j.at("clustering");
        if (c.contains("k") && !c.at("k").is_null()) {
            config.clustering.k = c.at("k").get<std::size_t>();
        }
        if (c.contains("k_range") && !c.at("k_range").is_null()) {
            const auto range = c.at("k_range").get<std::vector<std::size_t>>();
            if (range.size() != 2) throw ConfigError("k_range must be [lo, hi]");
            config.clustering.kRange = {range[0], range[1]};
        }
        config.clustering.measure = parseMeasure(c.value("measure", std::string("euclidean")));
        config.clustering.restarts = c.value("restarts", 5);
        config.clustering.gapB = c.value("B", 10);
        config.clustering.maxIter = c.value("max_iter", 300);
        config.clustering.tol = c.value("tol", 1e-6);
        const std::string init = c.value("init", std::string("random"));
        if (init == "kmeans++") config.clustering.init = KMeansInit::PlusPlus;
        else if (init != "random") throw ConfigError("clustering.init must be random or kmeans++");
    }

    if (j.contains("selection")) {
        const auto& s = j.at("selection");
        config.selection.method = s.value("method", std::string("none"));
        config.selection.threshold = s.value("threshold", 0.01);
        config.selection.folds = s.value("folds", 3);
        if (s.contains("model")) {
            config.selection.model = PredictorSpec::fromJson(s.at("model"));
        }
    }

    if (j.contains("models")) {
        for (const auto& mj : j.at("models")) {
            config.models.push_back(PredictorSpec::fromJson(mj));
        }
    }
    if (config.models.empty()) {
        config.models.push_back(PredictorSpec::gbt());
    }

    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        config.evaluation.folds = e.value("folds", 5);
        config.evaluation.repeats = e.value("repeats", 1);
        if (e.contains("balance")) config.evaluation.balance = parseBalance(e.at("balance"));
        config.evaluation.threshold = e.value("threshold", 0.5);
        if (e.contains("test_fraction") && !e.at("test_fraction").is_null()) {
            config.evaluation.testFraction = e.at("test_fraction").get<double>();
        }
    }

    if (j.contains("profile")) {
        const auto& p = j.at("profile");
        if (p.contains("relationship_values")) {
            config.profile.options.relationshipValues =
                p.at("relationship_values").get<std::vector<std::string>>();
        }
        if (p.contains("bachelor_plus")) {
            config.profile.options.bachelorPlus =
                p.at("bachelor_plus").get<std::vector<std::string>>();
        }
        config.profile.labelsPath = p.value("labels_path", std::string());
    }

    return config;
}

PipelineConfig PipelineConfig::fromJsonText(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return fromJson(j);
}

PipelineConfig loadConfig(const std::string& configJsonText, const Overrides& overrides) {
    PipelineConfig config = PipelineConfig::fromJsonText(configJsonText);
    if (overrides.outputDir) config.outputDir = *overrides.outputDir;
    if (config.outputDir.empty()) {
        if (const char* env = std::getenv("CUSTPROF_OUT")) config.outputDir = env;
    }
    if (config.outputDir.empty()) config.outputDir = "out";
    if (overrides.seed) config.seed = *overrides.seed;
    config.verbose = config.verbose || overrides.verbose;
    return config;
}

namespace {

std::vector<ColumnSpec> resolveSchema(const PipelineConfig& config) {
    if (config.input.schema == "custom") {
        if (config.input.customColumns.empty()) {
            throw ConfigError("custom schema has no columns");
        }
        return config.input.customColumns;
    }
    auto schema = schemaPreset(config.input.schema);
    for (auto& col : schema) {
        if (col.kind == ColumnKind::Date) col.dateFormat = config.input.dateFormat;
    }
    return schema;
}

Dataset loadInputDataset(const PipelineConfig& config) {
    if (config.input.path.empty()) throw ConfigError("input.path not set");
    return loadTable(config.input.path, resolveSchema(config), config.input.delimiter);
}

Dataset applyCleaning(const PipelineConfig& config, const Dataset& ds, CleaningReport* report) {
    if (!config.stages.clean || config.cleaningRules.empty()) {
        if (report) *report = CleaningReport{{}, ds.rowCount(), ds.rowCount(), {}};
        return ds;
    }
    auto [cleaned, r] = clean(ds, config.cleaningRules);
    if (report) *report = std::move(r);
    return std::move(cleaned);
}

Dataset applyImputation(const PipelineConfig& config, Dataset ds) {
    if (!config.stages.impute) return ds;
    for (const auto& spec : config.imputeSpecs) ds = impute(ds, spec);
    return ds;
}

Dataset applyEngineering(const PipelineConfig& config, Dataset ds) {
    if (!config.stages.engineer || config.recipes.empty()) return ds;
    return engineerFeatures(ds, config.recipes);
}

// Feature columns in schema order: numeric columns minus excludes, plus the
// configured categorical encodings.
FeatureMatrix encodeConfiguredFeatures(const PipelineConfig& config, const Dataset& ds) {
    std::set<std::string> exclude(config.features.exclude.begin(),
                                  config.features.exclude.end());
    exclude.insert("ID");
    exclude.insert("Response");

    std::map<std::string, ColumnEncoding> encodings;
    for (const auto& name : config.features.oneHot) {
        encodings[name] = ColumnEncoding{EncodingKind::OneHot, {}};
    }
    for (const auto& [name, order] : config.features.ordinal) {
        encodings[name] = ColumnEncoding{EncodingKind::Ordinal, order};
    }

    std::vector<std::string> columns;
    if (!config.features.include.empty()) {
        columns = config.features.include;
    } else {
        for (const auto& col : ds.schema()) {
            if (exclude.count(col.name)) continue;
            if (encodings.count(col.name)) {
                columns.push_back(col.name);
                continue;
            }
            if (col.kind == ColumnKind::Categorical || col.kind == ColumnKind::Date) continue;
            columns.push_back(col.name);
        }
    }
    if (columns.empty()) throw ConfigError("no feature columns resolved");
    return encodeFeatures(ds, columns, encodings);
}

std::vector<int> extractLabels(const Dataset& ds) {
    const int col = ds.findColumn("Response");
    if (col < 0) throw DataError("schema error: labels column 'Response' missing");
    std::vector<int> labels;
    labels.reserve(ds.rowCount());
    for (std::size_t r = 0; r < ds.rowCount(); ++r) {
        const Cell& cell = ds.cell(r, static_cast<std::size_t>(col));
        if (cellMissing(cell)) throw DataError("Response has a missing value at row " +
                                               std::to_string(r));
        const double v = cellAsReal(cell);
        if (v != 0.0 && v != 1.0) {
            throw DataError("Response must be 0/1; row " + std::to_string(r) + " has " +
                            formatReal(v));
        }
        labels.push_back(v == 1.0 ? 1 : 0);
    }
    return labels;
}

// Reads a feature-matrix CSV written by writeCsv(FeatureMatrix): row_id column
// first; a Response column, when present, is split out as labels.
std::pair<FeatureMatrix, std::vector<int>> loadFeatureCsv(const std::string& path,
                                                          char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, delimiter)) header.push_back(field);
    }
    if (header.empty() || header[0] != "row_id") {
        throw DataError("feature CSV must start with a row_id column: " + path);
    }

    int responseCol = -1;
    std::vector<std::string> names;
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i] == "Response") responseCol = static_cast<int>(i);
        else names.push_back(header[i]);
    }

    std::vector<double> values;
    std::vector<long long> ids;
    std::vector<int> labels;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::size_t i = 0;
        while (std::getline(ss, field, delimiter)) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end != field.c_str() + field.size()) {
                throw DataError("parse error at row " + std::to_string(lineNo) + ", field " +
                                std::to_string(i) + " of " + path);
            }
            if (i == 0) ids.push_back(static_cast<long long>(v));
            else if (static_cast<int>(i) == responseCol) labels.push_back(v == 1.0 ? 1 : 0);
            else values.push_back(v);
            ++i;
        }
        if (i != header.size()) {
            throw DataError("row " + std::to_string(lineNo) + " has " + std::to_string(i) +
                            " fields, header has " + std::to_string(header.size()));
        }
    }
    const std::size_t rows = ids.size();
    const std::size_t cols = names.size();
    FeatureMatrix m(rows, cols, std::move(values), std::move(names), std::move(ids));
    return {std::move(m), std::move(labels)};
}

struct PreparedFeatures {
    Dataset cleaned;          // empty when resuming from a feature CSV
    bool haveDataset = false;
    FeatureMatrix scaled;
    std::vector<int> labels;
    std::vector<std::string> selectedColumns;
    std::vector<std::string> writtenFiles;
};

// clean -> impute -> engineer -> encode -> scale -> select, writing each
// stage artifact so a later run can resume from any of them.
PreparedFeatures prepareFeatures(const PipelineConfig& config, bool needLabels,
                                 bool writeArtifacts) {
    PreparedFeatures out;

    FeatureMatrix encoded;
    if (config.input.kind == "features") {
        auto [m, labels] = loadFeatureCsv(config.input.path, config.input.delimiter);
        encoded = std::move(m);
        out.labels = std::move(labels);
        if (needLabels && out.labels.empty()) {
            throw DataError("feature CSV has no Response column: " + config.input.path);
        }
    } else {
        const Dataset raw = loadInputDataset(config);
        CleaningReport report;
        Dataset cleaned = applyCleaning(config, raw, &report);
        cleaned = applyImputation(config, std::move(cleaned));
        cleaned = applyEngineering(config, std::move(cleaned));
        if (writeArtifacts) {
            writeCsv(cleaned, outPath(config, "01_cleaned.csv"), config.input.delimiter);
            writeJsonFile(outPath(config, "01_cleaning_report.json"), report.toJson());
            out.writtenFiles.push_back(outPath(config, "01_cleaned.csv"));
            out.writtenFiles.push_back(outPath(config, "01_cleaning_report.json"));
        }
        if (needLabels) out.labels = extractLabels(cleaned);
        encoded = encodeConfiguredFeatures(config, cleaned);
        out.cleaned = std::move(cleaned);
        out.haveDataset = true;
        if (writeArtifacts) {
            // Features plus labels in one artifact so evaluate can resume here.
            FeatureMatrix withLabels = encoded;
            if (needLabels) {
                std::vector<double> values;
                values.reserve(encoded.rowCount() * (encoded.columnCount() + 1));
                for (std::size_t r = 0; r < encoded.rowCount(); ++r) {
                    const auto row = encoded.row(r);
                    values.insert(values.end(), row.begin(), row.end());
                    values.push_back(static_cast<double>(out.labels[r]));
                }
                auto names = encoded.columnNames();
                names.push_back("Response");
                withLabels = FeatureMatrix(encoded.rowCount(), encoded.columnCount() + 1,
                                           std::move(values), std::move(names), encoded.rowIds());
            }
            writeCsv(withLabels, outPath(config, "02_features.csv"), config.input.delimiter);
            out.writtenFiles.push_back(outPath(config, "02_features.csv"));
        }
    }

    ScalingParams params;
    if (config.stages.scale) {
        const auto policy = config.features.dropConstant ? ConstantColumnPolicy::Drop
                                                         : ConstantColumnPolicy::Error;
        auto [scaled, p] = scaleMinMax(encoded, config.scaleTMin, config.scaleTMax, policy);
        out.scaled = std::move(scaled);
        params = std::move(p);
    } else {
        out.scaled = std::move(encoded);
    }
    if (writeArtifacts) {
        FeatureMatrix scaledOut = out.scaled;
        if (needLabels) {
            std::vector<double> values;
            values.reserve(out.scaled.rowCount() * (out.scaled.columnCount() + 1));
            for (std::size_t r = 0; r < out.scaled.rowCount(); ++r) {
                const auto row = out.scaled.row(r);
                values.insert(values.end(), row.begin(), row.end());
                values.push_back(static_cast<double>(out.labels[r]));
            }
            auto names = out.scaled.columnNames();
            names.push_back("Response");
            scaledOut = FeatureMatrix(out.scaled.rowCount(), out.scaled.columnCount() + 1,
                                      std::move(values), std::move(names), out.scaled.rowIds());
        }
        writeCsv(scaledOut, outPath(config, "03_scaled.csv"), config.input.delimiter);
        out.writtenFiles.push_back(outPath(config, "03_scaled.csv"));
        if (config.stages.scale) {
            json scalingJson = json::array();
            for (std::size_t i = 0; i < params.columns.size(); ++i) {
                const auto& p = params.params[i];
                scalingJson.push_back({{"column", params.columns[i]},
                                       {"r_min", p.rMin},
                                       {"r_max", p.rMax},
                                       {"t_min", p.tMin},
                                       {"t_max", p.tMax},
                                       {"sc", p.sc},
                                       {"of", p.of}});
            }
            writeJsonFile(outPath(config, "03_scaling.json"), scalingJson);
            out.writtenFiles.push_back(outPath(config, "03_scaling.json"));
        }
    }

    if (config.stages.select && config.selection.method != "none") {
        std::vector<std::string> selected;
        if (config.selection.method == "filter") {
            selected = selectFeaturesFilter(out.scaled, config.selection.threshold);
        } else if (config.selection.method == "wrapper") {
            if (!needLabels) throw ConfigError("wrapper selection needs labels");
            const PredictorSpec spec =
                config.selection.model ? *config.selection.model : PredictorSpec::logreg();
            selected = selectFeaturesWrapper(out.scaled, out.labels, spec,
                                             config.selection.folds, mixSeed(config.seed, 0x5e1));
        } else {
            throw ConfigError("unknown selection method '" + config.selection.method + "'");
        }
        if (selected.empty()) throw ConfigError("feature selection removed every column");
        std::vector<std::size_t> cols;
        for (const auto& name : selected) {
            cols.push_back(static_cast<std::size_t>(out.scaled.findColumn(name)));
        }
        out.scaled = out.scaled.selectColumns(cols);
        out.selectedColumns = selected;
        if (writeArtifacts) {
            writeJsonFile(outPath(config, "04_selected_features.json"),
                          json{{"method", config.selection.method}, {"columns", selected}});
            out.writtenFiles.push_back(outPath(config, "04_selected_features.json"));
        }
    }

    return out;
}

// Shared by train/evaluate: emits the flag-only mislabeled-row report.
void maybeFlagMislabeled(const PipelineConfig& config, const PreparedFeatures& prep,
                         StageResult& result) {
    if (!config.mislabeledCheck.enabled) return;
    const PredictorSpec baseline = config.mislabeledCheck.model
                                       ? *config.mislabeledCheck.model
                                       : PredictorSpec::logreg();
    const auto flagged = flagMislabeled(prep.scaled, prep.labels, baseline,
                                        config.mislabeledCheck.folds,
                                        mixSeed(config.seed, 0xf1a6));
    json ids = json::array();
    for (std::size_t row : flagged) ids.push_back(prep.scaled.rowIds()[row]);
    writeJsonFile(outPath(config, "mislabeled_report.json"),
                  json{{"model", baseline.name()},
                       {"folds", config.mislabeledCheck.folds},
                       {"flagged", flagged.size()},
                       {"customer_ids", std::move(ids)}});
    result.writtenFiles.push_back(outPath(config, "mislabeled_report.json"));
}

std::string labelsCsv(const std::vector<long long>& ids, const std::vector<int>& labels) {
    std::ostringstream out;
    out << "customer_id,label\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] << '\n';
    return out.str();
}

std::string profileCsv(const SegmentProfile& profile) {
    std::ostringstream out;
    out << "label,size,share,column,mean,median,min,max\n";
    for (const auto& c : profile.clusters) {
        for (const auto& [name, s] : c.numeric) {
            out << c.label << ',' << c.size << ',' << formatReal(c.share) << ',' << name << ','
                << formatReal(s.mean) << ',' << formatReal(s.median) << ',' << formatReal(s.min)
                << ',' << formatReal(s.max) << '\n';
        }
    }
    return out.str();
}

}  // namespace

StageResult runClean(const PipelineConfig& config) {
    ensureOutputDir(config);
    const Dataset raw = loadInputDataset(config);
    CleaningReport report;
    Dataset cleaned = applyCleaning(config, raw, &report);
    cleaned = applyImputation(config, std::move(cleaned));

    StageResult result;
    const std::string csvPath = outPath(config, "cleaned.csv");
    const std::string reportPath = outPath(config, "cleaning_report.json");
    writeCsv(cleaned, csvPath, config.input.delimiter);
    writeJsonFile(reportPath, report.toJson());
    result.writtenFiles = {csvPath, reportPath};
    result.summary = "cleaned " + std::to_string(report.rowsBefore) + " -> " +
                     std::to_string(report.rowsAfter) + " rows";
    return result;
}

StageResult runRfm(const PipelineConfig& config) {
    ensureOutputDir(config);
    const Dataset ds = loadInputDataset(config);

    RfmOptions options;
    options.includeDealsInFrequency = config.rfm.includeDealsInFrequency;
    auto records = computeRfm(ds, options);
    records = scoreRfm(std::move(records), config.rfm.bins);
    records = labelSegments(std::move(records),
                            config.rfm.rules.empty() ? defaultSegmentRules() : config.rfm.rules);

    std::map<std::string, std::size_t> segmentCounts;
    std::map<std::string, std::size_t> nameCounts;
    for (const auto& r : records) {
        ++segmentCounts[r.segmentCode];
        ++nameCounts[r.segmentName];
    }

    StageResult result;
    const std::string csvPath = outPath(config, "rfm.csv");
    const std::string summaryPath = outPath(config, "rfm_summary.json");
    writeTextFile(csvPath, rfmCsv(records));
    writeJsonFile(summaryPath, json{{"total", records.size()},
                                    {"segments", segmentCounts},
                                    {"names", nameCounts}});
    result.writtenFiles = {csvPath, summaryPath};
    result.summary = "rfm scored " + std::to_string(records.size()) + " customers";
    return result;
}

StageResult runCluster(const PipelineConfig& config) {
    ensureOutputDir(config);
    if (!config.clustering.k && !config.clustering.kRange) {
        throw ConfigError("clustering needs k or k_range");
    }

    PreparedFeatures prep = prepareFeatures(config, /*needLabels=*/false,
                                            /*writeArtifacts=*/false);
    const FeatureMatrix& m = prep.scaled;

    StageResult result;
    auto writeClustering = [&](const std::string& tag, const KMeansModel& model) {
        const auto labels = assign(model, m);
        const std::string labelsPath =
            outPath(config, tag.empty() ? "labels.csv" : "labels_" + tag + ".csv");
        writeTextFile(labelsPath, labelsCsv(m.rowIds(), labels));
        result.writtenFiles.push_back(labelsPath);

        std::ostringstream centroidCsv;
        centroidCsv << "cluster";
        for (const auto& name : m.columnNames()) centroidCsv << ',' << name;
        centroidCsv << '\n';
        for (std::size_t c = 0; c < model.centroids.size(); ++c) {
            centroidCsv << c;
            for (double v : model.centroids[c]) centroidCsv << ',' << formatReal(v);
            centroidCsv << '\n';
        }
        const std::string centroidPath =
            outPath(config, tag.empty() ? "centroids.csv" : "centroids_" + tag + ".csv");
        writeTextFile(centroidPath, centroidCsv.str());
        result.writtenFiles.push_back(centroidPath);

        if (prep.haveDataset) {
            const SegmentProfile profile =
                profileSegments(prep.cleaned, labels, config.profile.options);
            const std::string profilePath =
                outPath(config, tag.empty() ? "profile.json" : "profile_" + tag + ".json");
            writeJsonFile(profilePath, profile.toJson());
            result.writtenFiles.push_back(profilePath);
        }
    };

    if (config.clustering.k) {
        const KMeansModel model = kmeansFit(m, *config.clustering.k, config.clustering.measure,
                                            config.seed, config.clustering.maxIter,
                                            config.clustering.tol, config.clustering.init);
        writeClustering("", model);
        result.summary = "clustered at k=" + std::to_string(*config.clustering.k);
        return result;
    }

    const auto [kLo, kHi] = *config.clustering.kRange;
    const ElbowResult elbowResult = elbow(m, kLo, kHi, config.clustering.measure, config.seed,
                                          config.clustering.restarts, config.clustering.init);
    const GapResult gapResult = gapStatistic(m, kLo, kHi, config.clustering.gapB,
                                             config.clustering.measure, config.seed,
                                             config.clustering.init);

    ValidityReport validity;
    std::optional<std::size_t> bestSilK;
    double bestSil = -2.0;
    for (std::size_t i = 0; i < elbowResult.ks.size(); ++i) {
        ValidityReport::Entry entry;
        entry.k = elbowResult.ks[i];
        entry.wcss = elbowResult.wcss[i];
        if (entry.k >= 2) {
            const auto labels = assign(elbowResult.models[i], m);
            const auto sil = silhouette(m, labels, config.clustering.measure);
            entry.silhouette = sil.mean;
            if (sil.mean > bestSil) {
                bestSil = sil.mean;
                bestSilK = entry.k;
            }
        }
        if (gapResult.valid[i]) {
            entry.gap = gapResult.gap[i];
            entry.gapSd = gapResult.sd[i];
        }
        validity.curve.push_back(entry);
    }
    validity.chosenElbow = elbowResult.kneeK;
    validity.chosenSilhouette = bestSilK;
    validity.chosenGap = gapResult.chosenK;

    writeJsonFile(outPath(config, "validity.json"), validity.toJson());
    result.writtenFiles.push_back(outPath(config, "validity.json"));

    std::ostringstream curveCsv;
    curveCsv << "k,wcss,silhouette,gap,gap_sd\n";
    for (const auto& e : validity.curve) {
        curveCsv << e.k << ',' << formatReal(e.wcss) << ',';
        if (e.silhouette) curveCsv << formatReal(*e.silhouette);
        curveCsv << ',';
        if (e.gap) curveCsv << formatReal(*e.gap);
        curveCsv << ',';
        if (e.gapSd) curveCsv << formatReal(*e.gapSd);
        curveCsv << '\n';
    }
    writeTextFile(outPath(config, "validity_curve.csv"), curveCsv.str());
    result.writtenFiles.push_back(outPath(config, "validity_curve.csv"));

    auto modelAt = [&](std::size_t k) -> const KMeansModel& {
        for (std::size_t i = 0; i < elbowResult.ks.size(); ++i) {
            if (elbowResult.ks[i] == k) return elbowResult.models[i];
        }
        throw ConfigError("chosen k outside the fitted range");
    };
    std::ostringstream summary;
    summary << "chosen k:";
    if (validity.chosenElbow) {
        writeClustering("elbow", modelAt(*validity.chosenElbow));
        summary << " elbow=" << *validity.chosenElbow;
    }
    if (validity.chosenSilhouette) {
        writeClustering("silhouette", modelAt(*validity.chosenSilhouette));
        summary << " silhouette=" << *validity.chosenSilhouette;
    }
    if (validity.chosenGap) {
        writeClustering("gap", modelAt(*validity.chosenGap));
        summary << " gap=" << *validity.chosenGap;
    }
    result.summary = summary.str();
    return result;
}

StageResult runTrain(const PipelineConfig& config) {
    ensureOutputDir(config);
    PreparedFeatures prep = prepareFeatures(config, /*needLabels=*/true, /*writeArtifacts=*/true);

    StageResult result;
    result.writtenFiles = prep.writtenFiles;
    maybeFlagMislabeled(config, prep, result);

    FeatureMatrix trainX = prep.scaled;
    std::vector<int> trainY = prep.labels;
    balanceTrainingSet(trainX, trainY, config.evaluation.balance, mixSeed(config.seed, 0xba1));

    json trainReport = json::array();
    for (const auto& spec : config.models) {
        const Predictor model = Predictor::fit(spec, trainX, trainY);
        const std::string modelPath = outPath(config, "model_" + spec.name() + ".json");
        writeJsonFile(modelPath, model.toJson());
        result.writtenFiles.push_back(modelPath);

        if (!model.lossTrace().empty()) {
            std::ostringstream lossCsv;
            lossCsv << "stage,loss\n";
            for (std::size_t i = 0; i < model.lossTrace().size(); ++i) {
                lossCsv << i << ',' << formatReal(model.lossTrace()[i]) << '\n';
            }
            const std::string lossPath = outPath(config, "loss_" + spec.name() + ".csv");
            writeTextFile(lossPath, lossCsv.str());
            result.writtenFiles.push_back(lossPath);
        }

        const auto preds = model.predict(trainX, config.evaluation.threshold);
        std::vector<int> yHat;
        yHat.reserve(preds.size());
        for (const auto& p : preds) yHat.push_back(p.label);
        json entry = evaluate(trainY, yHat, "train").toJson();
        entry["model"] = spec.name();
        trainReport.push_back(std::move(entry));
    }
    writeJsonFile(outPath(config, "train_report.json"), trainReport);
    result.writtenFiles.push_back(outPath(config, "train_report.json"));
    result.summary = "trained " + std::to_string(config.models.size()) + " model(s) on " +
                     std::to_string(trainX.rowCount()) + " rows";
    return result;
}

StageResult runEvaluate(const PipelineConfig& config) {
    ensureOutputDir(config);
    PreparedFeatures prep = prepareFeatures(config, /*needLabels=*/true, /*writeArtifacts=*/true);

    StageResult result;
    result.writtenFiles = prep.writtenFiles;
    maybeFlagMislabeled(config, prep, result);

    const FeatureMatrix& m = prep.scaled;
    const std::vector<int>& labels = prep.labels;

    json evaluation;
    ComparisonReport comparison;

    if (config.evaluation.testFraction) {
        // Single-split mode mirroring a fixed train/test protocol.
        SplitSpec splitSpec{*config.evaluation.testFraction, true, config.seed};
        Split parts = split(m, labels, splitSpec);
        balanceTrainingSet(parts.trainX, parts.trainY, config.evaluation.balance,
                           mixSeed(config.seed, 0xba1));
        json folds = json::array();
        std::vector<ModelScore> scores;
        for (const auto& spec : config.models) {
            const Predictor model = Predictor::fit(spec, parts.trainX, parts.trainY);
            auto harden = [&](const FeatureMatrix& x, const std::vector<int>& y,
                              const char* tag) {
                const auto preds = model.predict(x, config.evaluation.threshold);
                std::vector<int> yHat;
                yHat.reserve(preds.size());
                for (const auto& p : preds) yHat.push_back(p.label);
                json entry = evaluate(y, yHat, tag).toJson();
                entry["model"] = spec.name();
                return entry;
            };
            const json trainEntry = harden(parts.trainX, parts.trainY, "train");
            const json testEntry = harden(parts.testX, parts.testY, "test");
            ModelScore score;
            score.name = spec.name();
            score.meanTestMcc = testEntry.at("mcc").get<double>();
            score.minTestMcc = score.meanTestMcc;
            score.maxTestMcc = score.meanTestMcc;
            score.meanTestAccuracy = testEntry.at("accuracy").get<double>();
            score.meanTrainMcc = trainEntry.at("mcc").get<double>();
            score.meanTrainAccuracy = trainEntry.at("accuracy").get<double>();
            scores.push_back(score);
            folds.push_back(trainEntry);
            folds.push_back(testEntry);
        }
        std::vector<std::size_t> order(scores.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a].meanTestMcc != scores[b].meanTestMcc) {
                return scores[a].meanTestMcc > scores[b].meanTestMcc;
            }
            if (scores[a].meanTestAccuracy != scores[b].meanTestAccuracy) {
                return scores[a].meanTestAccuracy > scores[b].meanTestAccuracy;
            }
            return a < b;
        });
        comparison.ranking = order;
        for (std::size_t i : order) comparison.ranked.push_back(scores[i]);
        evaluation["reports"] = std::move(folds);
    } else {
        json folds = json::array();
        if (config.models.size() >= 2) {
            Protocol protocol{config.evaluation.folds, config.seed, config.evaluation.balance,
                              config.evaluation.repeats, config.evaluation.threshold};
            comparison = compareModels(config.models, m, labels, protocol);
        }
        for (const auto& spec : config.models) {
            for (int rep = 0; rep < config.evaluation.repeats; ++rep) {
                const auto reports =
                    crossValidate(spec, m, labels, config.evaluation.folds,
                                  mixSeed(config.seed, 0x5eed, rep), config.evaluation.balance,
                                  config.evaluation.threshold);
                for (const auto& r : reports) {
                    json entry = r.toJson();
                    entry["model"] = spec.name();
                    entry["repeat"] = rep;
                    folds.push_back(std::move(entry));
                }
            }
        }
        evaluation["reports"] = std::move(folds);
        if (config.models.size() == 1) {
            // Summarize the lone model so the headline numbers are one lookup away.
            double testAcc = 0.0, testMcc = 0.0, trainMcc = 0.0, trainAcc = 0.0;
            std::size_t nTest = 0, nTrain = 0;
            for (const auto& entry : evaluation["reports"]) {
                if (entry.at("split") == "test") {
                    testAcc += entry.at("accuracy").get<double>();
                    testMcc += entry.at("mcc").get<double>();
                    ++nTest;
                } else {
                    trainAcc += entry.at("accuracy").get<double>();
                    trainMcc += entry.at("mcc").get<double>();
                    ++nTrain;
                }
            }
            evaluation["summary"] = {
                {"model", config.models[0].name()},
                {"mean_test_accuracy", nTest ? testAcc / static_cast<double>(nTest) : 0.0},
                {"mean_test_mcc", nTest ? testMcc / static_cast<double>(nTest) : 0.0},
                {"mean_train_accuracy", nTrain ? trainAcc / static_cast<double>(nTrain) : 0.0},
                {"mean_train_mcc", nTrain ? trainMcc / static_cast<double>(nTrain) : 0.0}};
        }
    }

    if (!comparison.ranked.empty()) {
        evaluation["comparison"] = comparison.toJson();
        writeTextFile(outPath(config, "leaderboard.csv"), comparison.toLeaderboardCsv());
        result.writtenFiles.push_back(outPath(config, "leaderboard.csv"));
    }
    writeJsonFile(outPath(config, "evaluation.json"), evaluation);
    result.writtenFiles.push_back(outPath(config, "evaluation.json"));

    std::ostringstream summary;
    summary << "evaluated " << config.models.size() << " model(s)";
    if (!comparison.ranked.empty()) summary << "; best: " << comparison.ranked.front().name;
    result.summary = summary.str();
    return result;
}

StageResult runProfile(const PipelineConfig& config) {
    ensureOutputDir(config);
    if (config.profile.labelsPath.empty()) {
        throw ConfigError("profile needs profile.labels_path");
    }
    const Dataset ds = loadInputDataset(config);

    std::ifstream in(config.profile.labelsPath, std::ios::binary);
    if (!in) throw DataError("cannot open labels file: " + config.profile.labelsPath);
    std::string line;
    if (!std::getline(in, line)) throw DataError("labels file is empty");
    std::map<long long, int> labelById;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DataError("labels file needs customer_id,label rows");
        labelById[std::stoll(line.substr(0, comma))] = std::stoi(line.substr(comma + 1));
    }

    const int idCol = ds.findColumn("ID");
    if (idCol < 0) throw DataError("schema error: profile needs an ID column");
    std::vector<int> labels(ds.rowCount());
    std::vector<long long> missing;
    for (std::size_t r = 0; r < ds.rowCount(); ++r) {
        const long long id = std::get<long long>(ds.cell(r, static_cast<std::size_t>(idCol)));
        auto it = labelById.find(id);
        if (it == labelById.end()) {
            if (missing.size() < 5) missing.push_back(id);
            continue;
        }
        labels[r] = it->second;
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "labels file does not cover dataset IDs:";
        for (long long id : missing) msg << ' ' << id;
        throw DataError(msg.str());
    }

    const SegmentProfile profile = profileSegments(ds, labels, config.profile.options);

    StageResult result;
    writeJsonFile(outPath(config, "profile.json"), profile.toJson());
    writeTextFile(outPath(config, "profile_clusters.csv"), profileCsv(profile));
    result.writtenFiles = {outPath(config, "profile.json"),
                           outPath(config, "profile_clusters.csv")};
    result.summary = "profiled " + std::to_string(profile.clusters.size()) + " cluster(s)";
    return result;
}

StageResult runCommand(const std::string& command, const PipelineConfig& config) {
    if (command == "clean") return runClean(config);
    if (command == "rfm") return runRfm(config);
    if (command == "cluster") return runCluster(config);
    if (command == "train") return runTrain(config);
    if (command == "evaluate") return runEvaluate(config);
    if (command == "profile") return runProfile(config);
    throw ConfigError("unknown subcommand '" + command + "'");
}

}  // namespace custprof
