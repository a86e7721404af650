#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "custprof/clustering.hpp"
#include "custprof/evaluation.hpp"
#include "custprof/models.hpp"
#include "custprof/preprocess.hpp"
#include "custprof/rfm.hpp"
#include "custprof/table.hpp"

#include <nlohmann/json_fwd.hpp>

namespace custprof {

// One JSON document drives every subcommand; flags override config scalars.
struct PipelineConfig {
    struct Input {
        std::string path;
        char delimiter = ',';
        std::string schema = "merged";            // table2 | table3 | merged | custom
        std::vector<ColumnSpec> customColumns;    // schema == custom
        std::string kind = "dataset";             // dataset | features (resume from a matrix CSV)
        std::string dateFormat = "YYYY-MM-DD";
    };

    struct Stages {
        bool clean = true;
        bool impute = true;
        bool engineer = true;
        bool scale = true;
        bool select = true;
    };

    struct Features {
        std::vector<std::string> include;  // empty = all numeric columns minus excludes
        std::vector<std::string> exclude;
        std::vector<std::string> oneHot;
        std::map<std::string, std::vector<std::string>> ordinal;
        bool dropConstant = true;
    };

    struct Clustering {
        std::optional<std::size_t> k;
        std::optional<std::pair<std::size_t, std::size_t>> kRange;
        Measure measure = Measure::Euclidean;
        std::size_t restarts = 5;
        std::size_t gapB = 10;
        std::size_t maxIter = 300;
        double tol = 1e-6;
        KMeansInit init = KMeansInit::Uniform;  // "kmeans++" opts into D^2 seeding
    };

    struct Selection {
        std::string method = "none";  // none | filter | wrapper
        double threshold = 0.01;
        int folds = 3;
        std::optional<PredictorSpec> model;  // wrapper; defaults to logreg
    };

    struct Evaluation {
        int folds = 5;
        int repeats = 1;
        BalanceSpec balance = BalanceSpec::smote();
        double threshold = 0.5;
        std::optional<double> testFraction;  // single-split mode mirroring the source protocol
    };

    struct Rfm {
        int bins = 5;
        bool includeDealsInFrequency = false;
        std::vector<SegmentRule> rules;  // empty = default table
    };

    struct Profile {
        ProfileOptions options;
        std::string labelsPath;
    };

    // Flag-only wrapping cleanup: report rows a cross-validated baseline
    // misclassifies; rows are never dropped on label evidence.
    struct MislabeledCheck {
        bool enabled = false;
        int folds = 5;
        std::optional<PredictorSpec> model;  // defaults to logreg
    };

    int version = 1;
    Input input;
    std::string outputDir;
    std::uint64_t seed = 0;
    bool verbose = false;

    Stages stages;
    std::vector<CleaningRule> cleaningRules;
    MislabeledCheck mislabeledCheck;
    std::vector<ImputeSpec> imputeSpecs;
    std::vector<Recipe> recipes;
    Features features;
    double scaleTMin = 0.0;
    double scaleTMax = 1.0;
    Rfm rfm;
    Clustering clustering;
    Selection selection;
    std::vector<PredictorSpec> models;
    Evaluation evaluation;
    Profile profile;

    static PipelineConfig fromJson(const nlohmann::json& j);
    static PipelineConfig fromJsonText(const std::string& text);
};

// Applies --out / --seed / CUSTPROF_OUT on top of the parsed config.
struct Overrides {
    std::optional<std::string> outputDir;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
};

struct StageResult {
    std::vector<std::string> writtenFiles;
    std::string summary;
};

StageResult runClean(const PipelineConfig& config);
StageResult runRfm(const PipelineConfig& config);
StageResult runCluster(const PipelineConfig& config);
StageResult runTrain(const PipelineConfig& config);
StageResult runEvaluate(const PipelineConfig& config);
StageResult runProfile(const PipelineConfig& config);

// Dispatch by subcommand name; the surface the C API and CLI sit on.
StageResult runCommand(const std::string& command, const PipelineConfig& config);
PipelineConfig loadConfig(const std::string& configJsonText, const Overrides& overrides);

}  // namespace custprof
