#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "custprof/table.hpp"

#include <nlohmann/json_fwd.hpp>

namespace custprof {

struct PredictorSpec;  // models.hpp

enum class CleanAction { DropRow, FlagOnly };

struct CleaningRule {
    enum class Kind { DedupOnKey, RangeBound, QuantileFence, ImpossibleAge };

    Kind kind = Kind::DedupOnKey;
    std::string column;
    CleanAction action = CleanAction::DropRow;
    // range_bound
    double min = 0.0;
    double max = 0.0;
    // quantile_fence
    double kIqr = 1.5;
    // impossible_age
    int referenceYear = 0;
    int maxAge = 100;

    static CleaningRule dedupOnKey(std::string column, CleanAction action = CleanAction::DropRow);
    static CleaningRule rangeBound(std::string column, double min, double max,
                                   CleanAction action = CleanAction::DropRow);
    static CleaningRule quantileFence(std::string column, double kIqr,
                                      CleanAction action = CleanAction::FlagOnly);
    static CleaningRule impossibleAge(std::string birthColumn, int referenceYear, int maxAge,
                                      CleanAction action = CleanAction::DropRow);

    std::string describe() const;
};

struct RuleOutcome {
    std::string rule;
    std::size_t matched = 0;
    std::size_t dropped = 0;
};

struct CleaningReport {
    std::vector<RuleOutcome> perRule;
    std::size_t rowsBefore = 0;
    std::size_t rowsAfter = 0;
    std::vector<std::size_t> flaggedRows;  // surviving-row indices flagged by flag_only rules

    nlohmann::json toJson() const;
};

// Applies the rules in order; rows dropped by an earlier rule are not seen by
// later ones. Deterministic; dedup keeps the first occurrence of each key.
std::pair<Dataset, CleaningReport> clean(const Dataset& ds,
                                         const std::vector<CleaningRule>& rules);

struct ImputeSpec {
    enum class Strategy { Mean, Median, Knn };
    std::string column;
    Strategy strategy = Strategy::Mean;
    int k = 5;                                  // knn only
    std::vector<std::string> distanceColumns;   // knn only
};

// Fills every missing cell of the given numeric column; non-missing cells are
// untouched. knn uses the mean of the k nearest complete rows by Euclidean
// distance over the (complete) distance columns.
Dataset impute(const Dataset& ds, const ImputeSpec& spec);

enum class ConstantColumnPolicy { Error, Drop };

// x_s = sc * x_u + of per column; column minima map exactly to tMin and maxima
// to tMax. Constant columns are rejected or dropped per policy.
std::pair<FeatureMatrix, ScalingParams> scaleMinMax(
    const FeatureMatrix& m, double tMin, double tMax,
    ConstantColumnPolicy policy = ConstantColumnPolicy::Error);

FeatureMatrix unscale(const FeatureMatrix& m, const ScalingParams& params);

struct Recipe {
    enum class Kind { Sum, YearDiff };
    std::string name;
    Kind kind = Kind::Sum;
    std::vector<std::string> columns;          // Sum: columns to add; YearDiff: the year column
    std::optional<int> referenceYear;          // YearDiff; defaults to max year of Dt_Customer

    static Recipe age(std::optional<int> referenceYear = std::nullopt);
    static Recipe children();
    static Recipe totalSpend();
    static Recipe totalPurchases();
    static Recipe builtin(const std::string& name);
};

// Appends derived numeric columns. Errors on a name collision with an
// existing column.
Dataset engineerFeatures(const Dataset& ds, const std::vector<Recipe>& recipes);

struct SplitSpec {
    double testFraction = 0.25;
    bool stratify = true;
    std::uint64_t seed = 0;
};

struct Split {
    FeatureMatrix trainX;
    std::vector<int> trainY;
    FeatureMatrix testX;
    std::vector<int> testY;
};

// Seeded shuffle split; test gets floor(n * fraction) rows (per class when
// stratified). Row order within each part follows the source matrix.
Split split(const FeatureMatrix& m, const std::vector<int>& labels, const SplitSpec& spec);

// Synthetic minority rows x + lambda * (x_nn - x) for seeded-random minority
// rows x, one of their k Euclidean nearest minority neighbors x_nn, and
// seeded-uniform lambda in [0, 1].
FeatureMatrix smote(const FeatureMatrix& minority, int k, std::size_t nSynthetic,
                    std::uint64_t seed);

// Seeded uniform sample without replacement, source row order preserved.
FeatureMatrix undersample(const FeatureMatrix& majority, std::size_t keep, std::uint64_t seed);

// Columns whose population variance exceeds the threshold, in original order.
std::vector<std::string> selectFeaturesFilter(const FeatureMatrix& m, double threshold);

// Greedy forward selection maximizing mean cross-validated test MCC; stops
// when no addition improves by more than 1e-6. Ties break to the lower column
// index. Deterministic per seed.
std::vector<std::string> selectFeaturesWrapper(const FeatureMatrix& m,
                                               const std::vector<int>& labels,
                                               const PredictorSpec& modelSpec, int folds,
                                               std::uint64_t seed);

// Flag-only mislabeled-data report: rows whose out-of-fold prediction under a
// cross-validated baseline disagrees with their label. Nothing is dropped;
// the caller decides what to do with the flags.
std::vector<std::size_t> flagMislabeled(const FeatureMatrix& m, const std::vector<int>& labels,
                                        const PredictorSpec& baseline, int folds,
                                        std::uint64_t seed);

}  // namespace custprof
