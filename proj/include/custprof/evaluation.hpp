#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "custprof/models.hpp"
#include "custprof/table.hpp"

#include <nlohmann/json_fwd.hpp>

namespace custprof {

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
};

// Positive class = 1.
ConfusionCounts confusion(const std::vector<int>& yTrue, const std::vector<int>& yPred);

// (tp*tn - fp*fn) / sqrt((tp+fp)(tp+fn)(tn+fp)(tn+fn)); 0 when any factor is 0.
double mcc(const ConfusionCounts& c);

struct BasicMetrics {
    double accuracy = 0.0;
    double precisionPos = 0.0;
    double recallPos = 0.0;
    double f1Pos = 0.0;
    bool precisionUndefined = false;  // 0/0 reported as 0 with a flag
    bool recallUndefined = false;
    bool f1Undefined = false;
};

BasicMetrics basicMetrics(const ConfusionCounts& c);

struct EvalReport {
    ConfusionCounts counts;
    double accuracy = 0.0;
    double precisionPos = 0.0;
    double recallPos = 0.0;
    double f1Pos = 0.0;
    double mcc = 0.0;
    std::string splitTag;  // "train" or "test"
    int fold = -1;         // -1 for a single split

    nlohmann::json toJson() const;
};

EvalReport evaluate(const std::vector<int>& yTrue, const std::vector<int>& yPred,
                    std::string splitTag, int fold = -1);

struct BalanceSpec {
    enum class Method { None, Smote, Undersample };
    Method method = Method::None;
    int k = 5;           // smote neighbors
    double ratio = 1.0;  // target minority:majority ratio after balancing

    static BalanceSpec none() { return {}; }
    static BalanceSpec smote(int k = 5, double ratio = 1.0);
    static BalanceSpec undersample(double ratio = 1.0);
};

// Balances a training set; evaluation rows are never touched by this.
void balanceTrainingSet(FeatureMatrix& x, std::vector<int>& y, const BalanceSpec& balance,
                        std::uint64_t seed);

// Stratified fold assignment (round-robin per class after a seeded shuffle).
std::vector<int> stratifiedFolds(const std::vector<int>& labels, int folds, std::uint64_t seed);

// Per-fold train/test reports under stratified CV. Balancing is applied to
// the training portion of each fold only; synthetic rows never reach the
// evaluation side. Deterministic per seed.
std::vector<EvalReport> crossValidate(const PredictorSpec& spec, const FeatureMatrix& m,
                                      const std::vector<int>& labels, int folds,
                                      std::uint64_t seed, const BalanceSpec& balance = {},
                                      double threshold = 0.5);

struct Protocol {
    int folds = 5;
    std::uint64_t seed = 0;
    BalanceSpec balance;
    int repeats = 1;
    double threshold = 0.5;
};

struct ModelScore {
    std::string name;
    double meanTestMcc = 0.0;
    double sdTestMcc = 0.0;
    double minTestMcc = 0.0;
    double maxTestMcc = 0.0;
    double meanTestAccuracy = 0.0;
    double sdTestAccuracy = 0.0;
    double meanTrainMcc = 0.0;
    double meanTrainAccuracy = 0.0;
};

struct ComparisonReport {
    std::vector<ModelScore> ranked;  // by mean test MCC desc, ties by accuracy then spec order
    std::vector<std::size_t> ranking;  // rank position -> index into the spec list

    nlohmann::json toJson() const;
    std::string toLeaderboardCsv() const;
};

// Every spec is evaluated under the identical fold partition per repeat.
ComparisonReport compareModels(const std::vector<PredictorSpec>& specs, const FeatureMatrix& m,
                               const std::vector<int>& labels, const Protocol& protocol);

}  // namespace custprof
