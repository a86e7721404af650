#include <algorithm>
#include <set>

#include "custprof/errors.hpp"
#include "custprof/evaluation.hpp"
#include "custprof/preprocess.hpp"

namespace custprof {

namespace {

double meanTestMcc(const std::vector<EvalReport>& reports) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : reports) {
        if (r.splitTag == "test") {
            sum += r.mcc;
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

std::vector<std::string> selectFeaturesWrapper(const FeatureMatrix& m,
                                               const std::vector<int>& labels,
                                               const PredictorSpec& modelSpec, int folds,
                                               std::uint64_t seed) {
    if (folds < 2) throw ConfigError("wrapper selection: folds must be >= 2");
    if (m.columnCount() == 0) return {};
    const std::set<int> distinctLabels(labels.begin(), labels.end());
    if (distinctLabels.size() < 2) {
        throw ConfigError("wrapper selection: labels contain a single class");
    }

    std::vector<std::size_t> selected;
    std::vector<bool> inSet(m.columnCount(), false);
    double bestScore = -2.0;  // below any reachable MCC

    // The same seed (hence the same fold partition) scores every candidate,
    // so additions compete on identical folds.
    while (selected.size() < m.columnCount()) {
        int bestCandidate = -1;
        double bestCandidateScore = bestScore;
        for (std::size_t c = 0; c < m.columnCount(); ++c) {
            if (inSet[c]) continue;
            std::vector<std::size_t> trial(selected);
            trial.push_back(c);
            std::sort(trial.begin(), trial.end());
            const FeatureMatrix sub = m.selectColumns(trial);
            const double score =
                meanTestMcc(crossValidate(modelSpec, sub, labels, folds, seed));
            if (score > bestCandidateScore + 1e-6) {
                bestCandidateScore = score;
                bestCandidate = static_cast<int>(c);
            }
        }
        if (bestCandidate < 0) break;  // no addition improves by > 1e-6
        selected.push_back(static_cast<std::size_t>(bestCandidate));
        inSet[static_cast<std::size_t>(bestCandidate)] = true;
        bestScore = bestCandidateScore;
    }

    std::sort(selected.begin(), selected.end());
    std::vector<std::string> out;
    out.reserve(selected.size());
    for (std::size_t c : selected) out.push_back(m.columnNames()[c]);
    return out;
}

std::vector<std::size_t> flagMislabeled(const FeatureMatrix& m, const std::vector<int>& labels,
                                        const PredictorSpec& baseline, int folds,
                                        std::uint64_t seed) {
    if (labels.size() != m.rowCount()) throw ConfigError("flag_mislabeled: labels/rows mismatch");
    const auto foldOf = stratifiedFolds(labels, folds, seed);

    std::vector<std::size_t> flagged;
    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> trainRows, testRows;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            (foldOf[i] == f ? testRows : trainRows).push_back(i);
        }
        if (testRows.empty() || trainRows.empty()) continue;
        std::vector<int> trainY;
        trainY.reserve(trainRows.size());
        for (std::size_t i : trainRows) trainY.push_back(labels[i]);
        const Predictor model = Predictor::fit(baseline, m.selectRows(trainRows), trainY);
        const auto preds = model.predict(m.selectRows(testRows));
        for (std::size_t t = 0; t < testRows.size(); ++t) {
            if (preds[t].label != labels[testRows[t]]) flagged.push_back(testRows[t]);
        }
    }
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

}  // namespace custprof
