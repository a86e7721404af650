#include "custprof/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "custprof/errors.hpp"
#include "custprof/preprocess.hpp"
#include "custprof/rng.hpp"

namespace custprof {

ConfusionCounts confusion(const std::vector<int>& yTrue, const std::vector<int>& yPred) {
    if (yTrue.size() != yPred.size() || yTrue.empty()) {
        throw ConfigError("confusion: label sequences must have equal length >= 1");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < yTrue.size(); ++i) {
        if (yTrue[i] == 1) {
            if (yPred[i] == 1) ++c.tp;
            else ++c.fn;
        } else {
            if (yPred[i] == 1) ++c.fp;
            else ++c.tn;
        }
    }
    return c;
}

double mcc(const ConfusionCounts& c) {
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (denom <= 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(denom);
}

BasicMetrics basicMetrics(const ConfusionCounts& c) {
    BasicMetrics m;
    const double total = static_cast<double>(c.total());
    m.accuracy = total > 0.0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
    if (c.tp + c.fp > 0) {
        m.precisionPos = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        m.precisionUndefined = true;
    }
    if (c.tp + c.fn > 0) {
        m.recallPos = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        m.recallUndefined = true;
    }
    if (m.precisionPos + m.recallPos > 0.0) {
        m.f1Pos = 2.0 * m.precisionPos * m.recallPos / (m.precisionPos + m.recallPos);
    } else {
        m.f1Undefined = true;
    }
    return m;
}

nlohmann::json EvalReport::toJson() const {
    return nlohmann::json{
        {"counts", {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}}},
        {"accuracy", accuracy},
        {"precision_pos", precisionPos},
        {"recall_pos", recallPos},
        {"f1_pos", f1Pos},
        {"mcc", mcc},
        {"split", splitTag},
        {"fold", fold}};
}

EvalReport evaluate(const std::vector<int>& yTrue, const std::vector<int>& yPred,
                    std::string splitTag, int fold) {
    EvalReport report;
    report.counts = confusion(yTrue, yPred);
    const BasicMetrics m = basicMetrics(report.counts);
    report.accuracy = m.accuracy;
    report.precisionPos = m.precisionPos;
    report.recallPos = m.recallPos;
    report.f1Pos = m.f1Pos;
    report.mcc = mcc(report.counts);
    report.splitTag = std::move(splitTag);
    report.fold = fold;
    return report;
}

BalanceSpec BalanceSpec::smote(int k, double ratio) {
    BalanceSpec b;
    b.method = Method::Smote;
    b.k = k;
    b.ratio = ratio;
    return b;
}

BalanceSpec BalanceSpec::undersample(double ratio) {
    BalanceSpec b;
    b.method = Method::Undersample;
    b.ratio = ratio;
    return b;
}

void balanceTrainingSet(FeatureMatrix& x, std::vector<int>& y, const BalanceSpec& balance,
                        std::uint64_t seed) {
    if (balance.method == BalanceSpec::Method::None) return;
    if (balance.ratio <= 0.0) throw ConfigError("balance: ratio must be > 0");

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) return;  // nothing to balance

    const bool minorityIsPos = pos.size() <= neg.size();
    const auto& minority = minorityIsPos ? pos : neg;
    const auto& majority = minorityIsPos ? neg : pos;
    const int minorityLabel = minorityIsPos ? 1 : 0;

    if (balance.method == BalanceSpec::Method::Smote) {
        const auto target = static_cast<std::size_t>(
            std::llround(balance.ratio * static_cast<double>(majority.size())));
        if (target <= minority.size()) return;
        const std::size_t nSynthetic = target - minority.size();
        const int k = std::min<int>(balance.k, static_cast<int>(minority.size()) - 1);
        if (k < 1) {
            throw ConfigError("balance smote: minority class too small for k >= 1");
        }
        const FeatureMatrix minorityX = x.selectRows(minority);
        const FeatureMatrix synthetic = smote(minorityX, k, nSynthetic, seed);

        std::vector<double> values(x.values());
        values.insert(values.end(), synthetic.values().begin(), synthetic.values().end());
        std::vector<long long> ids(x.rowIds());
        ids.insert(ids.end(), synthetic.rowIds().begin(), synthetic.rowIds().end());
        x = FeatureMatrix(x.rowCount() + synthetic.rowCount(), x.columnCount(), std::move(values),
                          x.columnNames(), std::move(ids));
        y.insert(y.end(), nSynthetic, minorityLabel);
    } else {
        const auto keepMajority = static_cast<std::size_t>(
            std::llround(static_cast<double>(minority.size()) / balance.ratio));
        if (keepMajority >= majority.size()) return;
        auto rng = makeRng(seed);
        auto keepIdx = sampleWithoutReplacement(rng, majority.size(), keepMajority);
        std::vector<bool> keep(y.size(), false);
        for (std::size_t i : minority) keep[i] = true;
        for (std::size_t i : keepIdx) keep[majority[i]] = true;
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (keep[i]) rows.push_back(i);
        }
        std::vector<int> newY;
        newY.reserve(rows.size());
        for (std::size_t i : rows) newY.push_back(y[i]);
        x = x.selectRows(rows);
        y = std::move(newY);
    }
}

std::vector<int> stratifiedFolds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("cross-validation: folds must be >= 2");
    if (static_cast<std::size_t>(folds) > labels.size()) {
        throw ConfigError("cross-validation: folds exceed row count");
    }
    std::vector<std::size_t> classes[2];
    for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i] == 1 ? 1 : 0].push_back(i);
    for (const auto& cls : classes) {
        if (!cls.empty() && cls.size() < 2) {
            throw ConfigError("protocol error: a class has fewer than 2 members");
        }
    }

    std::vector<int> fold(labels.size(), 0);
    auto rng = makeRng(seed);
    // The dealing cursor carries across classes so small classes do not pile
    // onto the low folds (and folds = n degrades to leave-one-out).
    std::size_t cursor = 0;
    for (auto& cls : classes) {
        auto order = sampleWithoutReplacement(rng, cls.size(), cls.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            fold[cls[order[pos]]] = static_cast<int>(cursor % static_cast<std::size_t>(folds));
            ++cursor;
        }
    }
    return fold;
}

std::vector<EvalReport> crossValidate(const PredictorSpec& spec, const FeatureMatrix& m,
                                      const std::vector<int>& labels, int folds,
                                      std::uint64_t seed, const BalanceSpec& balance,
                                      double threshold) {
    if (labels.size() != m.rowCount()) throw ConfigError("cross-validation: labels/rows mismatch");
    const auto foldOf = stratifiedFolds(labels, folds, seed);

    std::vector<EvalReport> reports;
    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> trainRows, testRows;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            (foldOf[i] == f ? testRows : trainRows).push_back(i);
        }
        if (testRows.empty() || trainRows.empty()) {
            throw ConfigError("cross-validation: empty fold");
        }

        FeatureMatrix trainX = m.selectRows(trainRows);
        std::vector<int> trainY;
        trainY.reserve(trainRows.size());
        for (std::size_t i : trainRows) trainY.push_back(labels[i]);

        balanceTrainingSet(trainX, trainY, balance, mixSeed(seed, 0xba1a, f));

        const Predictor model = Predictor::fit(spec, trainX, trainY);

        const auto trainPred = model.predict(trainX, threshold);
        std::vector<int> trainHat;
        trainHat.reserve(trainPred.size());
        for (const auto& p : trainPred) trainHat.push_back(p.label);
        reports.push_back(evaluate(trainY, trainHat, "train", f));

        const FeatureMatrix testX = m.selectRows(testRows);
        std::vector<int> testY;
        testY.reserve(testRows.size());
        for (std::size_t i : testRows) testY.push_back(labels[i]);
        const auto testPred = model.predict(testX, threshold);
        std::vector<int> testHat;
        testHat.reserve(testPred.size());
        for (const auto& p : testPred) testHat.push_back(p.label);
        reports.push_back(evaluate(testY, testHat, "test", f));
    }
    return reports;
}

namespace {

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

Moments momentsOf(const std::vector<double>& values) {
    Moments m;
    if (values.empty()) return m;
    m.min = values[0];
    m.max = values[0];
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        m.min = std::min(m.min, v);
        m.max = std::max(m.max, v);
    }
    m.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - m.mean) * (v - m.mean);
    m.sd = std::sqrt(var / static_cast<double>(values.size()));
    return m;
}

}  // namespace

ComparisonReport compareModels(const std::vector<PredictorSpec>& specs, const FeatureMatrix& m,
                               const std::vector<int>& labels, const Protocol& protocol) {
    if (specs.size() < 2) throw ConfigError("compare: needs at least 2 specs");
    if (protocol.repeats < 1) throw ConfigError("compare: repeats must be >= 1");

    struct Accum {
        std::vector<double> testMcc, testAcc, trainMcc, trainAcc;
    };
    std::vector<Accum> accums(specs.size());

    for (int rep = 0; rep < protocol.repeats; ++rep) {
        const std::uint64_t repSeed = mixSeed(protocol.seed, 0x5eed, rep);
        // The identical fold partition feeds every spec; crossValidate derives
        // folds from the seed alone, so all specs see the same partition.
        for (std::size_t s = 0; s < specs.size(); ++s) {
            const auto reports = crossValidate(specs[s], m, labels, protocol.folds, repSeed,
                                               protocol.balance, protocol.threshold);
            for (const auto& r : reports) {
                if (r.splitTag == "test") {
                    accums[s].testMcc.push_back(r.mcc);
                    accums[s].testAcc.push_back(r.accuracy);
                } else {
                    accums[s].trainMcc.push_back(r.mcc);
                    accums[s].trainAcc.push_back(r.accuracy);
                }
            }
        }
    }

    std::vector<ModelScore> scores(specs.size());
    for (std::size_t s = 0; s < specs.size(); ++s) {
        const Moments mccM = momentsOf(accums[s].testMcc);
        const Moments accM = momentsOf(accums[s].testAcc);
        const Moments trainMccM = momentsOf(accums[s].trainMcc);
        const Moments trainAccM = momentsOf(accums[s].trainAcc);
        scores[s].name = specs[s].name();
        scores[s].meanTestMcc = mccM.mean;
        scores[s].sdTestMcc = mccM.sd;
        scores[s].minTestMcc = mccM.min;
        scores[s].maxTestMcc = mccM.max;
        scores[s].meanTestAccuracy = accM.mean;
        scores[s].sdTestAccuracy = accM.sd;
        scores[s].meanTrainMcc = trainMccM.mean;
        scores[s].meanTrainAccuracy = trainAccM.mean;
    }

    std::vector<std::size_t> order(specs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a].meanTestMcc != scores[b].meanTestMcc) {
            return scores[a].meanTestMcc > scores[b].meanTestMcc;
        }
        if (scores[a].meanTestAccuracy != scores[b].meanTestAccuracy) {
            return scores[a].meanTestAccuracy > scores[b].meanTestAccuracy;
        }
        return a < b;  // spec order
    });

    ComparisonReport report;
    report.ranking = order;
    for (std::size_t pos : order) report.ranked.push_back(scores[pos]);
    return report;
}

nlohmann::json ComparisonReport::toJson() const {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& s = ranked[i];
        rows.push_back({{"rank", i + 1},
                        {"model", s.name},
                        {"mean_test_mcc", s.meanTestMcc},
                        {"sd_test_mcc", s.sdTestMcc},
                        {"min_test_mcc", s.minTestMcc},
                        {"max_test_mcc", s.maxTestMcc},
                        {"mean_test_accuracy", s.meanTestAccuracy},
                        {"sd_test_accuracy", s.sdTestAccuracy},
                        {"mean_train_mcc", s.meanTrainMcc},
                        {"mean_train_accuracy", s.meanTrainAccuracy}});
    }
    return nlohmann::json{{"leaderboard", rows}};
}

std::string ComparisonReport::toLeaderboardCsv() const {
    std::ostringstream out;
    out << "rank,model,mean_test_mcc,sd_test_mcc,min_test_mcc,max_test_mcc,"
           "mean_test_accuracy,sd_test_accuracy,mean_train_mcc,mean_train_accuracy\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& s = ranked[i];
        out << (i + 1) << ',' << s.name << ',' << formatReal(s.meanTestMcc) << ','
            << formatReal(s.sdTestMcc) << ',' << formatReal(s.minTestMcc) << ','
            << formatReal(s.maxTestMcc) << ',' << formatReal(s.meanTestAccuracy) << ','
            << formatReal(s.sdTestAccuracy) << ',' << formatReal(s.meanTrainMcc) << ','
            << formatReal(s.meanTrainAccuracy) << '\n';
    }
    return out.str();
}

}  // namespace custprof
