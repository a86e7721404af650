#include <algorithm>
#include <random>
#include <set>

#include <doctest.h>

#include "custprof/errors.hpp"
#include "custprof/evaluation.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace custprof;
using custprof::testing::makeMatrix;

TEST_CASE("confusion cells") {
    const ConfusionCounts c = confusion({1, 0}, {1, 0});
    CHECK(c.tp == 1);
    CHECK(c.tn == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);

    SUBCASE("flipping predictions swaps tp<->fn and tn<->fp") {
        const std::vector<int> yTrue = {1, 1, 0, 0, 1, 0};
        const std::vector<int> yPred = {1, 0, 0, 1, 1, 0};
        const ConfusionCounts a = confusion(yTrue, yPred);
        std::vector<int> flipped(yPred.size());
        for (std::size_t i = 0; i < yPred.size(); ++i) flipped[i] = 1 - yPred[i];
        const ConfusionCounts b = confusion(yTrue, flipped);
        CHECK(a.tp == b.fn);
        CHECK(a.fn == b.tp);
        CHECK(a.tn == b.fp);
        CHECK(a.fp == b.tn);
    }
    SUBCASE("all-ones predictions count fp = true zeros") {
        const ConfusionCounts c2 = confusion({1, 0, 0, 1, 0}, {1, 1, 1, 1, 1});
        CHECK(c2.fp == 3);
        CHECK(c2.tp == 2);
    }
    SUBCASE("length mismatch") {
        CHECK_THROWS_AS(confusion({1}, {1, 0}), ConfigError);
    }
}

TEST_CASE("mcc canonical values") {
    CHECK(mcc(ConfusionCounts{1, 0, 1, 0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mcc(ConfusionCounts{0, 1, 0, 1}) == doctest::Approx(-1.0).epsilon(1e-9));
    // tp=6, fp=1, fn=2, tn=3 -> 16 / sqrt(1120)
    CHECK(mcc(ConfusionCounts{6, 1, 3, 2}) ==
          doctest::Approx(16.0 / std::sqrt(1120.0)).epsilon(1e-9));
    CHECK(mcc(ConfusionCounts{6, 1, 3, 2}) == doctest::Approx(0.47809).epsilon(1e-4));
    // Zero denominator convention.
    CHECK(mcc(ConfusionCounts{0, 0, 5, 0}) == 0.0);
}

TEST_CASE("mcc is symmetric under simultaneous class swap") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> yTrue(30), yPred(30);
        for (int i = 0; i < 30; ++i) {
            yTrue[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
            yPred[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
        }
        std::vector<int> tSwap(30), pSwap(30);
        for (int i = 0; i < 30; ++i) {
            tSwap[static_cast<std::size_t>(i)] = 1 - yTrue[static_cast<std::size_t>(i)];
            pSwap[static_cast<std::size_t>(i)] = 1 - yPred[static_cast<std::size_t>(i)];
        }
        CHECK(mcc(confusion(yTrue, yPred)) ==
              doctest::Approx(mcc(confusion(tSwap, pSwap))).epsilon(1e-12));
    }
}

TEST_CASE("basic metrics") {
    SUBCASE("recall 0.55 construction") {
        const BasicMetrics m = basicMetrics(ConfusionCounts{55, 123, 877, 45});
        CHECK(m.recallPos == doctest::Approx(0.55).epsilon(1e-9));
    }
    SUBCASE("all correct") {
        const BasicMetrics m = basicMetrics(ConfusionCounts{3, 0, 7, 0});
        CHECK(m.accuracy == doctest::Approx(1.0));
    }
    SUBCASE("no predicted positives flags precision 0/0") {
        const BasicMetrics m = basicMetrics(ConfusionCounts{0, 0, 5, 5});
        CHECK(m.precisionPos == 0.0);
        CHECK(m.precisionUndefined);
    }
}

TEST_CASE("metrics reproduce a brute-force recount on random labelings") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 5 + rng() % 100;
        std::vector<int> yTrue(n), yPred(n);
        for (std::size_t i = 0; i < n; ++i) {
            yTrue[i] = static_cast<int>(rng() % 2);
            yPred[i] = static_cast<int>(rng() % 2);
        }
        const ConfusionCounts c = confusion(yTrue, yPred);
        const BasicMetrics m = basicMetrics(c);
        const auto ref = oracle::recount(yTrue, yPred);
        CHECK(c.tp == ref.tp);
        CHECK(c.fp == ref.fp);
        CHECK(c.tn == ref.tn);
        CHECK(c.fn == ref.fn);
        CHECK(m.accuracy == doctest::Approx(ref.accuracy).epsilon(1e-12));
        CHECK(m.precisionPos == doctest::Approx(ref.precision).epsilon(1e-12));
        CHECK(m.recallPos == doctest::Approx(ref.recall).epsilon(1e-12));
        CHECK(m.f1Pos == doctest::Approx(ref.f1).epsilon(1e-12));
        CHECK(mcc(c) == doctest::Approx(ref.mcc).epsilon(1e-12));
    }
}

TEST_CASE("cross-validation protocol") {
    SUBCASE("leave-one-out on 6 rows gives 6 single-row test reports") {
        const auto x = makeMatrix({{0.1}, {0.2}, {0.3}, {0.7}, {0.8}, {0.9}});
        const std::vector<int> y = {0, 0, 0, 1, 1, 1};
        const auto reports = crossValidate(PredictorSpec::logreg({0.0, 0.5, 50}), x, y, 6, 1);
        int testReports = 0;
        for (const auto& r : reports) {
            if (r.splitTag == "test") {
                ++testReports;
                CHECK(r.counts.total() == 1);
            }
        }
        CHECK(testReports == 6);
    }
    SUBCASE("balancing never changes the test folds") {
        const auto data = custprof::testing::blobs({{0.2, 0.2}, {0.8, 0.8}}, 20, 0.1, 3);
        std::vector<int> y(40, 0);
        for (int i = 20; i < 40; ++i) y[static_cast<std::size_t>(i)] = 1;
        // Drop some positives to force an imbalance worth balancing.
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < 28; ++i) keep.push_back(i);
        const auto x = data.x.selectRows(keep);
        y.resize(28);

        const auto plain = crossValidate(PredictorSpec::logreg({0.0, 0.5, 50}), x, y, 4, 9);
        const auto balanced = crossValidate(PredictorSpec::logreg({0.0, 0.5, 50}), x, y, 4, 9,
                                            BalanceSpec::smote(3, 1.0));
        long long plainTest = 0, balancedTest = 0;
        for (const auto& r : plain) {
            if (r.splitTag == "test") plainTest += r.counts.total();
        }
        for (const auto& r : balanced) {
            if (r.splitTag == "test") balancedTest += r.counts.total();
        }
        CHECK(plainTest == 28);
        CHECK(balancedTest == 28);
        // Fold assignment is derived from (labels, folds, seed) alone.
        CHECK(stratifiedFolds(y, 4, 9) == stratifiedFolds(y, 4, 9));
    }
    SUBCASE("same seed gives identical reports") {
        const auto data = custprof::testing::blobs({{0.2, 0.2}, {0.8, 0.8}}, 15, 0.15, 5);
        const auto a = crossValidate(PredictorSpec::gbt({10, 2, 0.2, 2}), data.x, data.y, 3, 21);
        const auto b = crossValidate(PredictorSpec::gbt({10, 2, 0.2, 2}), data.x, data.y, 3, 21);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].mcc == b[i].mcc);
            CHECK(a[i].counts.tp == b[i].counts.tp);
            CHECK(a[i].splitTag == b[i].splitTag);
        }
    }
    SUBCASE("a class smaller than 2 is a protocol error") {
        const auto x = makeMatrix({{0.1}, {0.2}, {0.3}, {0.4}});
        CHECK_THROWS_AS(crossValidate(PredictorSpec::logreg(), x, {1, 0, 0, 0}, 2, 1),
                        ConfigError);
    }
}

TEST_CASE("model comparison") {
    const auto data = custprof::testing::blobs({{0.2, 0.2}, {0.8, 0.8}}, 25, 0.1, 11);

    SUBCASE("a real model outranks its null (zero-tree) variant on separable data") {
        auto null = PredictorSpec::gbt({0, 3, 0.1, 2});
        null.label = "null";
        auto full = PredictorSpec::gbt({20, 2, 0.2, 2});
        full.label = "full";
        const ComparisonReport report =
            compareModels({null, full}, data.x, data.y, {5, 3, BalanceSpec::none(), 1, 0.5});
        CHECK(report.ranked.front().name == "full");
        CHECK(report.ranked.front().meanTestMcc > report.ranked.back().meanTestMcc);
    }
    SUBCASE("a spec listed twice produces identical metric rows") {
        const auto spec = PredictorSpec::gbt({10, 2, 0.2, 2});
        const ComparisonReport report =
            compareModels({spec, spec}, data.x, data.y, {4, 7, BalanceSpec::none(), 1, 0.5});
        CHECK(report.ranked[0].meanTestMcc == report.ranked[1].meanTestMcc);
        CHECK(report.ranked[0].meanTestAccuracy == report.ranked[1].meanTestAccuracy);
    }
    SUBCASE("ranking is a permutation of the spec list") {
        std::vector<PredictorSpec> specs = {PredictorSpec::logreg({0.0, 0.5, 60}),
                                            PredictorSpec::gbt({10, 2, 0.2, 2}),
                                            PredictorSpec::linearSvm({1e-3, 100})};
        const ComparisonReport report =
            compareModels(specs, data.x, data.y, {4, 5, BalanceSpec::none(), 1, 0.5});
        std::set<std::size_t> seen(report.ranking.begin(), report.ranking.end());
        CHECK(seen.size() == specs.size());
        CHECK(*std::max_element(report.ranking.begin(), report.ranking.end()) ==
              specs.size() - 1);
    }
    SUBCASE("spec order only matters for exact ties") {
        // XOR-style data keeps the two families well apart, so the ranking
        // does not depend on the listing order.
        const auto xorData = custprof::testing::xorBlobs(200, 7);
        auto a = PredictorSpec::gbt({25, 3, 0.2, 2});
        a.label = "A";
        auto b = PredictorSpec::logreg({0.0, 0.5, 80});
        b.label = "B";
        const ComparisonReport fwd =
            compareModels({a, b}, xorData.x, xorData.y, {4, 5, BalanceSpec::none(), 1, 0.5});
        const ComparisonReport rev =
            compareModels({b, a}, xorData.x, xorData.y, {4, 5, BalanceSpec::none(), 1, 0.5});
        REQUIRE(fwd.ranked.size() == rev.ranked.size());
        for (std::size_t i = 0; i < fwd.ranked.size(); ++i) {
            CHECK(fwd.ranked[i].name == rev.ranked[i].name);
            CHECK(fwd.ranked[i].meanTestMcc == rev.ranked[i].meanTestMcc);
        }
        CHECK(fwd.ranked.front().name == "A");
    }
    SUBCASE("fewer than two specs is a config error") {
        CHECK_THROWS_AS(compareModels({PredictorSpec::gbt()}, data.x, data.y,
                                      {4, 5, BalanceSpec::none(), 1, 0.5}),
                        ConfigError);
    }
}

TEST_CASE("undersample balancing shrinks only the majority side") {
    const auto data = custprof::testing::blobs({{0.2, 0.2}, {0.8, 0.8}}, 20, 0.1, 3);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < 25; ++i) keep.push_back(i);  // 20 negatives, 5 positives
    FeatureMatrix x = data.x.selectRows(keep);
    std::vector<int> y(25, 0);
    for (std::size_t i = 20; i < 25; ++i) y[i] = 1;

    balanceTrainingSet(x, y, BalanceSpec::undersample(1.0), 4);
    CHECK(std::count(y.begin(), y.end(), 1) == 5);
    CHECK(std::count(y.begin(), y.end(), 0) == 5);

    SUBCASE("smote grows only the minority side") {
        FeatureMatrix x2 = data.x.selectRows(keep);
        std::vector<int> y2(25, 0);
        for (std::size_t i = 20; i < 25; ++i) y2[i] = 1;
        balanceTrainingSet(x2, y2, BalanceSpec::smote(3, 1.0), 4);
        CHECK(std::count(y2.begin(), y2.end(), 0) == 20);
        CHECK(std::count(y2.begin(), y2.end(), 1) == 20);
        CHECK(x2.rowCount() == 40);
    }
}
