// Exercises the extern-C surface exactly as an external binding would: only
// custprof.h, no C++ core headers.
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <doctest.h>

#include "custprof.h"

#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

using custprof::testing::TempDir;

TEST_CASE("version and error strings") {
    CHECK(std::string(custprof_version()) == "1.0.0");
    CHECK(custprof_last_error() != nullptr);
}

TEST_CASE("matrix lifecycle and validation") {
    const double values[6] = {0, 0, 0, 1, 10, 0};
    custprof_matrix* m = nullptr;
    REQUIRE(custprof_matrix_create(3, 2, values, &m) == CUSTPROF_OK);
    CHECK(custprof_matrix_rows(m) == 3);
    CHECK(custprof_matrix_cols(m) == 2);
    custprof_matrix_free(m);

    CHECK(custprof_matrix_create(-1, 2, values, &m) == CUSTPROF_ERR_CONFIG);
    CHECK(std::strlen(custprof_last_error()) > 0);
}

TEST_CASE("kmeans through the C API") {
    const double values[8] = {0, 0, 0, 1, 10, 0, 10, 1};
    custprof_matrix* m = nullptr;
    REQUIRE(custprof_matrix_create(4, 2, values, &m) == CUSTPROF_OK);

    custprof_kmeans* model = nullptr;
    REQUIRE(custprof_kmeans_fit(m, 2, "euclidean", 4, 300, 1e-6, &model) == CUSTPROF_OK);
    CHECK(custprof_kmeans_wcss(model) == doctest::Approx(1.0));
    CHECK(custprof_kmeans_iterations(model) >= 1);

    double centroids[4];
    REQUIRE(custprof_kmeans_centroids(model, centroids) == CUSTPROF_OK);
    // One centroid near x=0, the other near x=10.
    const double lo = std::min(centroids[0], centroids[2]);
    const double hi = std::max(centroids[0], centroids[2]);
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(10.0));

    int labels[4];
    REQUIRE(custprof_kmeans_assign(model, m, labels) == CUSTPROF_OK);
    CHECK(labels[0] == labels[1]);
    CHECK(labels[2] == labels[3]);
    CHECK(labels[0] != labels[2]);

    SUBCASE("bad measure name is a config error") {
        custprof_kmeans* bad = nullptr;
        CHECK(custprof_kmeans_fit(m, 2, "chebyshev", 4, 300, 1e-6, &bad) == CUSTPROF_ERR_CONFIG);
        CHECK(std::string(custprof_last_error()).find("chebyshev") != std::string::npos);
    }
    SUBCASE("k above distinct rows is a config error") {
        custprof_kmeans* bad = nullptr;
        CHECK(custprof_kmeans_fit(m, 5, "euclidean", 4, 300, 1e-6, &bad) == CUSTPROF_ERR_CONFIG);
    }

    custprof_kmeans_free(model);
    custprof_matrix_free(m);
}

TEST_CASE("model fit, predict, and serialization through the C API") {
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        const int y = i % 2;
        values.push_back(y == 1 ? 0.8 : 0.2);
        values.push_back(y == 1 ? 0.7 : 0.3);
        labels.push_back(y);
    }
    custprof_matrix* m = nullptr;
    REQUIRE(custprof_matrix_create(30, 2, values.data(), &m) == CUSTPROF_OK);

    custprof_model* model = nullptr;
    REQUIRE(custprof_model_fit(R"({"family":"gbt","n_trees":10,"depth":2,"min_leaf":2})", m,
                               labels.data(), &model) == CUSTPROF_OK);

    std::vector<double> probs(30);
    REQUIRE(custprof_model_predict(model, m, probs.data()) == CUSTPROF_OK);
    int correct = 0;
    for (int i = 0; i < 30; ++i) correct += (probs[static_cast<std::size_t>(i)] >= 0.5) == (labels[static_cast<std::size_t>(i)] == 1);
    CHECK(correct == 30);

    char* doc = nullptr;
    REQUIRE(custprof_model_to_json(model, &doc) == CUSTPROF_OK);
    REQUIRE(doc != nullptr);

    custprof_model* reloaded = nullptr;
    REQUIRE(custprof_model_from_json(doc, &reloaded) == CUSTPROF_OK);
    std::vector<double> probs2(30);
    REQUIRE(custprof_model_predict(reloaded, m, probs2.data()) == CUSTPROF_OK);
    CHECK(probs == probs2);

    custprof_string_free(doc);
    custprof_model_free(reloaded);
    custprof_model_free(model);

    SUBCASE("bad spec json is a config error") {
        custprof_model* bad = nullptr;
        CHECK(custprof_model_fit("{oops", m, labels.data(), &bad) == CUSTPROF_ERR_CONFIG);
    }
    custprof_matrix_free(m);
}

TEST_CASE("dataset loading and the pipeline runner through the C API") {
    TempDir dir;
    const auto ds = custprof::testing::campaignDataset({60, 3, false});
    const auto input = dir.file("campaign.csv");
    custprof::writeCsv(ds, input);

    custprof_dataset* handle = nullptr;
    REQUIRE(custprof_dataset_load(input.c_str(), "merged", ',', &handle) == CUSTPROF_OK);
    CHECK(custprof_dataset_rows(handle) == 60);
    CHECK(custprof_dataset_cols(handle) == 29);
    const auto copyPath = dir.file("copy.csv");
    CHECK(custprof_dataset_write_csv(handle, copyPath.c_str()) == CUSTPROF_OK);
    custprof_dataset_free(handle);

    CHECK(custprof_dataset_load(dir.file("missing.csv").c_str(), "merged", ',', &handle) ==
          CUSTPROF_ERR_DATA);

    SUBCASE("custprof_run executes a subcommand end to end") {
        const std::string config = std::string(R"({"version":1,"input":{"path":")") + input +
                                   R"(","schema":"merged"},"cleaning":{"rules":[{"kind":"dedup_on_key","column":"ID"}]}})";
        const std::string outDir = dir.dir("out");
        CHECK(custprof_run("clean", config.c_str(), outDir.c_str(), 0, 0, 0) == CUSTPROF_OK);
        CHECK(std::filesystem::exists(outDir + "/cleaned.csv"));

        CHECK(custprof_run("explode", config.c_str(), outDir.c_str(), 0, 0, 0) ==
              CUSTPROF_ERR_CONFIG);
        CHECK(custprof_run("clean", "{bad json", outDir.c_str(), 0, 0, 0) ==
              CUSTPROF_ERR_CONFIG);
        CHECK(custprof_run(nullptr, config.c_str(), outDir.c_str(), 0, 0, 0) ==
              CUSTPROF_ERR_CONFIG);
    }
}

TEST_CASE("mcc through the C API") {
    CHECK(custprof_mcc(1, 0, 1, 0) == doctest::Approx(1.0));
    CHECK(custprof_mcc(6, 1, 3, 2) == doctest::Approx(16.0 / std::sqrt(1120.0)));
    CHECK(custprof_mcc(0, 0, 5, 0) == 0.0);
}
