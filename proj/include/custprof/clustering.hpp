#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "custprof/measures.hpp"
#include "custprof/table.hpp"

#include <nlohmann/json_fwd.hpp>

namespace custprof {

// Fitted codebook: k reproduction vectors plus the trace of the fit.
struct KMeansModel {
    std::vector<std::vector<double>> centroids;  // k x d
    Measure measure = Measure::Euclidean;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::size_t iterationsRun = 0;
    double finalWcss = 0.0;
    bool converged = false;
    std::vector<double> wcssTrace;  // WCSS after each full (assign, update) pass

    std::size_t dimension() const { return centroids.empty() ? 0 : centroids.front().size(); }
};

// Uniform: seeded choice of k distinct data rows. PlusPlus: D^2-weighted
// seeding, available behind a flag but not the default.
enum class KMeansInit { Uniform, PlusPlus };

// Lloyd iteration: assign each row to its nearest centroid under the measure,
// recompute centroids as coordinate means, stop when no assignment changes,
// the WCSS improvement falls below tol, or maxIter is hit. An emptied cluster
// is reseeded to the row farthest from its assigned centroid.
KMeansModel kmeansFit(const FeatureMatrix& m, std::size_t k, Measure measure, std::uint64_t seed,
                      std::size_t maxIter = 300, double tol = 1e-6,
                      KMeansInit init = KMeansInit::Uniform);

// Same Lloyd loop from explicit starting centroids (elbow restart inheritance).
KMeansModel kmeansFitFrom(const FeatureMatrix& m, std::vector<std::vector<double>> centroids,
                          Measure measure, std::size_t maxIter = 300, double tol = 1e-6);

// Row -> argmin-distance centroid; ties go to the lowest centroid index.
std::vector<int> assign(const KMeansModel& model, const FeatureMatrix& m);

// Average over rows of measure(row, nearest centroid).
double meanDistortion(const KMeansModel& model, const FeatureMatrix& m, Measure measure);

// Within-cluster sum of squared Euclidean distances for the given labeling.
double wcss(const FeatureMatrix& m, const std::vector<int>& labels,
            const std::vector<std::vector<double>>& centroids);

struct SilhouetteResult {
    std::vector<double> scores;
    double mean = 0.0;
};

// Per-row (b - a) / max(a, b); singleton-cluster rows score 0.
SilhouetteResult silhouette(const FeatureMatrix& m, const std::vector<int>& labels,
                            Measure measure);

struct ElbowResult {
    std::vector<std::size_t> ks;
    std::vector<double> wcss;
    std::vector<KMeansModel> models;  // best-of-restarts per k
    std::optional<std::size_t> kneeK;
};

// Best-of-restarts WCSS per k; the curve is non-increasing in k because one
// extra restart at k starts from the best (k-1) centroids plus the worst-fit
// row. Knee = argmax of the discrete second difference over interior k.
ElbowResult elbow(const FeatureMatrix& m, std::size_t kLo, std::size_t kHi, Measure measure,
                  std::uint64_t seed, std::size_t restarts = 5,
                  KMeansInit init = KMeansInit::Uniform);

struct GapResult {
    std::vector<std::size_t> ks;
    std::vector<double> gap;
    std::vector<double> sd;
    std::vector<bool> valid;  // false when W_k = 0 (k = n) excluded from selection
    std::optional<std::size_t> chosenK;
};

// gap(k) = mean_b log W*_kb - log W_k against B uniform-box reference draws;
// chosen k = smallest k with gap(k) >= gap(k+1) - sd(k+1), else the largest k.
GapResult gapStatistic(const FeatureMatrix& m, std::size_t kLo, std::size_t kHi, std::size_t B,
                       Measure measure, std::uint64_t seed,
                       KMeansInit init = KMeansInit::Uniform);

// Validity curve as emitted by the cluster pipeline stage.
struct ValidityReport {
    struct Entry {
        std::size_t k = 0;
        double wcss = 0.0;
        std::optional<double> silhouette;
        std::optional<double> gap;
        std::optional<double> gapSd;
    };
    std::vector<Entry> curve;
    std::optional<std::size_t> chosenElbow;
    std::optional<std::size_t> chosenSilhouette;
    std::optional<std::size_t> chosenGap;

    nlohmann::json toJson() const;
};

struct ProfileOptions {
    std::vector<std::string> relationshipValues = {"Married", "Together"};
    std::vector<std::string> bachelorPlus = {"2n Cycle", "Graduation", "Master", "PhD"};
};

struct SegmentProfile {
    struct NumericSummary {
        double mean = 0.0;
        double median = 0.0;
        double min = 0.0;
        double max = 0.0;
    };
    struct Cluster {
        int label = 0;
        std::size_t size = 0;
        double share = 0.0;
        std::map<std::string, NumericSummary> numeric;
        std::map<std::string, std::map<std::string, double>> categorical;  // value -> share
    };
    std::vector<Cluster> clusters;
    std::optional<double> relationshipShare;  // Marital_Status in {Married, Together}
    std::optional<double> bachelorPlusShare;  // Education at bachelor level or above

    nlohmann::json toJson() const;
};

// Per-cluster descriptive statistics over the dataset columns, plus the
// overall relationship / education shares when those columns exist.
SegmentProfile profileSegments(const Dataset& ds, const std::vector<int>& labels,
                               const ProfileOptions& options = {});

}  // namespace custprof
