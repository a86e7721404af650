#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "custprof/measures.hpp"
#include "custprof/table.hpp"

// Independent brute-force implementations used as test oracles. None of these
// share code with the library paths they check.
namespace custprof::oracle {

// Linear-interpolation quantile over an unsorted sample.
double quantile(std::vector<double> values, double q);

// Silhouette from the definition: per-row a/b over explicit distance sums.
std::vector<double> silhouetteScores(const FeatureMatrix& m, const std::vector<int>& labels,
                                     Measure measure);
double silhouetteMean(const FeatureMatrix& m, const std::vector<int>& labels, Measure measure);

// Minimum WCSS over every assignment of rows to at most k clusters.
double bestPartitionWcss(const FeatureMatrix& m, std::size_t k);

// Adjusted Rand index between two labelings.
double adjustedRandIndex(const std::vector<int>& a, const std::vector<int>& b);

struct MetricCounts {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0, mcc = 0.0;
};

// Recounts the confusion cells and metric ratios from scratch.
MetricCounts recount(const std::vector<int>& yTrue, const std::vector<int>& yPred);

// Convex-hull membership for 2-D points (boundary counts as inside).
bool insideConvexHull2D(const std::vector<std::vector<double>>& cloud, double px, double py,
                        double eps = 1e-9);

// True when the point reconstructs as x + lambda (nn - x) for some source row
// x, one of its k nearest neighbors nn, and lambda in [0, 1].
bool smoteReconstructs(const FeatureMatrix& minority, int k,
                       const std::vector<double>& synthetic, double eps = 1e-9);

}  // namespace custprof::oracle
