#pragma once

#include <span>
#include <string>

namespace custprof {

// All kinds share the distance orientation: lower = more similar.
// cosine_distance = 1 - cosine similarity, pearson_distance = 1 - Pearson correlation.
enum class Measure {
    Euclidean,
    L1Distortion,
    CosineDistance,
    PearsonDistance,
};

Measure parseMeasure(const std::string& name);
std::string measureName(Measure m);

double euclidean(std::span<const double> x, std::span<const double> y);
double l1Distortion(std::span<const double> x, std::span<const double> y);

// Raw similarities in [-1, 1].
double cosine(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);

// Dispatch through the distance orientation.
double distance(Measure m, std::span<const double> x, std::span<const double> y);

}  // namespace custprof
