#include "custprof/measures.hpp"

#include <cmath>

#include "custprof/errors.hpp"

namespace custprof {

namespace {

void requireSameLength(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ConfigError("dimension error: vectors have lengths " + std::to_string(x.size()) +
                          " and " + std::to_string(y.size()));
    }
    if (x.empty()) {
        throw ConfigError("dimension error: empty vectors");
    }
}

}  // namespace

Measure parseMeasure(const std::string& name) {
    if (name == "euclidean") return Measure::Euclidean;
    if (name == "l1_distortion") return Measure::L1Distortion;
    if (name == "cosine_distance") return Measure::CosineDistance;
    if (name == "pearson_distance") return Measure::PearsonDistance;
    throw ConfigError("unknown measure: " + name);
}

std::string measureName(Measure m) {
    switch (m) {
        case Measure::Euclidean: return "euclidean";
        case Measure::L1Distortion: return "l1_distortion";
        case Measure::CosineDistance: return "cosine_distance";
        case Measure::PearsonDistance: return "pearson_distance";
    }
    return "euclidean";
}

double euclidean(std::span<const double> x, std::span<const double> y) {
    requireSameLength(x, y);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double l1Distortion(std::span<const double> x, std::span<const double> y) {
    requireSameLength(x, y);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += std::fabs(x[i] - y[i]);
    return sum;
}

double cosine(std::span<const double> x, std::span<const double> y) {
    requireSameLength(x, y);
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0) {
        throw NumericError("undefined similarity: cosine of a zero-magnitude vector");
    }
    return dot / (std::sqrt(nx) * std::sqrt(ny));
}

double pearson(std::span<const double> x, std::span<const double> y) {
    requireSameLength(x, y);
    if (x.size() < 2) {
        throw ConfigError("dimension error: pearson needs length >= 2");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    // Population moments; the normalization cancels in the ratio.
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if (vx == 0.0 || vy == 0.0) {
        throw NumericError("undefined correlation: constant vector");
    }
    return (cov / n) / (std::sqrt(vx / n) * std::sqrt(vy / n));
}

double distance(Measure m, std::span<const double> x, std::span<const double> y) {
    switch (m) {
        case Measure::Euclidean: return euclidean(x, y);
        case Measure::L1Distortion: return l1Distortion(x, y);
        case Measure::CosineDistance: return 1.0 - cosine(x, y);
        case Measure::PearsonDistance: return 1.0 - pearson(x, y);
    }
    return euclidean(x, y);
}

}  // namespace custprof
