#include "custprof/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "custprof/errors.hpp"
#include "custprof/rng.hpp"

namespace custprof {

namespace {

double sqEuclidean(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

int nearestCentroid(const std::vector<std::vector<double>>& centroids, Measure measure,
                    std::span<const double> row) {
    int best = 0;
    double bestDist = distance(measure, row, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = distance(measure, row, centroids[c]);
        if (d < bestDist) {
            bestDist = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

// Indices of the first occurrence of each distinct row value.
std::vector<std::size_t> distinctRowIndices(const FeatureMatrix& m) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        bool dup = false;
        for (std::size_t p : out) {
            if (std::equal(m.row(r).begin(), m.row(r).end(), m.row(p).begin())) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(r);
    }
    return out;
}

KMeansModel lloyd(const FeatureMatrix& m, std::vector<std::vector<double>> centroids,
                  Measure measure, std::uint64_t seed, std::size_t maxIter, double tol) {
    const std::size_t n = m.rowCount();
    const std::size_t d = m.columnCount();
    const std::size_t k = centroids.size();

    std::vector<int> labels(n, -1);
    double prevWcss = std::numeric_limits<double>::infinity();
    double currWcss = prevWcss;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> trace;

    for (std::size_t iter = 0; iter < maxIter; ++iter) {
        ++iterations;
        bool changed = false;
        for (std::size_t r = 0; r < n; ++r) {
            const int c = nearestCentroid(centroids, measure, m.row(r));
            if (c != labels[r]) {
                labels[r] = c;
                changed = true;
            }
        }

        // Repair emptied clusters before the update: move each to the row
        // farthest from its assigned centroid.
        std::vector<std::size_t> counts(k, 0);
        for (int l : labels) ++counts[static_cast<std::size_t>(l)];
        std::vector<bool> usedAsReseed(n, false);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            double worst = -1.0;
            std::size_t worstRow = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (usedAsReseed[r]) continue;
                const auto& own = centroids[static_cast<std::size_t>(labels[r])];
                const double dist = sqEuclidean(m.row(r), own);
                if (dist > worst) {
                    worst = dist;
                    worstRow = r;
                }
            }
            usedAsReseed[worstRow] = true;
            centroids[c].assign(m.row(worstRow).begin(), m.row(worstRow).end());
            labels[worstRow] = static_cast<int>(c);
            counts[c] = 1;
            changed = true;
        }

        // Update: coordinate means (an approximation for non-Euclidean measures).
        std::vector<std::vector<double>> next(k, std::vector<double>(d, 0.0));
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t r = 0; r < n; ++r) {
            const auto row = m.row(r);
            auto& acc = next[static_cast<std::size_t>(labels[r])];
            for (std::size_t j = 0; j < d; ++j) acc[j] += row[j];
            ++counts[static_cast<std::size_t>(labels[r])];
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < d; ++j) next[c][j] /= static_cast<double>(counts[c]);
        }
        centroids = std::move(next);

        currWcss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            currWcss += sqEuclidean(m.row(r), centroids[static_cast<std::size_t>(labels[r])]);
        }
        trace.push_back(currWcss);

        if (!changed) {
            converged = true;
            break;
        }
        if (prevWcss - currWcss < tol && std::isfinite(prevWcss)) {
            converged = true;
            break;
        }
        prevWcss = currWcss;
    }

    KMeansModel model;
    model.centroids = std::move(centroids);
    model.measure = measure;
    model.k = k;
    model.seed = seed;
    model.iterationsRun = iterations;
    model.finalWcss = currWcss;
    model.converged = converged;
    model.wcssTrace = std::move(trace);
    return model;
}

}  // namespace

KMeansModel kmeansFit(const FeatureMatrix& m, std::size_t k, Measure measure, std::uint64_t seed,
                      std::size_t maxIter, double tol, KMeansInit init) {
    if (m.rowCount() == 0) throw ConfigError("kmeans: empty matrix");
    if (k < 1) throw ConfigError("kmeans: k must be >= 1");
    const auto distinct = distinctRowIndices(m);
    if (k > distinct.size()) {
        throw ConfigError("kmeans: k = " + std::to_string(k) + " exceeds distinct row count " +
                          std::to_string(distinct.size()));
    }

    auto rng = makeRng(seed);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    if (init == KMeansInit::Uniform) {
        const auto picked = sampleWithoutReplacement(rng, distinct.size(), k);
        for (std::size_t p : picked) {
            const auto row = m.row(distinct[p]);
            centroids.emplace_back(row.begin(), row.end());
        }
    } else {
        // D^2 sampling over the distinct rows.
        std::vector<double> d2(distinct.size(), 0.0);
        const std::size_t first = pickIndex(rng, distinct.size());
        const auto firstRow = m.row(distinct[first]);
        centroids.emplace_back(firstRow.begin(), firstRow.end());
        while (centroids.size() < k) {
            double total = 0.0;
            for (std::size_t i = 0; i < distinct.size(); ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& c : centroids) {
                    best = std::min(best, sqEuclidean(m.row(distinct[i]), c));
                }
                d2[i] = best;
                total += best;
            }
            std::size_t next =
                static_cast<std::size_t>(std::max_element(d2.begin(), d2.end()) - d2.begin());
            if (total > 0.0) {
                const double target = pickUnit(rng) * total;
                double acc = 0.0;
                for (std::size_t i = 0; i < distinct.size(); ++i) {
                    acc += d2[i];
                    if (acc >= target && d2[i] > 0.0) {
                        next = i;
                        break;
                    }
                }
            }
            const auto row = m.row(distinct[next]);
            centroids.emplace_back(row.begin(), row.end());
        }
    }
    return lloyd(m, std::move(centroids), measure, seed, maxIter, tol);
}

KMeansModel kmeansFitFrom(const FeatureMatrix& m, std::vector<std::vector<double>> centroids,
                          Measure measure, std::size_t maxIter, double tol) {
    if (centroids.empty()) throw ConfigError("kmeans: no starting centroids");
    for (const auto& c : centroids) {
        if (c.size() != m.columnCount()) throw ConfigError("kmeans: centroid dimension mismatch");
    }
    return lloyd(m, std::move(centroids), measure, 0, maxIter, tol);
}

std::vector<int> assign(const KMeansModel& model, const FeatureMatrix& m) {
    if (m.columnCount() != model.dimension()) {
        throw ConfigError("assign: matrix has " + std::to_string(m.columnCount()) +
                          " columns, model expects " + std::to_string(model.dimension()));
    }
    std::vector<int> labels(m.rowCount());
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        labels[r] = nearestCentroid(model.centroids, model.measure, m.row(r));
    }
    return labels;
}

double meanDistortion(const KMeansModel& model, const FeatureMatrix& m, Measure measure) {
    if (m.rowCount() == 0) throw ConfigError("mean_distortion: empty matrix");
    if (m.columnCount() != model.dimension()) {
        throw ConfigError("mean_distortion: dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : model.centroids) best = std::min(best, distance(measure, m.row(r), c));
        total += best;
    }
    return total / static_cast<double>(m.rowCount());
}

double wcss(const FeatureMatrix& m, const std::vector<int>& labels,
            const std::vector<std::vector<double>>& centroids) {
    double total = 0.0;
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        total += sqEuclidean(m.row(r), centroids[static_cast<std::size_t>(labels[r])]);
    }
    return total;
}

SilhouetteResult silhouette(const FeatureMatrix& m, const std::vector<int>& labels,
                            Measure measure) {
    const std::size_t n = m.rowCount();
    if (labels.size() != n) throw ConfigError("silhouette: labels/rows mismatch");

    std::set<int> clusterIds(labels.begin(), labels.end());
    if (clusterIds.size() < 2) {
        throw ConfigError("silhouette: needs at least 2 clusters");
    }
    std::unordered_map<int, std::size_t> clusterSize;
    for (int l : labels) ++clusterSize[l];

    SilhouetteResult result;
    result.scores.resize(n, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int own = labels[i];
        if (clusterSize[own] == 1) {
            result.scores[i] = 0.0;  // singleton convention
            continue;
        }
        double a = 0.0;
        std::unordered_map<int, double> otherSum;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = distance(measure, m.row(i), m.row(j));
            if (labels[j] == own) a += d;
            else otherSum[labels[j]] += d;
        }
        a /= static_cast<double>(clusterSize[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c : clusterIds) {
            if (c == own) continue;
            b = std::min(b, otherSum[c] / static_cast<double>(clusterSize[c]));
        }
        const double denom = std::max(a, b);
        result.scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
        sum += result.scores[i];
    }
    result.mean = sum / static_cast<double>(n);
    return result;
}

ElbowResult elbow(const FeatureMatrix& m, std::size_t kLo, std::size_t kHi, Measure measure,
                  std::uint64_t seed, std::size_t restarts, KMeansInit init) {
    if (kLo < 1 || kLo > kHi) throw ConfigError("elbow: bad k range");
    const std::size_t distinct = distinctRowIndices(m).size();
    if (kHi > distinct) {
        throw ConfigError("elbow: k range exceeds distinct row count " + std::to_string(distinct));
    }
    if (restarts < 1) throw ConfigError("elbow: restarts must be >= 1");

    ElbowResult result;
    for (std::size_t k = kLo; k <= kHi; ++k) {
        std::optional<KMeansModel> best;
        for (std::size_t r = 0; r < restarts; ++r) {
            KMeansModel fit = kmeansFit(m, k, measure, mixSeed(seed, k, r), 300, 1e-6, init);
            if (!best || fit.finalWcss < best->finalWcss) best = std::move(fit);
        }
        // Warm restart from the previous best keeps the curve non-increasing:
        // the old centroids plus the worst-fit row can only lower WCSS.
        if (!result.models.empty()) {
            const KMeansModel& prev = result.models.back();
            auto centroids = prev.centroids;
            const auto prevLabels = assign(prev, m);
            double worst = -1.0;
            std::size_t worstRow = 0;
            for (std::size_t r = 0; r < m.rowCount(); ++r) {
                const double d =
                    sqEuclidean(m.row(r), prev.centroids[static_cast<std::size_t>(prevLabels[r])]);
                if (d > worst) {
                    worst = d;
                    worstRow = r;
                }
            }
            centroids.emplace_back(m.row(worstRow).begin(), m.row(worstRow).end());
            while (centroids.size() < k) {
                // Fill any remaining slots (k jumps of > 1 never happen here).
                centroids.push_back(centroids.back());
            }
            KMeansModel warm = kmeansFitFrom(m, std::move(centroids), measure);
            if (warm.finalWcss < best->finalWcss) best = std::move(warm);
        }
        result.ks.push_back(k);
        result.wcss.push_back(best->finalWcss);
        result.models.push_back(std::move(*best));
    }

    if (result.ks.size() >= 3) {
        double bestCurve = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < result.ks.size(); ++i) {
            const double second =
                result.wcss[i - 1] - 2.0 * result.wcss[i] + result.wcss[i + 1];
            if (second > bestCurve) {
                bestCurve = second;
                result.kneeK = result.ks[i];
            }
        }
    }
    return result;
}

GapResult gapStatistic(const FeatureMatrix& m, std::size_t kLo, std::size_t kHi, std::size_t B,
                       Measure measure, std::uint64_t seed, KMeansInit init) {
    if (B < 2) throw ConfigError("gap: B must be >= 2");
    if (kLo < 1 || kLo > kHi) throw ConfigError("gap: bad k range");
    const std::size_t n = m.rowCount();
    const std::size_t d = m.columnCount();
    if (n == 0) throw ConfigError("gap: empty matrix");

    // Per-feature bounds for the uniform reference distribution.
    std::vector<double> lo(d), hi(d);
    for (std::size_t c = 0; c < d; ++c) {
        lo[c] = hi[c] = m.at(0, c);
        for (std::size_t r = 1; r < n; ++r) {
            lo[c] = std::min(lo[c], m.at(r, c));
            hi[c] = std::max(hi[c], m.at(r, c));
        }
    }
    auto referenceDraw = [&](std::uint64_t drawSeed) {
        auto rng = makeRng(drawSeed);
        std::vector<double> values(n * d);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                values[r * d + c] = lo[c] + (hi[c] - lo[c]) * pickUnit(rng);
            }
        }
        std::vector<long long> ids(n);
        for (std::size_t r = 0; r < n; ++r) ids[r] = static_cast<long long>(r);
        return FeatureMatrix(n, d, std::move(values), m.columnNames(), std::move(ids));
    };

    constexpr std::size_t kDataRestarts = 5;
    constexpr std::size_t kRefRestarts = 2;
    auto bestWcss = [&](const FeatureMatrix& data, std::size_t k, std::uint64_t fitSeed,
                        std::size_t tries) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < tries; ++t) {
            best = std::min(
                best, kmeansFit(data, k, measure, mixSeed(fitSeed, t), 300, 1e-6, init).finalWcss);
        }
        return best;
    };

    GapResult result;
    for (std::size_t k = kLo; k <= kHi; ++k) {
        const double wk = bestWcss(m, k, mixSeed(seed, k, 0x5a5a), kDataRestarts);
        if (wk <= 0.0) {
            result.ks.push_back(k);
            result.gap.push_back(std::numeric_limits<double>::quiet_NaN());
            result.sd.push_back(0.0);
            result.valid.push_back(false);
            continue;
        }
        std::vector<double> logWb(B);
        for (std::size_t b = 0; b < B; ++b) {
            const FeatureMatrix ref = referenceDraw(mixSeed(seed, 0xb00, b));
            logWb[b] = std::log(bestWcss(ref, k, mixSeed(seed, k, b), kRefRestarts));
        }
        double mean = 0.0;
        for (double v : logWb) mean += v;
        mean /= static_cast<double>(B);
        double var = 0.0;
        for (double v : logWb) var += (v - mean) * (v - mean);
        var /= static_cast<double>(B - 1);  // sample variance
        const double sd = std::sqrt(var) * std::sqrt(1.0 + 1.0 / static_cast<double>(B));

        result.ks.push_back(k);
        result.gap.push_back(mean - std::log(wk));
        result.sd.push_back(sd);
        result.valid.push_back(true);
    }

    // Smallest k with gap(k) >= gap(k+1) - sd(k+1); fall back to the largest
    // valid k in range.
    for (std::size_t i = 0; i + 1 < result.ks.size(); ++i) {
        if (!result.valid[i] || !result.valid[i + 1]) continue;
        if (result.gap[i] >= result.gap[i + 1] - result.sd[i + 1]) {
            result.chosenK = result.ks[i];
            break;
        }
    }
    if (!result.chosenK) {
        for (std::size_t i = result.ks.size(); i-- > 0;) {
            if (result.valid[i]) {
                result.chosenK = result.ks[i];
                break;
            }
        }
    }
    return result;
}

nlohmann::json ValidityReport::toJson() const {
    nlohmann::json curveJson = nlohmann::json::array();
    for (const auto& e : curve) {
        nlohmann::json entry{{"k", e.k}, {"wcss", e.wcss}};
        entry["silhouette"] = e.silhouette ? nlohmann::json(*e.silhouette) : nlohmann::json();
        entry["gap"] = e.gap ? nlohmann::json(*e.gap) : nlohmann::json();
        entry["gap_sd"] = e.gapSd ? nlohmann::json(*e.gapSd) : nlohmann::json();
        curveJson.push_back(std::move(entry));
    }
    nlohmann::json chosen;
    chosen["elbow"] = chosenElbow ? nlohmann::json(*chosenElbow) : nlohmann::json();
    chosen["silhouette"] = chosenSilhouette ? nlohmann::json(*chosenSilhouette) : nlohmann::json();
    chosen["gap"] = chosenGap ? nlohmann::json(*chosenGap) : nlohmann::json();
    return nlohmann::json{{"curve", curveJson}, {"chosen", chosen}};
}

nlohmann::json SegmentProfile::toJson() const {
    nlohmann::json clustersJson = nlohmann::json::array();
    for (const auto& c : clusters) {
        nlohmann::json numeric;
        for (const auto& [name, s] : c.numeric) {
            numeric[name] = {{"mean", s.mean}, {"median", s.median}, {"min", s.min},
                             {"max", s.max}};
        }
        nlohmann::json categorical;
        for (const auto& [name, shares] : c.categorical) {
            nlohmann::json values;
            for (const auto& [value, share] : shares) values[value] = share;
            categorical[name] = std::move(values);
        }
        clustersJson.push_back({{"label", c.label},
                                {"size", c.size},
                                {"share", c.share},
                                {"numeric", std::move(numeric)},
                                {"categorical", std::move(categorical)}});
    }
    nlohmann::json overall;
    overall["relationship_share"] =
        relationshipShare ? nlohmann::json(*relationshipShare) : nlohmann::json();
    overall["bachelor_plus_share"] =
        bachelorPlusShare ? nlohmann::json(*bachelorPlusShare) : nlohmann::json();
    return nlohmann::json{{"clusters", clustersJson}, {"overall", overall}};
}

SegmentProfile profileSegments(const Dataset& ds, const std::vector<int>& labels,
                               const ProfileOptions& options) {
    if (labels.size() != ds.rowCount()) {
        throw ConfigError("profile: labels length != dataset rows");
    }

    std::map<int, std::vector<std::size_t>> byCluster;
    for (std::size_t r = 0; r < labels.size(); ++r) byCluster[labels[r]].push_back(r);

    SegmentProfile profile;
    const double total = static_cast<double>(ds.rowCount());
    for (const auto& [label, rows] : byCluster) {
        SegmentProfile::Cluster cluster;
        cluster.label = label;
        cluster.size = rows.size();
        cluster.share = static_cast<double>(rows.size()) / total;

        for (std::size_t c = 0; c < ds.columnCount(); ++c) {
            const ColumnSpec& spec = ds.schema()[c];
            if (spec.kind == ColumnKind::Categorical) {
                std::map<std::string, std::size_t> counts;
                std::size_t seen = 0;
                for (std::size_t r : rows) {
                    if (cellMissing(ds.cell(r, c))) continue;
                    ++counts[std::get<std::string>(ds.cell(r, c))];
                    ++seen;
                }
                if (seen == 0) continue;
                auto& shares = cluster.categorical[spec.name];
                for (const auto& [value, count] : counts) {
                    shares[value] = static_cast<double>(count) / static_cast<double>(seen);
                }
            } else if (spec.kind != ColumnKind::Date) {
                std::vector<double> values;
                for (std::size_t r : rows) {
                    if (!cellMissing(ds.cell(r, c))) values.push_back(cellAsReal(ds.cell(r, c)));
                }
                if (values.empty()) continue;
                std::sort(values.begin(), values.end());
                SegmentProfile::NumericSummary s;
                s.min = values.front();
                s.max = values.back();
                double sum = 0.0;
                for (double v : values) sum += v;
                s.mean = sum / static_cast<double>(values.size());
                const std::size_t nv = values.size();
                s.median = (nv % 2 == 1) ? values[nv / 2]
                                         : 0.5 * (values[nv / 2 - 1] + values[nv / 2]);
                cluster.numeric[spec.name] = s;
            }
        }
        profile.clusters.push_back(std::move(cluster));
    }

    const int marital = ds.findColumn("Marital_Status");
    if (marital >= 0) {
        std::size_t inRelationship = 0, seen = 0;
        for (std::size_t r = 0; r < ds.rowCount(); ++r) {
            const Cell& cell = ds.cell(r, static_cast<std::size_t>(marital));
            if (cellMissing(cell)) continue;
            ++seen;
            const auto& v = std::get<std::string>(cell);
            if (std::find(options.relationshipValues.begin(), options.relationshipValues.end(),
                          v) != options.relationshipValues.end()) {
                ++inRelationship;
            }
        }
        if (seen > 0) {
            profile.relationshipShare = static_cast<double>(inRelationship) /
                                        static_cast<double>(seen);
        }
    }
    const int education = ds.findColumn("Education");
    if (education >= 0) {
        std::size_t atLeast = 0, seen = 0;
        for (std::size_t r = 0; r < ds.rowCount(); ++r) {
            const Cell& cell = ds.cell(r, static_cast<std::size_t>(education));
            if (cellMissing(cell)) continue;
            ++seen;
            const auto& v = std::get<std::string>(cell);
            if (std::find(options.bachelorPlus.begin(), options.bachelorPlus.end(), v) !=
                options.bachelorPlus.end()) {
                ++atLeast;
            }
        }
        if (seen > 0) {
            profile.bachelorPlusShare = static_cast<double>(atLeast) / static_cast<double>(seen);
        }
    }
    return profile;
}

}  // namespace custprof
