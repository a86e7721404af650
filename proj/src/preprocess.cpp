#include "custprof/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "custprof/errors.hpp"
#include "custprof/measures.hpp"
#include "custprof/rng.hpp"

namespace custprof {

namespace {

std::string cellKey(const Cell& c) {
    if (cellMissing(c)) return "\x01missing";
    if (std::holds_alternative<long long>(c)) return "i" + std::to_string(std::get<long long>(c));
    if (std::holds_alternative<double>(c)) return "r" + formatReal(std::get<double>(c));
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "b1" : "b0";
    return "s" + std::get<std::string>(c);
}

// Linear-interpolation quantile on a sorted copy (the numpy default rule).
double quantileSorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw DataError("quantile of empty data");
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

int cellYear(const Cell& c) {
    return static_cast<int>(std::llround(cellAsReal(c)));
}

}  // namespace

CleaningRule CleaningRule::dedupOnKey(std::string column, CleanAction action) {
    CleaningRule r;
    r.kind = Kind::DedupOnKey;
    r.column = std::move(column);
    r.action = action;
    return r;
}

CleaningRule CleaningRule::rangeBound(std::string column, double min, double max,
                                      CleanAction action) {
    CleaningRule r;
    r.kind = Kind::RangeBound;
    r.column = std::move(column);
    r.min = min;
    r.max = max;
    r.action = action;
    return r;
}

CleaningRule CleaningRule::quantileFence(std::string column, double kIqr, CleanAction action) {
    if (kIqr <= 0.0) throw ConfigError("quantile_fence: k_iqr must be > 0");
    CleaningRule r;
    r.kind = Kind::QuantileFence;
    r.column = std::move(column);
    r.kIqr = kIqr;
    r.action = action;
    return r;
}

CleaningRule CleaningRule::impossibleAge(std::string birthColumn, int referenceYear, int maxAge,
                                         CleanAction action) {
    if (maxAge <= 0) throw ConfigError("impossible_age: max_age must be > 0");
    CleaningRule r;
    r.kind = Kind::ImpossibleAge;
    r.column = std::move(birthColumn);
    r.referenceYear = referenceYear;
    r.maxAge = maxAge;
    r.action = action;
    return r;
}

std::string CleaningRule::describe() const {
    switch (kind) {
        case Kind::DedupOnKey: return "dedup_on_key(" + column + ")";
        case Kind::RangeBound:
            return "range_bound(" + column + "," + formatReal(min) + "," + formatReal(max) + ")";
        case Kind::QuantileFence:
            return "quantile_fence(" + column + "," + formatReal(kIqr) + ")";
        case Kind::ImpossibleAge:
            return "impossible_age(" + column + "," + std::to_string(referenceYear) + "," +
                   std::to_string(maxAge) + ")";
    }
    return "?";
}

nlohmann::json CleaningReport::toJson() const {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : perRule) {
        rules.push_back({{"rule", r.rule}, {"matched", r.matched}, {"dropped", r.dropped}});
    }
    return nlohmann::json{{"rules", rules},
                          {"rows_before", rowsBefore},
                          {"rows_after", rowsAfter},
                          {"flagged_rows", flaggedRows}};
}

std::pair<Dataset, CleaningReport> clean(const Dataset& ds,
                                         const std::vector<CleaningRule>& rules) {
    std::vector<std::vector<Cell>> rows = ds.rows();
    std::vector<bool> flagged(rows.size(), false);

    CleaningReport report;
    report.rowsBefore = rows.size();

    for (const auto& rule : rules) {
        const std::size_t col = ds.columnIndex(rule.column);
        std::vector<bool> matched(rows.size(), false);

        switch (rule.kind) {
            case CleaningRule::Kind::DedupOnKey: {
                std::unordered_set<std::string> seen;
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (!seen.insert(cellKey(rows[r][col])).second) matched[r] = true;
                }
                break;
            }
            case CleaningRule::Kind::RangeBound: {
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (cellMissing(rows[r][col])) continue;
                    const double v = cellAsReal(rows[r][col]);
                    if (v < rule.min || v > rule.max) matched[r] = true;
                }
                break;
            }
            case CleaningRule::Kind::QuantileFence: {
                std::vector<double> values;
                for (const auto& row : rows) {
                    if (!cellMissing(row[col])) values.push_back(cellAsReal(row[col]));
                }
                if (values.size() >= 2) {
                    std::sort(values.begin(), values.end());
                    const double q1 = quantileSorted(values, 0.25);
                    const double q3 = quantileSorted(values, 0.75);
                    const double iqr = q3 - q1;
                    const double lo = q1 - rule.kIqr * iqr;
                    const double hi = q3 + rule.kIqr * iqr;
                    for (std::size_t r = 0; r < rows.size(); ++r) {
                        if (cellMissing(rows[r][col])) continue;
                        const double v = cellAsReal(rows[r][col]);
                        if (v < lo || v > hi) matched[r] = true;
                    }
                }
                break;
            }
            case CleaningRule::Kind::ImpossibleAge: {
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (cellMissing(rows[r][col])) continue;
                    const int age = rule.referenceYear - cellYear(rows[r][col]);
                    if (age > rule.maxAge) matched[r] = true;
                }
                break;
            }
        }

        RuleOutcome outcome;
        outcome.rule = rule.describe();
        outcome.matched = static_cast<std::size_t>(std::count(matched.begin(), matched.end(), true));

        if (rule.action == CleanAction::DropRow) {
            std::vector<std::vector<Cell>> kept;
            std::vector<bool> keptFlags;
            kept.reserve(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (matched[r]) continue;
                kept.push_back(std::move(rows[r]));
                keptFlags.push_back(flagged[r]);
            }
            outcome.dropped = outcome.matched;
            rows = std::move(kept);
            flagged = std::move(keptFlags);
        } else {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (matched[r]) flagged[r] = true;
            }
        }
        report.perRule.push_back(std::move(outcome));
    }

    report.rowsAfter = rows.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (flagged[r]) report.flaggedRows.push_back(r);
    }

    Provenance prov = ds.provenance();
    prov.rowsBeforeCleaning = report.rowsBefore;
    prov.rowsAfterCleaning = report.rowsAfter;
    return {Dataset(ds.schema(), std::move(rows), std::move(prov)), std::move(report)};
}

Dataset impute(const Dataset& ds, const ImputeSpec& spec) {
    const std::size_t col = ds.columnIndex(spec.column);
    const ColumnKind kind = ds.schema()[col].kind;
    if (kind == ColumnKind::Categorical || kind == ColumnKind::Date) {
        throw ConfigError("impute: column '" + spec.column + "' is not numeric");
    }

    std::vector<std::size_t> complete;
    std::vector<std::size_t> missing;
    for (std::size_t r = 0; r < ds.rowCount(); ++r) {
        if (cellMissing(ds.cell(r, col))) missing.push_back(r);
        else complete.push_back(r);
    }
    if (complete.empty()) {
        throw DataError("impute: all values missing in column '" + spec.column + "'");
    }
    if (missing.empty()) return ds;

    std::vector<std::vector<Cell>> rows = ds.rows();

    auto fill = [&](std::size_t r, double value) {
        if (kind == ColumnKind::Integer) {
            rows[r][col] = static_cast<long long>(std::llround(value));
        } else if (kind == ColumnKind::Boolean) {
            rows[r][col] = value >= 0.5;
        } else {
            rows[r][col] = value;
        }
    };

    switch (spec.strategy) {
        case ImputeSpec::Strategy::Mean: {
            double sum = 0.0;
            for (std::size_t r : complete) sum += cellAsReal(ds.cell(r, col));
            const double mean = sum / static_cast<double>(complete.size());
            for (std::size_t r : missing) fill(r, mean);
            break;
        }
        case ImputeSpec::Strategy::Median: {
            std::vector<double> values;
            values.reserve(complete.size());
            for (std::size_t r : complete) values.push_back(cellAsReal(ds.cell(r, col)));
            std::sort(values.begin(), values.end());
            const std::size_t n = values.size();
            const double median = (n % 2 == 1) ? values[n / 2]
                                               : 0.5 * (values[n / 2 - 1] + values[n / 2]);
            for (std::size_t r : missing) fill(r, median);
            break;
        }
        case ImputeSpec::Strategy::Knn: {
            if (spec.k < 1) throw ConfigError("impute knn: k must be >= 1");
            if (static_cast<std::size_t>(spec.k) > complete.size()) {
                throw ConfigError("impute knn: k = " + std::to_string(spec.k) +
                                  " exceeds complete-row count " +
                                  std::to_string(complete.size()));
            }
            if (spec.distanceColumns.empty()) {
                throw ConfigError("impute knn: distance_columns required");
            }
            std::vector<std::size_t> distCols;
            for (const auto& name : spec.distanceColumns) {
                const std::size_t dc = ds.columnIndex(name);
                if (!ds.columnComplete(dc)) {
                    throw ConfigError("impute knn: distance column '" + name +
                                      "' has missing values");
                }
                distCols.push_back(dc);
            }
            auto rowPoint = [&](std::size_t r) {
                std::vector<double> p(distCols.size());
                for (std::size_t i = 0; i < distCols.size(); ++i) {
                    p[i] = cellAsReal(ds.cell(r, distCols[i]));
                }
                return p;
            };
            for (std::size_t r : missing) {
                const auto target = rowPoint(r);
                std::vector<std::pair<double, std::size_t>> dist;
                dist.reserve(complete.size());
                for (std::size_t cRow : complete) {
                    const auto p = rowPoint(cRow);
                    double s = 0.0;
                    for (std::size_t i = 0; i < p.size(); ++i) {
                        const double d = p[i] - target[i];
                        s += d * d;
                    }
                    dist.emplace_back(s, cRow);
                }
                std::sort(dist.begin(), dist.end());
                double sum = 0.0;
                for (int i = 0; i < spec.k; ++i) {
                    sum += cellAsReal(ds.cell(dist[static_cast<std::size_t>(i)].second, col));
                }
                fill(r, sum / spec.k);
            }
            break;
        }
    }

    return Dataset(ds.schema(), std::move(rows), ds.provenance());
}

std::pair<FeatureMatrix, ScalingParams> scaleMinMax(const FeatureMatrix& m, double tMin,
                                                    double tMax, ConstantColumnPolicy policy) {
    if (!(tMax > tMin)) throw ConfigError("scale_minmax: t_max must exceed t_min");

    std::vector<std::size_t> keep;
    ScalingParams params;
    for (std::size_t c = 0; c < m.columnCount(); ++c) {
        double rMin = m.at(0, c), rMax = m.at(0, c);
        for (std::size_t r = 1; r < m.rowCount(); ++r) {
            rMin = std::min(rMin, m.at(r, c));
            rMax = std::max(rMax, m.at(r, c));
        }
        if (!(rMax > rMin)) {
            if (policy == ConstantColumnPolicy::Error) {
                throw NumericError("scaling error: column '" + m.columnNames()[c] +
                                   "' is constant");
            }
            continue;  // dropped
        }
        ScalingColumn sc;
        sc.rMin = rMin;
        sc.rMax = rMax;
        sc.tMin = tMin;
        sc.tMax = tMax;
        sc.sc = (tMax - tMin) / (rMax - rMin);
        sc.of = tMin - sc.sc * rMin;
        params.columns.push_back(m.columnNames()[c]);
        params.params.push_back(sc);
        keep.push_back(c);
    }
    if (keep.empty()) throw NumericError("scaling error: no non-constant columns");

    std::vector<double> values;
    values.reserve(m.rowCount() * keep.size());
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        for (std::size_t i = 0; i < keep.size(); ++i) {
            const ScalingColumn& sc = params.params[i];
            const double x = m.at(r, keep[i]);
            // Pin the endpoints so min/max map exactly even under rounding.
            double v;
            if (x == sc.rMin) v = tMin;
            else if (x == sc.rMax) v = tMax;
            else v = sc.sc * x + sc.of;
            values.push_back(v);
        }
    }
    FeatureMatrix scaled(m.rowCount(), keep.size(), std::move(values), params.columns, m.rowIds());
    scaled.setScaling(params);
    return {std::move(scaled), std::move(params)};
}

FeatureMatrix unscale(const FeatureMatrix& m, const ScalingParams& params) {
    if (params.columns.size() != m.columnCount()) {
        throw ConfigError("unscale: params cover " + std::to_string(params.columns.size()) +
                          " columns, matrix has " + std::to_string(m.columnCount()));
    }
    for (std::size_t c = 0; c < m.columnCount(); ++c) {
        if (params.columns[c] != m.columnNames()[c]) {
            throw ConfigError("unscale: column mismatch at " + std::to_string(c) + " ('" +
                              params.columns[c] + "' vs '" + m.columnNames()[c] + "')");
        }
    }
    std::vector<double> values;
    values.reserve(m.rowCount() * m.columnCount());
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        for (std::size_t c = 0; c < m.columnCount(); ++c) {
            const ScalingColumn& sc = params.params[c];
            const double v = m.at(r, c);
            double x;
            if (v == sc.tMin) x = sc.rMin;
            else if (v == sc.tMax) x = sc.rMax;
            else x = (v - sc.of) / sc.sc;
            values.push_back(x);
        }
    }
    return FeatureMatrix(m.rowCount(), m.columnCount(), std::move(values), m.columnNames(),
                         m.rowIds());
}

Recipe Recipe::age(std::optional<int> referenceYear) {
    Recipe r;
    r.name = "Age";
    r.kind = Kind::YearDiff;
    r.columns = {"Year_Birth"};
    r.referenceYear = referenceYear;
    return r;
}

Recipe Recipe::children() {
    Recipe r;
    r.name = "Children";
    r.kind = Kind::Sum;
    r.columns = {"Kidhome", "Teenhome"};
    return r;
}

Recipe Recipe::totalSpend() {
    Recipe r;
    r.name = "TotalSpend";
    r.kind = Kind::Sum;
    r.columns = {"MntWines", "MntFruits", "MntMeatProducts", "MntFishProducts",
                 "MntSweetProducts", "MntGoldProds"};
    return r;
}

Recipe Recipe::totalPurchases() {
    Recipe r;
    r.name = "TotalPurchases";
    r.kind = Kind::Sum;
    r.columns = {"NumWebPurchases", "NumCatalogPurchases", "NumStorePurchases"};
    return r;
}

Recipe Recipe::builtin(const std::string& name) {
    if (name == "Age") return age();
    if (name == "Children") return children();
    if (name == "TotalSpend") return totalSpend();
    if (name == "TotalPurchases") return totalPurchases();
    throw ConfigError("unknown built-in recipe '" + name + "'");
}

Dataset engineerFeatures(const Dataset& ds, const std::vector<Recipe>& recipes) {
    std::vector<ColumnSpec> schema = ds.schema();
    std::vector<std::vector<Cell>> rows = ds.rows();

    for (const auto& recipe : recipes) {
        for (const auto& col : schema) {
            if (col.name == recipe.name) {
                throw ConfigError("engineer: column '" + recipe.name + "' already exists");
            }
        }

        std::vector<Cell> values(rows.size());
        switch (recipe.kind) {
            case Recipe::Kind::Sum: {
                std::vector<std::size_t> cols;
                bool anyReal = false;
                for (const auto& name : recipe.columns) {
                    const std::size_t c = ds.columnIndex(name);
                    const ColumnKind kind = ds.schema()[c].kind;
                    if (kind == ColumnKind::Categorical || kind == ColumnKind::Date) {
                        throw ConfigError("engineer: column '" + name + "' is not numeric");
                    }
                    if (kind == ColumnKind::Real) anyReal = true;
                    if (!ds.columnComplete(c)) {
                        throw ConfigError("engineer: column '" + name +
                                          "' has missing values; impute first");
                    }
                    cols.push_back(c);
                }
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    double sum = 0.0;
                    for (std::size_t c : cols) sum += cellAsReal(rows[r][c]);
                    if (anyReal) values[r] = sum;
                    else values[r] = static_cast<long long>(std::llround(sum));
                }
                schema.push_back(
                    ColumnSpec{recipe.name, anyReal ? ColumnKind::Real : ColumnKind::Integer,
                               false});
                break;
            }
            case Recipe::Kind::YearDiff: {
                const std::size_t c = ds.columnIndex(recipe.columns.at(0));
                if (!ds.columnComplete(c)) {
                    throw ConfigError("engineer: column '" + recipe.columns[0] +
                                      "' has missing values; impute first");
                }
                int refYear;
                if (recipe.referenceYear) {
                    refYear = *recipe.referenceYear;
                } else {
                    const int dt = ds.findColumn("Dt_Customer");
                    if (dt < 0) {
                        throw ConfigError(
                            "engineer: no reference year given and no Dt_Customer column to "
                            "derive it from");
                    }
                    refYear = 0;
                    bool any = false;
                    for (const auto& row : rows) {
                        const Cell& cell = row[static_cast<std::size_t>(dt)];
                        if (cellMissing(cell)) continue;
                        int y, mo, d;
                        civilFromDays(std::get<long long>(cell), y, mo, d);
                        refYear = any ? std::max(refYear, y) : y;
                        any = true;
                    }
                    if (!any) throw ConfigError("engineer: Dt_Customer has no values");
                }
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    values[r] = static_cast<long long>(refYear) -
                                static_cast<long long>(std::llround(cellAsReal(rows[r][c])));
                }
                schema.push_back(ColumnSpec{recipe.name, ColumnKind::Integer, false});
                break;
            }
        }
        for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(values[r]);
    }

    return Dataset(std::move(schema), std::move(rows), ds.provenance());
}

Split split(const FeatureMatrix& m, const std::vector<int>& labels, const SplitSpec& spec) {
    if (labels.size() != m.rowCount()) {
        throw ConfigError("split: labels length " + std::to_string(labels.size()) +
                          " != row count " + std::to_string(m.rowCount()));
    }
    if (!(spec.testFraction > 0.0 && spec.testFraction < 1.0)) {
        throw ConfigError("split: test_fraction must be in (0,1)");
    }

    const std::size_t n = m.rowCount();
    std::vector<std::size_t> testIdx;
    auto rng = makeRng(spec.seed);

    if (spec.stratify) {
        std::vector<std::size_t> classes[2];
        for (std::size_t i = 0; i < n; ++i) classes[labels[i] == 1 ? 1 : 0].push_back(i);
        for (const auto& cls : classes) {
            if (!cls.empty() && cls.size() < 2) {
                throw ConfigError("split: a class has fewer than 2 members under stratification");
            }
        }
        // Per-class floor, then largest-remainder top-up so the total test
        // count still equals floor(n * fraction).
        const std::size_t totalTake =
            static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.testFraction));
        std::size_t take[2];
        double remainder[2];
        std::size_t allocated = 0;
        for (int c = 0; c < 2; ++c) {
            const double exact = static_cast<double>(classes[c].size()) * spec.testFraction;
            take[c] = static_cast<std::size_t>(std::floor(exact));
            remainder[c] = exact - static_cast<double>(take[c]);
            allocated += take[c];
        }
        while (allocated < totalTake) {
            int best = -1;
            for (int c = 0; c < 2; ++c) {
                if (take[c] >= classes[c].size()) continue;
                if (best < 0 || remainder[c] > remainder[best]) best = c;
            }
            if (best < 0) break;
            ++take[best];
            remainder[best] = -1.0;
            ++allocated;
        }
        for (int c = 0; c < 2; ++c) {
            auto picked = sampleWithoutReplacement(rng, classes[c].size(), take[c]);
            for (std::size_t p : picked) testIdx.push_back(classes[c][p]);
        }
    } else {
        const std::size_t take =
            static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.testFraction));
        testIdx = sampleWithoutReplacement(rng, n, take);
    }

    std::vector<bool> inTest(n, false);
    for (std::size_t i : testIdx) inTest[i] = true;

    std::vector<std::size_t> trainRows, testRows;
    for (std::size_t i = 0; i < n; ++i) (inTest[i] ? testRows : trainRows).push_back(i);

    Split out;
    out.trainX = m.selectRows(trainRows);
    out.testX = m.selectRows(testRows);
    for (std::size_t i : trainRows) out.trainY.push_back(labels[i]);
    for (std::size_t i : testRows) out.testY.push_back(labels[i]);
    return out;
}

FeatureMatrix smote(const FeatureMatrix& minority, int k, std::size_t nSynthetic,
                    std::uint64_t seed) {
    const std::size_t n = minority.rowCount();
    if (k < 1) throw ConfigError("smote: k must be >= 1");
    if (static_cast<std::size_t>(k) >= n) {
        throw ConfigError("smote: k = " + std::to_string(k) + " must be below minority count " +
                          std::to_string(n));
    }

    // k nearest minority neighbors per row, by (distance, index) for stable ties.
    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist.emplace_back(euclidean(minority.row(i), minority.row(j)), j);
        }
        std::sort(dist.begin(), dist.end());
        neighbors[i].reserve(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) neighbors[i].push_back(dist[static_cast<std::size_t>(t)].second);
    }

    auto rng = makeRng(seed);
    const std::size_t d = minority.columnCount();
    std::vector<double> values;
    values.reserve(nSynthetic * d);
    std::vector<long long> ids;
    ids.reserve(nSynthetic);
    for (std::size_t s = 0; s < nSynthetic; ++s) {
        const std::size_t i = pickIndex(rng, n);
        const std::size_t nn = neighbors[i][pickIndex(rng, static_cast<std::size_t>(k))];
        const double lambda = pickUnit(rng);
        for (std::size_t c = 0; c < d; ++c) {
            const double xi = minority.at(i, c);
            values.push_back(xi + lambda * (minority.at(nn, c) - xi));
        }
        ids.push_back(-1 - static_cast<long long>(s));  // synthetic rows get negative ids
    }
    return FeatureMatrix(nSynthetic, d, std::move(values), minority.columnNames(), std::move(ids));
}

FeatureMatrix undersample(const FeatureMatrix& majority, std::size_t keep, std::uint64_t seed) {
    if (keep > majority.rowCount()) {
        throw ConfigError("undersample: keep = " + std::to_string(keep) + " exceeds row count " +
                          std::to_string(majority.rowCount()));
    }
    auto rng = makeRng(seed);
    auto picked = sampleWithoutReplacement(rng, majority.rowCount(), keep);
    std::sort(picked.begin(), picked.end());
    return majority.selectRows(picked);
}

std::vector<std::string> selectFeaturesFilter(const FeatureMatrix& m, double threshold) {
    if (threshold < 0.0) throw ConfigError("filter selection: threshold must be >= 0");
    std::vector<std::string> out;
    const double n = static_cast<double>(m.rowCount());
    if (m.rowCount() == 0) return out;
    for (std::size_t c = 0; c < m.columnCount(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m.rowCount(); ++r) mean += m.at(r, c);
        mean /= n;
        double var = 0.0;
        for (std::size_t r = 0; r < m.rowCount(); ++r) {
            const double d = m.at(r, c) - mean;
            var += d * d;
        }
        var /= n;
        if (var > threshold) out.push_back(m.columnNames()[c]);
    }
    return out;
}

}  // namespace custprof
