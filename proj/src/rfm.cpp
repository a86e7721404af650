#include "custprof/rfm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "custprof/errors.hpp"

namespace custprof {

std::vector<RfmRecord> computeRfm(const Dataset& ds, const RfmOptions& options) {
    std::vector<std::string> required = {"ID",
                                         "NumWebPurchases",
                                         "NumCatalogPurchases",
                                         "NumStorePurchases",
                                         "MntWines",
                                         "MntFruits",
                                         "MntMeatProducts",
                                         "MntFishProducts",
                                         "MntSweetProducts",
                                         "MntGoldProds"};
    if (options.includeDealsInFrequency) required.push_back("NumDealsPurchases");
    std::vector<std::size_t> cols;
    for (const auto& name : required) {
        const int idx = ds.findColumn(name);
        if (idx < 0) throw DataError("schema error: RFM needs column '" + name + "'");
        if (!ds.columnComplete(static_cast<std::size_t>(idx))) {
            throw DataError("RFM column '" + name + "' has missing values; impute first");
        }
        cols.push_back(static_cast<std::size_t>(idx));
    }

    // Recency comes precomputed; when the column is absent, fall back to
    // days since the last purchase date.
    const int recencyCol = ds.findColumn("Recency");
    const int dateCol = ds.findColumn("Dt_Customer");
    long long referenceDate = 0;
    if (recencyCol < 0) {
        if (dateCol < 0) {
            throw DataError("schema error: RFM needs 'Recency' or 'Dt_Customer'");
        }
        if (!ds.columnComplete(static_cast<std::size_t>(dateCol))) {
            throw DataError("RFM column 'Dt_Customer' has missing values; impute first");
        }
        if (options.referenceDate) {
            referenceDate = *options.referenceDate;
        } else {
            for (std::size_t r = 0; r < ds.rowCount(); ++r) {
                const long long d =
                    std::get<long long>(ds.cell(r, static_cast<std::size_t>(dateCol)));
                referenceDate = r == 0 ? d : std::max(referenceDate, d);
            }
        }
    } else if (!ds.columnComplete(static_cast<std::size_t>(recencyCol))) {
        throw DataError("RFM column 'Recency' has missing values; impute first");
    }

    auto value = [&](std::size_t row, std::size_t which) {
        return cellAsReal(ds.cell(row, cols[which]));
    };

    std::vector<RfmRecord> records(ds.rowCount());
    for (std::size_t r = 0; r < ds.rowCount(); ++r) {
        RfmRecord& rec = records[r];
        rec.customerId = static_cast<long long>(std::llround(value(r, 0)));
        if (recencyCol >= 0) {
            rec.recencyDays = cellAsReal(ds.cell(r, static_cast<std::size_t>(recencyCol)));
        } else {
            const long long d = std::get<long long>(ds.cell(r, static_cast<std::size_t>(dateCol)));
            rec.recencyDays = static_cast<double>(referenceDate - d);
        }
        double freq = value(r, 1) + value(r, 2) + value(r, 3);
        if (options.includeDealsInFrequency) freq += value(r, 10);
        rec.frequency = static_cast<long long>(std::llround(freq));
        rec.monetary = 0.0;
        for (std::size_t w = 4; w <= 9; ++w) rec.monetary += value(r, w);
    }
    return records;
}

namespace {

// Scores one dimension in place. Records are ranked by (value, customer_id);
// rank i of n lands in bin floor(i*bins/n). ascending=false flips the bin
// index, which is how recency maps "most recent" to the top score.
void scoreDimension(std::vector<RfmRecord>& records, int bins, bool ascending,
                    double (*key)(const RfmRecord&), void (*setScore)(RfmRecord&, int)) {
    const std::size_t n = records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ka = key(records[a]), kb = key(records[b]);
        if (ka != kb) return ka < kb;
        return records[a].customerId < records[b].customerId;
    });

    int runScore = 0;
    double runValue = 0.0;
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t idx = order[pos];
        const int bin =
            static_cast<int>(pos * static_cast<std::size_t>(bins) / n);  // 0..bins-1
        int score = ascending ? bin + 1 : bins - bin;
        const double v = key(records[idx]);
        if (pos > 0 && v == runValue) {
            score = runScore;  // ties share the first-encountered score
        } else {
            runScore = score;
            runValue = v;
        }
        setScore(records[idx], score);
    }
}

}  // namespace

std::vector<RfmRecord> scoreRfm(std::vector<RfmRecord> records, int bins) {
    if (bins < 1) throw ConfigError("rfm: bins must be >= 1");
    if (records.size() < static_cast<std::size_t>(bins)) {
        throw ConfigError("rfm scoring error: " + std::to_string(records.size()) +
                          " records is fewer than " + std::to_string(bins) + " bins");
    }
    scoreDimension(
        records, bins, /*ascending=*/false, [](const RfmRecord& r) { return r.recencyDays; },
        [](RfmRecord& r, int s) { r.rScore = s; });
    scoreDimension(
        records, bins, /*ascending=*/true,
        [](const RfmRecord& r) { return static_cast<double>(r.frequency); },
        [](RfmRecord& r, int s) { r.fScore = s; });
    scoreDimension(
        records, bins, /*ascending=*/true, [](const RfmRecord& r) { return r.monetary; },
        [](RfmRecord& r, int s) { r.mScore = s; });
    return records;
}

bool SegmentRule::matches(const RfmRecord& rec) const {
    return rec.rScore >= rMin && rec.rScore <= rMax && rec.fScore >= fMin && rec.fScore <= fMax &&
           rec.mScore >= mMin && rec.mScore <= mMax;
}

std::vector<SegmentRule> defaultSegmentRules() {
    std::vector<SegmentRule> rules;
    rules.push_back(SegmentRule{"champion", 4, 5, 4, 5, 4, 5});
    rules.push_back(SegmentRule{"at-risk-loyal", 1, 2, 4, 5, 1, 5});
    rules.push_back(SegmentRule{"lapsed", 1, 2, 1, 2, 1, 5});
    return rules;
}

std::vector<RfmRecord> labelSegments(std::vector<RfmRecord> records,
                                     const std::vector<SegmentRule>& rules) {
    for (auto& rec : records) {
        if (rec.rScore < 1 || rec.fScore < 1 || rec.mScore < 1) {
            throw ConfigError("label_segments: records must be scored first");
        }
        rec.segmentCode = "R" + std::to_string(rec.rScore) + "F" + std::to_string(rec.fScore) +
                          "M" + std::to_string(rec.mScore);
        rec.segmentName = "regular";
        for (const auto& rule : rules) {
            if (rule.matches(rec)) {
                rec.segmentName = rule.name;
                break;
            }
        }
    }
    return records;
}

std::string rfmCsv(const std::vector<RfmRecord>& records) {
    std::ostringstream out;
    out << "customer_id,recency_days,frequency,monetary,r,f,m,segment_code,segment_name\n";
    for (const auto& r : records) {
        out << r.customerId << ',' << formatReal(r.recencyDays) << ',' << r.frequency << ','
            << formatReal(r.monetary) << ',' << r.rScore << ',' << r.fScore << ',' << r.mScore
            << ',' << r.segmentCode << ',' << r.segmentName << '\n';
    }
    return out.str();
}

}  // namespace custprof
