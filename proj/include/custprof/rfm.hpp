#pragma once

#include <optional>
#include <string>
#include <vector>

#include "custprof/table.hpp"

namespace custprof {

struct RfmRecord {
    long long customerId = 0;
    double recencyDays = 0.0;
    long long frequency = 0;
    double monetary = 0.0;
    int rScore = 0;  // 1..5 once scored; higher = more recent
    int fScore = 0;  // higher = more purchases
    int mScore = 0;  // higher = more spend
    std::string segmentCode;  // "R{r}F{f}M{m}"
    std::string segmentName;
};

struct RfmOptions {
    // NumDealsPurchases overlaps the three channel counts, so it stays out of
    // frequency unless asked for.
    bool includeDealsInFrequency = false;
    // Reference date (days since 1970-01-01) for the Dt_Customer fallback;
    // defaults to the latest Dt_Customer in the table.
    std::optional<long long> referenceDate;
};

// Raw values from the campaign table: recency straight from Recency (falling
// back to reference_date - Dt_Customer when Recency is absent), frequency as
// the sum of the channel purchase counts, monetary as the sum of the six Mnt
// columns. Scores stay unset.
std::vector<RfmRecord> computeRfm(const Dataset& ds, const RfmOptions& options = {});

// Rank-partition quintile scores (bins groups of near-equal occupancy).
// Recency scores descending (most recent -> bins); frequency and monetary
// ascending. Ties share the score of their first-encountered rank position
// under a stable sort by (value, customer_id).
std::vector<RfmRecord> scoreRfm(std::vector<RfmRecord> records, int bins = 5);

struct SegmentRule {
    std::string name;
    int rMin = 1, rMax = 5;
    int fMin = 1, fMax = 5;
    int mMin = 1, mMax = 5;

    bool matches(const RfmRecord& rec) const;
};

// champion: r>=4, f>=4, m>=4; at-risk-loyal: r<=2, f>=4; lapsed: r<=2, f<=2;
// everything else: regular. First match wins.
std::vector<SegmentRule> defaultSegmentRules();

// Fills segmentCode ("R{r}F{f}M{m}") and segmentName on scored records.
std::vector<RfmRecord> labelSegments(std::vector<RfmRecord> records,
                                     const std::vector<SegmentRule>& rules = defaultSegmentRules());

// customer_id,recency_days,frequency,monetary,r,f,m,segment_code,segment_name
std::string rfmCsv(const std::vector<RfmRecord>& records);

}  // namespace custprof
