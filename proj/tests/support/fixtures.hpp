#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "custprof/table.hpp"

namespace custprof::testing {

FeatureMatrix makeMatrix(const std::vector<std::vector<double>>& rows,
                         std::vector<std::string> names = {});

struct LabeledMatrix {
    FeatureMatrix x;
    std::vector<int> y;
};

// Gaussian blobs around the given centers, generation label per row.
LabeledMatrix blobs(const std::vector<std::vector<double>>& centers, std::size_t perBlob,
                    double sigma, std::uint64_t seed);

// Four blobs on the unit square corners, diagonal pairs sharing a class; a
// linear model cannot do better than chance here.
LabeledMatrix xorBlobs(std::size_t n, std::uint64_t seed);

struct CampaignOptions {
    std::size_t rows = 2240;
    std::uint64_t seed = 7;
    bool dirty = false;  // inject duplicate IDs, an impossible birth year, missing incomes
};

// Synthetic campaign table on the merged schema: ~64% of customers in
// relationships, ~97% at bachelor level or above, ~15% positive Response
// driven by recency/spend/campaign history plus noise.
Dataset campaignDataset(const CampaignOptions& options = {});

// 100 rows with exactly 64 Married/Together and 97 bachelor-or-above rows.
Dataset figureSharesFixture();

// Deterministic helpers shared by generators.
double normalDraw(std::uint64_t& state);

}  // namespace custprof::testing
