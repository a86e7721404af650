#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "custprof/rng.hpp"

namespace custprof::testing {

namespace {

double unitDraw(std::uint64_t& state) {
    state = splitmix64(state);
    return static_cast<double>(state >> 11) * 0x1.0p-53;
}

long long intDraw(std::uint64_t& state, long long lo, long long hi) {
    state = splitmix64(state);
    return lo + static_cast<long long>(state % static_cast<std::uint64_t>(hi - lo + 1));
}

// Picks an index by cumulative weights.
std::size_t categoryDraw(std::uint64_t& state, const std::vector<double>& weights) {
    const double u = unitDraw(state);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace

double normalDraw(std::uint64_t& state) {
    // Box-Muller; one value per call keeps the stream simple to audit.
    double u1 = unitDraw(state);
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = unitDraw(state);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

FeatureMatrix makeMatrix(const std::vector<std::vector<double>>& rows,
                         std::vector<std::string> names) {
    const std::size_t n = rows.size();
    const std::size_t d = n ? rows[0].size() : 0;
    if (names.empty()) {
        for (std::size_t c = 0; c < d; ++c) names.push_back("x" + std::to_string(c));
    }
    std::vector<double> values;
    values.reserve(n * d);
    for (const auto& row : rows) values.insert(values.end(), row.begin(), row.end());
    std::vector<long long> ids(n);
    for (std::size_t r = 0; r < n; ++r) ids[r] = static_cast<long long>(r);
    return FeatureMatrix(n, d, std::move(values), std::move(names), std::move(ids));
}

LabeledMatrix blobs(const std::vector<std::vector<double>>& centers, std::size_t perBlob,
                    double sigma, std::uint64_t seed) {
    std::uint64_t state = seed ^ 0xb10b;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (std::size_t b = 0; b < centers.size(); ++b) {
        for (std::size_t i = 0; i < perBlob; ++i) {
            std::vector<double> row(centers[b].size());
            for (std::size_t c = 0; c < row.size(); ++c) {
                row[c] = centers[b][c] + sigma * normalDraw(state);
            }
            rows.push_back(std::move(row));
            labels.push_back(static_cast<int>(b));
        }
    }
    return {makeMatrix(rows), std::move(labels)};
}

LabeledMatrix xorBlobs(std::size_t n, std::uint64_t seed) {
    std::uint64_t state = seed ^ 0x404;
    const double centers[4][2] = {{0.25, 0.25}, {0.75, 0.75}, {0.25, 0.75}, {0.75, 0.25}};
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t corner = i % 4;
        double x = centers[corner][0] + 0.09 * normalDraw(state);
        double y = centers[corner][1] + 0.09 * normalDraw(state);
        rows.push_back({std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)});
        labels.push_back(corner < 2 ? 0 : 1);
    }
    return {makeMatrix(rows, {"x", "y"}), std::move(labels)};
}

Dataset campaignDataset(const CampaignOptions& options) {
    std::uint64_t state = options.seed ^ 0xca3b;
    const auto schema = mergedSchema();
    const std::size_t n = options.rows;

    const std::vector<std::string> educations = {"Basic", "2n Cycle", "Graduation", "Master",
                                                 "PhD"};
    const std::vector<double> educationWeights = {0.025, 0.09, 0.50, 0.165, 0.22};
    const std::vector<std::string> maritals = {"Married", "Together", "Single", "Divorced",
                                               "Widow"};
    const std::vector<double> maritalWeights = {0.39, 0.25, 0.21, 0.10, 0.05};

    struct RowDraft {
        std::vector<Cell> cells;
        double responseScore = 0.0;
    };
    std::vector<RowDraft> drafts;
    drafts.reserve(n);

    auto columnOf = [&](const std::string& name) {
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (schema[i].name == name) return i;
        }
        return static_cast<std::size_t>(-1);
    };
    const std::size_t responseCol = columnOf("Response");

    for (std::size_t i = 0; i < n; ++i) {
        RowDraft draft;
        draft.cells.assign(schema.size(), std::monostate{});
        auto set = [&](const std::string& name, Cell value) {
            draft.cells[columnOf(name)] = std::move(value);
        };

        const double engagement = normalDraw(state);
        const double income =
            std::clamp(48000.0 * std::exp(0.35 * normalDraw(state)), 8000.0, 160000.0);
        const long long kids = intDraw(state, 0, 2) == 2 ? 1 : intDraw(state, 0, 1);
        const long long teens = intDraw(state, 0, 2) == 2 ? 1 : intDraw(state, 0, 1);
        const double children = static_cast<double>(kids + teens);

        set("ID", static_cast<long long>(1000 + i));
        set("Year_Birth",
            static_cast<long long>(std::clamp(1970.0 + 12.0 * normalDraw(state), 1940.0,
                                              1998.0)));
        set("Education", educations[categoryDraw(state, educationWeights)]);
        set("Marital_Status", maritals[categoryDraw(state, maritalWeights)]);
        set("Income", std::round(income * 100.0) / 100.0);
        set("Kidhome", kids);
        set("Teenhome", teens);
        set("Dt_Customer", daysFromCivil(2012 + static_cast<int>(intDraw(state, 0, 2)),
                                         static_cast<int>(intDraw(state, 1, 12)),
                                         static_cast<int>(intDraw(state, 1, 28))));

        const long long recency = intDraw(state, 0, 99);
        set("Recency", recency);

        const double spendFactor = std::max(
            0.02, 1.0 / (1.0 + std::exp(-(income - 45000.0) / 20000.0)) + 0.30 * engagement -
                      0.22 * children);
        const double totalSpend = 1400.0 * spendFactor;
        const double shares[6] = {0.45, 0.06, 0.26, 0.08, 0.05, 0.10};
        const char* mnts[6] = {"MntWines", "MntFruits", "MntMeatProducts", "MntFishProducts",
                               "MntSweetProducts", "MntGoldProds"};
        double actualSpend = 0.0;
        for (int s = 0; s < 6; ++s) {
            const double noisy = totalSpend * shares[s] * (0.5 + unitDraw(state));
            const long long amount = std::max(0LL, static_cast<long long>(std::llround(noisy)));
            actualSpend += static_cast<double>(amount);
            set(mnts[s], amount);
        }

        const double buyRate = spendFactor * 0.8 + 0.2 * unitDraw(state);
        set("NumDealsPurchases", intDraw(state, 0, 5));
        set("NumWebPurchases", static_cast<long long>(std::llround(4.0 * buyRate +
                                                                   2.0 * unitDraw(state))));
        set("NumCatalogPurchases", static_cast<long long>(std::llround(3.5 * buyRate +
                                                                       1.5 * unitDraw(state))));
        set("NumStorePurchases", static_cast<long long>(std::llround(5.0 * buyRate +
                                                                     3.0 * unitDraw(state))));
        set("NumWebVisitsMonth",
            static_cast<long long>(std::clamp(8.0 - 4.0 * spendFactor + 2.0 * normalDraw(state),
                                              0.0, 20.0)));

        long long accepted = 0;
        for (const char* cmp : {"AcceptedCmp1", "AcceptedCmp2", "AcceptedCmp3", "AcceptedCmp4",
                                "AcceptedCmp5"}) {
            const double pAccept = 1.0 / (1.0 + std::exp(-(-2.4 + 1.3 * engagement)));
            const long long hit = unitDraw(state) < pAccept ? 1 : 0;
            accepted += hit;
            set(cmp, hit);
        }
        set("Complain", intDraw(state, 0, 99) == 0 ? 1LL : 0LL);
        set("Z_CostContact", 3LL);
        set("Z_Revenue", 11LL);

        // Responders: recently active, engaged, high-spend customers with a
        // campaign history. Most of the signal sits in interactions and
        // non-monotone effects, which is what makes the task tree-shaped.
        const double spendNorm = std::min(1.2, actualSpend / 2000.0);
        const double lowRecency = 1.0 - static_cast<double>(recency) / 100.0;
        const long long visits =
            std::get<long long>(draft.cells[columnOf("NumWebVisitsMonth")]);
        const long long birthYear = std::get<long long>(draft.cells[columnOf("Year_Birth")]);
        double z = 0.7 * lowRecency + 0.6 * spendNorm + 0.5 * std::min<double>(2.0, accepted) +
                   0.4 * engagement;
        if (recency < 40 && spendNorm > 0.45) z += 2.1;   // active high spenders
        if (visits >= 4 && visits <= 8) z += 0.9;         // mid-range browsers
        if (birthYear < 1955 || birthYear > 1985) z += 0.8;
        z += 0.9 * normalDraw(state);
        draft.responseScore = z;
        drafts.push_back(std::move(draft));
    }

    // Cut at the 85th percentile so ~15% respond.
    std::vector<double> scores;
    scores.reserve(n);
    for (const auto& d : drafts) scores.push_back(d.responseScore);
    std::sort(scores.begin(), scores.end());
    const double cutoff = scores[static_cast<std::size_t>(0.85 * static_cast<double>(n))];

    std::vector<std::vector<Cell>> rows;
    rows.reserve(n + 8);
    for (auto& d : drafts) {
        d.cells[responseCol] = d.responseScore > cutoff ? 1LL : 0LL;
        rows.push_back(std::move(d.cells));
    }

    if (options.dirty) {
        // Duplicate two IDs, add an impossible birth year, blank some incomes,
        // and plant one absurd income for the fence rule to catch.
        rows.push_back(rows[3]);
        rows.push_back(rows[10]);
        auto& older = rows[5];
        older[columnOf("Year_Birth")] = 1893LL;
        for (std::size_t r = 20; r < rows.size() && r < 40; r += 7) {
            rows[r][columnOf("Income")] = std::monostate{};
        }
        rows[15][columnOf("Income")] = 666666.0;
    }

    Provenance prov;
    prov.sourcePath = "synthetic";
    prov.rowsBeforeCleaning = rows.size();
    prov.rowsAfterCleaning = rows.size();
    return Dataset(schema, std::move(rows), std::move(prov));
}

Dataset figureSharesFixture() {
    const auto schema = table2Schema();
    std::vector<std::vector<Cell>> rows;
    std::uint64_t state = 0xf19;
    for (int i = 0; i < 100; ++i) {
        std::vector<Cell> row(schema.size());
        row[0] = static_cast<long long>(100 + i);              // ID
        row[1] = static_cast<long long>(1960 + (i % 30));      // Year_Birth
        row[2] = std::string(i < 97 ? (i % 2 ? "Graduation" : "Master") : "Basic");
        row[3] = std::string(i < 64 ? (i % 2 ? "Married" : "Together")
                                    : (i % 2 ? "Single" : "Divorced"));
        row[4] = 30000.0 + 500.0 * static_cast<double>(intDraw(state, 0, 50));  // Income
        row[5] = static_cast<long long>(i % 2);                // Kidhome
        row[6] = static_cast<long long>((i / 2) % 2);          // Teenhome
        rows.push_back(std::move(row));
    }
    return Dataset(schema, std::move(rows));
}

}  // namespace custprof::testing
