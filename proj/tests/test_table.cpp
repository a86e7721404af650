#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "custprof/errors.hpp"
#include "custprof/table.hpp"
#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

using namespace custprof;
using custprof::testing::TempDir;
using custprof::testing::writeFile;

TEST_CASE("load_table parses nullable cells as missing") {
    TempDir dir;
    const auto path = dir.file("t.csv");
    writeFile(path, "ID,Income\n1,50\n2,\n");
    const std::vector<ColumnSpec> schema = {{"ID", ColumnKind::Integer, false},
                                            {"Income", ColumnKind::Real, true}};
    const Dataset ds = loadTable(path, schema);
    REQUIRE(ds.rowCount() == 2);
    CHECK(std::get<long long>(ds.cell(0, 0)) == 1);
    CHECK(std::get<double>(ds.cell(0, 1)) == 50.0);
    CHECK(cellMissing(ds.cell(1, 1)));
}

TEST_CASE("load_table rejects a missing required column by name") {
    TempDir dir;
    const auto path = dir.file("t.csv");
    // Header with every table-3 column except Response.
    std::string header;
    for (const auto& col : table3Schema()) {
        if (col.name == "Response") continue;
        if (!header.empty()) header += ',';
        header += col.name;
    }
    writeFile(path, header + "\n");
    try {
        loadTable(path, table3Schema());
        FAIL("expected schema error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("Response") != std::string::npos);
    }
}

TEST_CASE("merged schema covers the union of both attribute tables") {
    const auto schema = mergedSchema();
    // Table 2 contributes 7 attributes, table 3 a further 22 distinct ones.
    CHECK(schema.size() == 29);
    TempDir dir;
    const auto path = dir.file("m.csv");
    writeCsv(testing::campaignDataset({40, 3, false}), path);
    const Dataset ds = loadTable(path, schema);
    CHECK(ds.columnCount() == 29);
    CHECK(ds.rowCount() == 40);
    for (const char* name : {"ID", "Year_Birth", "Dt_Customer", "Recency", "MntGoldProds",
                             "AcceptedCmp5", "Z_Revenue", "Response"}) {
        CHECK(ds.findColumn(name) >= 0);
    }
}

TEST_CASE("load_table is header-order independent") {
    TempDir dir;
    const auto a = dir.file("a.csv");
    const auto b = dir.file("b.csv");
    writeFile(a, "ID,Income\n1,50\n2,60\n");
    writeFile(b, "Income,ID\n50,1\n60,2\n");
    const std::vector<ColumnSpec> schema = {{"ID", ColumnKind::Integer, false},
                                            {"Income", ColumnKind::Real, true}};
    const Dataset da = loadTable(a, schema);
    const Dataset db = loadTable(b, schema);
    REQUIRE(da.rowCount() == db.rowCount());
    for (std::size_t r = 0; r < da.rowCount(); ++r) {
        for (std::size_t c = 0; c < da.columnCount(); ++c) {
            CHECK(da.cell(r, c) == db.cell(r, c));
        }
    }
}

TEST_CASE("csv round trip preserves cell values") {
    TempDir dir;
    const Dataset original = testing::campaignDataset({60, 5, false});
    const auto path = dir.file("round.csv");
    writeCsv(original, path);
    const Dataset loaded = loadTable(path, original.schema());
    REQUIRE(loaded.rowCount() == original.rowCount());
    for (std::size_t r = 0; r < original.rowCount(); ++r) {
        for (std::size_t c = 0; c < original.columnCount(); ++c) {
            const Cell& a = original.cell(r, c);
            const Cell& b = loaded.cell(r, c);
            if (std::holds_alternative<double>(a)) {
                const double va = std::get<double>(a);
                const double vb = std::get<double>(b);
                CHECK(std::abs(va - vb) <= 1e-9 * std::max(1.0, std::abs(va)));
            } else {
                CHECK(a == b);
            }
        }
    }
}

TEST_CASE("empty dataset writes a header-only file") {
    TempDir dir;
    const auto path = dir.file("empty.csv");
    const Dataset empty(table2Schema(), {});
    writeCsv(empty, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("ID,", 0) == 0);
    CHECK_FALSE(std::getline(in, line));
    const Dataset loaded = loadTable(path, table2Schema());
    CHECK(loaded.rowCount() == 0);
}

TEST_CASE("date parsing falls back to day-first") {
    CHECK(parseDate("2014-06-29", "YYYY-MM-DD") == daysFromCivil(2014, 6, 29));
    CHECK(parseDate("29-06-2014", "YYYY-MM-DD") == daysFromCivil(2014, 6, 29));
    CHECK_FALSE(parseDate("junk", "YYYY-MM-DD").has_value());
    CHECK(formatDate(daysFromCivil(2014, 6, 29), "YYYY-MM-DD") == "2014-06-29");
    CHECK(formatDate(daysFromCivil(2014, 6, 29), "DD-MM-YYYY") == "29-06-2014");
}

TEST_CASE("one_hot encoding expands into indicators summing to 1") {
    std::vector<ColumnSpec> schema = {{"ID", ColumnKind::Integer, false},
                                      {"Marital_Status", ColumnKind::Categorical, false}};
    std::vector<std::vector<Cell>> rows = {
        {1LL, std::string("Married")}, {2LL, std::string("Single")}, {3LL, std::string("Married")}};
    const Dataset ds(schema, rows);
    const auto m = encodeFeatures(ds, {"Marital_Status"},
                                  {{"Marital_Status", {EncodingKind::OneHot, {}}}});
    REQUIRE(m.columnCount() == 2);
    CHECK(m.columnNames()[0] == "Marital_Status=Married");
    CHECK(m.columnNames()[1] == "Marital_Status=Single");
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        CHECK(m.at(r, 0) + m.at(r, 1) == 1.0);
    }
    CHECK(m.rowIds() == std::vector<long long>{1, 2, 3});
}

TEST_CASE("ordinal encoding ranks categories by the given order") {
    std::vector<ColumnSpec> schema = {{"Education", ColumnKind::Categorical, false}};
    std::vector<std::vector<Cell>> rows = {{std::string("PhD")}, {std::string("Basic")}};
    const Dataset ds(schema, rows);
    const auto m = encodeFeatures(
        ds, {"Education"},
        {{"Education", {EncodingKind::Ordinal, {"Basic", "Graduation", "PhD"}}}});
    CHECK(m.at(0, 0) == 2.0);
    CHECK(m.at(1, 0) == 0.0);

    CHECK_THROWS_AS(encodeFeatures(ds, {"Education"},
                                   {{"Education", {EncodingKind::Ordinal, {"Basic"}}}}),
                    ConfigError);
}

TEST_CASE("numeric passthrough copies source cells") {
    std::vector<ColumnSpec> schema = {{"Kidhome", ColumnKind::Integer, false},
                                      {"Teenhome", ColumnKind::Integer, false}};
    std::vector<std::vector<Cell>> rows = {{1LL, 0LL}, {2LL, 1LL}};
    const Dataset ds(schema, rows);
    const auto m = encodeFeatures(ds, {"Kidhome", "Teenhome"}, {});
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(1, 1) == 1.0);
}

TEST_CASE("encoding a column with missing cells directs the caller to impute") {
    std::vector<ColumnSpec> schema = {{"Income", ColumnKind::Real, true}};
    std::vector<std::vector<Cell>> rows = {{50.0}, {std::monostate{}}};
    const Dataset ds(schema, rows);
    try {
        encodeFeatures(ds, {"Income"}, {});
        FAIL("expected incomplete-data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("impute") != std::string::npos);
    }
}
