#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace custprof {

enum class ColumnKind { Integer, Real, Categorical, Date, Boolean };

// Column of one of the two campaign-dataset schemas (or a custom one).
// Date columns carry their input format as a token pattern, e.g. "YYYY-MM-DD".
struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::Real;
    bool nullable = false;
    std::string dateFormat = "YYYY-MM-DD";
};

// A cell is missing (monostate) or holds a typed value. Integers stay distinct
// from reals so ID and count columns round-trip exactly; Date cells store
// days since 1970-01-01 as the integer alternative and format per the column.
using Cell = std::variant<std::monostate, long long, double, std::string, bool>;

inline bool cellMissing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

// Numeric view of a non-missing cell (Integer/Real/Boolean/Date all convert).
double cellAsReal(const Cell& c);

struct Provenance {
    std::string sourcePath;
    std::size_t rowsBeforeCleaning = 0;
    std::size_t rowsAfterCleaning = 0;
};

class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<ColumnSpec> schema, std::vector<std::vector<Cell>> rows,
            Provenance provenance = {});

    const std::vector<ColumnSpec>& schema() const { return schema_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const Provenance& provenance() const { return provenance_; }

    std::size_t rowCount() const { return rows_.size(); }
    std::size_t columnCount() const { return schema_.size(); }

    // -1 when absent.
    int findColumn(const std::string& name) const;
    // Throws ConfigError naming the column when absent.
    std::size_t columnIndex(const std::string& name) const;
    const Cell& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }

    // Numeric column values; missing cells excluded. Throws on non-numeric kind.
    std::vector<double> numericColumn(const std::string& name) const;
    bool columnComplete(std::size_t col) const;

private:
    std::vector<ColumnSpec> schema_;
    std::vector<std::vector<Cell>> rows_;
    Provenance provenance_;
};

// Min-max scaling parameters per column: x_s = sc * x_u + of maps
// [rMin, rMax] onto [tMin, tMax].
struct ScalingColumn {
    double rMin = 0.0;
    double rMax = 1.0;
    double tMin = 0.0;
    double tMax = 1.0;
    double sc = 1.0;
    double of = 0.0;
};

struct ScalingParams {
    std::vector<std::string> columns;
    std::vector<ScalingColumn> params;
};

// Dense row-major numeric matrix with column names and a row -> customer-ID map.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                  std::vector<std::string> columnNames, std::vector<long long> rowIds);

    std::size_t rowCount() const { return rows_; }
    std::size_t columnCount() const { return cols_; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_.data() + r * cols_, cols_);
    }
    const std::vector<double>& values() const { return values_; }
    const std::vector<std::string>& columnNames() const { return columnNames_; }
    const std::vector<long long>& rowIds() const { return rowIds_; }
    int findColumn(const std::string& name) const;

    const std::optional<ScalingParams>& scaling() const { return scaling_; }
    void setScaling(ScalingParams p) { scaling_ = std::move(p); }

    std::vector<double> column(std::size_t c) const;
    FeatureMatrix selectColumns(const std::vector<std::size_t>& cols) const;
    FeatureMatrix selectRows(const std::vector<std::size_t>& rows) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
    std::vector<std::string> columnNames_;
    std::vector<long long> rowIds_;
    std::optional<ScalingParams> scaling_;
};

// Schema presets for the two attribute tables of the campaign data.
std::vector<ColumnSpec> table2Schema();
std::vector<ColumnSpec> table3Schema();
std::vector<ColumnSpec> mergedSchema();
std::vector<ColumnSpec> schemaPreset(const std::string& name);

// Reads a delimited file with a mandatory header row. File columns are matched
// to the schema by header name (order-independent); extra file columns are
// ignored, absent nullable columns load as all-missing, absent non-nullable
// columns raise a schema error naming the column. Empty fields are missing;
// an unparseable cell in a nullable column becomes missing, in a non-nullable
// column it raises an error with row/column coordinates.
Dataset loadTable(const std::string& path, const std::vector<ColumnSpec>& schema,
                  char delimiter = ',');

void writeCsv(const Dataset& ds, const std::string& path, char delimiter = ',');
void writeCsv(const FeatureMatrix& m, const std::string& path, char delimiter = ',');

enum class EncodingKind { Numeric, OneHot, Ordinal };

struct ColumnEncoding {
    EncodingKind kind = EncodingKind::Numeric;
    std::vector<std::string> ordinalOrder;  // total order over observed categories
};

// Builds a FeatureMatrix from the named columns. one_hot expands a categorical
// column with c categories into c indicator columns named "col=value"
// (categories in sorted order); ordinal maps categories to 0..c-1 by the given
// order. Row IDs come from the ID column when present, else 0..n-1.
FeatureMatrix encodeFeatures(const Dataset& ds, const std::vector<std::string>& columns,
                             const std::map<std::string, ColumnEncoding>& encodings);

// Date helpers shared by parsing, cleaning and feature engineering.
long long daysFromCivil(int year, int month, int day);
void civilFromDays(long long days, int& year, int& month, int& day);
std::optional<long long> parseDate(const std::string& text, const std::string& format);
std::string formatDate(long long days, const std::string& format);
std::string formatReal(double v);

}  // namespace custprof
