#include "custprof/table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "custprof/errors.hpp"

namespace custprof {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::optional<long long> parseInteger(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    long long value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

std::optional<double> parseReal(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<bool> parseBoolean(const std::string& raw) {
    std::string s = trim(raw);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no") return false;
    return std::nullopt;
}

// One CSV record, honoring quoted fields with doubled quotes; records may
// span physical lines when a quoted field contains a newline.
bool readRecord(std::istream& in, char delimiter, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool inQuotes = false;
    bool sawAny = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        sawAny = true;
        const char c = static_cast<char>(ch);
        if (inQuotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    inQuotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            inQuotes = true;
        } else if (c == delimiter) {
            fields.push_back(field);
            field.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            fields.push_back(field);
            return true;
        } else if (c == '\n') {
            fields.push_back(field);
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (!sawAny) return false;
    fields.push_back(field);
    return true;
}

bool needsQuoting(const std::string& s, char delimiter) {
    return s.find(delimiter) != std::string::npos || s.find('"') != std::string::npos ||
           s.find('\n') != std::string::npos || s.find('\r') != std::string::npos;
}

void writeField(std::ostream& out, const std::string& s, char delimiter) {
    if (!needsQuoting(s, delimiter)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << "\"\"";
        else out << c;
    }
    out << '"';
}

std::string cellText(const Cell& c, const ColumnSpec& spec) {
    if (cellMissing(c)) return "";
    switch (spec.kind) {
        case ColumnKind::Integer: return std::to_string(std::get<long long>(c));
        case ColumnKind::Real: return formatReal(std::get<double>(c));
        case ColumnKind::Categorical: return std::get<std::string>(c);
        case ColumnKind::Boolean: return std::get<bool>(c) ? "1" : "0";
        case ColumnKind::Date: return formatDate(std::get<long long>(c), spec.dateFormat);
    }
    return "";
}

void validateSchema(const std::vector<ColumnSpec>& schema) {
    std::unordered_set<std::string> seen;
    for (const auto& col : schema) {
        if (col.name.empty()) throw ConfigError("schema error: empty column name");
        if (!seen.insert(col.name).second) {
            throw ConfigError("schema error: duplicate column name '" + col.name + "'");
        }
    }
}

ColumnSpec intCol(const std::string& name, bool nullable = false) {
    return ColumnSpec{name, ColumnKind::Integer, nullable};
}

}  // namespace

double cellAsReal(const Cell& c) {
    if (std::holds_alternative<long long>(c)) return static_cast<double>(std::get<long long>(c));
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? 1.0 : 0.0;
    throw DataError("cell has no numeric value");
}

Dataset::Dataset(std::vector<ColumnSpec> schema, std::vector<std::vector<Cell>> rows,
                 Provenance provenance)
    : schema_(std::move(schema)), rows_(std::move(rows)), provenance_(std::move(provenance)) {
    validateSchema(schema_);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (rows_[r].size() != schema_.size()) {
            throw DataError("row " + std::to_string(r) + " has " +
                            std::to_string(rows_[r].size()) + " cells, schema has " +
                            std::to_string(schema_.size()) + " columns");
        }
    }
}

int Dataset::findColumn(const std::string& name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::size_t Dataset::columnIndex(const std::string& name) const {
    const int idx = findColumn(name);
    if (idx < 0) throw ConfigError("unknown column '" + name + "'");
    return static_cast<std::size_t>(idx);
}

std::vector<double> Dataset::numericColumn(const std::string& name) const {
    const std::size_t col = columnIndex(name);
    const ColumnKind kind = schema_[col].kind;
    if (kind == ColumnKind::Categorical) {
        throw ConfigError("column '" + name + "' is categorical, not numeric");
    }
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
        if (cellMissing(row[col])) continue;
        if (kind == ColumnKind::Date) {
            out.push_back(static_cast<double>(std::get<long long>(row[col])));
        } else {
            out.push_back(cellAsReal(row[col]));
        }
    }
    return out;
}

bool Dataset::columnComplete(std::size_t col) const {
    for (const auto& row : rows_) {
        if (cellMissing(row[col])) return false;
    }
    return true;
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                             std::vector<std::string> columnNames, std::vector<long long> rowIds)
    : rows_(rows), cols_(cols), values_(std::move(values)), columnNames_(std::move(columnNames)),
      rowIds_(std::move(rowIds)) {
    if (values_.size() != rows_ * cols_) throw ConfigError("matrix values/shape mismatch");
    if (columnNames_.size() != cols_) throw ConfigError("matrix column-name count mismatch");
    if (rowIds_.size() != rows_) throw ConfigError("matrix row-id count mismatch");
    for (double v : values_) {
        if (std::isnan(v)) throw DataError("feature matrix contains missing entries");
    }
}

int FeatureMatrix::findColumn(const std::string& name) const {
    for (std::size_t i = 0; i < columnNames_.size(); ++i) {
        if (columnNames_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
    return out;
}

FeatureMatrix FeatureMatrix::selectColumns(const std::vector<std::size_t>& cols) const {
    std::vector<double> values;
    values.reserve(rows_ * cols.size());
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (std::size_t c : cols) {
        if (c >= cols_) throw ConfigError("column index out of range");
        names.push_back(columnNames_[c]);
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c : cols) values.push_back(at(r, c));
    }
    return FeatureMatrix(rows_, cols.size(), std::move(values), std::move(names), rowIds_);
}

FeatureMatrix FeatureMatrix::selectRows(const std::vector<std::size_t>& rows) const {
    std::vector<double> values;
    values.reserve(rows.size() * cols_);
    std::vector<long long> ids;
    ids.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= rows_) throw ConfigError("row index out of range");
        const auto rv = row(r);
        values.insert(values.end(), rv.begin(), rv.end());
        ids.push_back(rowIds_[r]);
    }
    return FeatureMatrix(rows.size(), cols_, std::move(values), columnNames_, std::move(ids));
}

std::vector<ColumnSpec> table2Schema() {
    return {
        intCol("ID"),
        intCol("Year_Birth"),
        ColumnSpec{"Education", ColumnKind::Categorical, false},
        ColumnSpec{"Marital_Status", ColumnKind::Categorical, false},
        ColumnSpec{"Income", ColumnKind::Real, true},
        intCol("Kidhome"),
        intCol("Teenhome"),
    };
}

std::vector<ColumnSpec> table3Schema() {
    std::vector<ColumnSpec> s;
    s.push_back(intCol("ID"));
    s.push_back(ColumnSpec{"Dt_Customer", ColumnKind::Date, false});
    s.push_back(intCol("Recency"));
    for (const char* name : {"MntWines", "MntFruits", "MntMeatProducts", "MntFishProducts",
                             "MntSweetProducts", "MntGoldProds"}) {
        s.push_back(intCol(name));
    }
    for (const char* name : {"NumDealsPurchases", "NumWebPurchases", "NumCatalogPurchases",
                             "NumStorePurchases", "NumWebVisitsMonth"}) {
        s.push_back(intCol(name));
    }
    for (const char* name : {"AcceptedCmp1", "AcceptedCmp2", "AcceptedCmp3", "AcceptedCmp4",
                             "AcceptedCmp5"}) {
        s.push_back(intCol(name));
    }
    s.push_back(intCol("Complain"));
    s.push_back(intCol("Z_CostContact"));
    s.push_back(intCol("Z_Revenue"));
    s.push_back(intCol("Response"));
    return s;
}

std::vector<ColumnSpec> mergedSchema() {
    std::vector<ColumnSpec> s = table2Schema();
    for (const auto& col : table3Schema()) {
        bool present = false;
        for (const auto& have : s) {
            if (have.name == col.name) {
                present = true;
                break;
            }
        }
        if (!present) s.push_back(col);
    }
    return s;
}

std::vector<ColumnSpec> schemaPreset(const std::string& name) {
    if (name == "table2") return table2Schema();
    if (name == "table3") return table3Schema();
    if (name == "merged") return mergedSchema();
    throw ConfigError("unknown schema preset '" + name + "' (expected table2|table3|merged)");
}

long long daysFromCivil(int y, int m, int d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097LL + static_cast<long long>(doe) - 719468LL;
}

void civilFromDays(long long z, int& year, int& month, int& day) {
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long long y = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    year = static_cast<int>(y + (month <= 2));
}

namespace {

// Token formats: YYYY (4-digit year), MM, DD, any other character literal.
bool parseDateTokens(const std::string& text, const std::string& format, int& year, int& month,
                     int& day) {
    year = month = day = -1;
    std::size_t ti = 0;
    std::size_t fi = 0;
    auto readDigits = [&](std::size_t count, int& out) {
        if (ti + count > text.size()) return false;
        int v = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const unsigned char c = static_cast<unsigned char>(text[ti + i]);
            if (!std::isdigit(c)) return false;
            v = v * 10 + (c - '0');
        }
        ti += count;
        out = v;
        return true;
    };
    while (fi < format.size()) {
        if (format.compare(fi, 4, "YYYY") == 0) {
            if (!readDigits(4, year)) return false;
            fi += 4;
        } else if (format.compare(fi, 2, "MM") == 0) {
            if (!readDigits(2, month)) return false;
            fi += 2;
        } else if (format.compare(fi, 2, "DD") == 0) {
            if (!readDigits(2, day)) return false;
            fi += 2;
        } else {
            if (ti >= text.size() || text[ti] != format[fi]) return false;
            ++ti;
            ++fi;
        }
    }
    if (ti != text.size()) return false;
    if (year < 0 || month < 1 || month > 12 || day < 1 || day > 31) return false;
    return true;
}

}  // namespace

std::optional<long long> parseDate(const std::string& text, const std::string& format) {
    const std::string s = trim(text);
    if (s.empty()) return std::nullopt;
    int y, m, d;
    if (parseDateTokens(s, format, y, m, d)) return daysFromCivil(y, m, d);
    // The source export's format is not documented; try day-first before failing.
    if (format != "DD-MM-YYYY" && parseDateTokens(s, "DD-MM-YYYY", y, m, d)) {
        return daysFromCivil(y, m, d);
    }
    return std::nullopt;
}

std::string formatDate(long long days, const std::string& format) {
    int y, m, d;
    civilFromDays(days, y, m, d);
    std::string out;
    char buf[8];
    std::size_t fi = 0;
    while (fi < format.size()) {
        if (format.compare(fi, 4, "YYYY") == 0) {
            std::snprintf(buf, sizeof(buf), "%04d", y);
            out += buf;
            fi += 4;
        } else if (format.compare(fi, 2, "MM") == 0) {
            std::snprintf(buf, sizeof(buf), "%02d", m);
            out += buf;
            fi += 2;
        } else if (format.compare(fi, 2, "DD") == 0) {
            std::snprintf(buf, sizeof(buf), "%02d", d);
            out += buf;
            fi += 2;
        } else {
            out += format[fi++];
        }
    }
    return out;
}

std::string formatReal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Dataset loadTable(const std::string& path, const std::vector<ColumnSpec>& schema,
                  char delimiter) {
    validateSchema(schema);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path);

    std::vector<std::string> header;
    if (!readRecord(in, delimiter, header)) {
        throw DataError("empty file (missing header): " + path);
    }
    for (auto& h : header) h = trim(h);

    // Map schema columns onto file columns by name; -1 = absent.
    std::vector<int> fileIndex(schema.size(), -1);
    for (std::size_t s = 0; s < schema.size(); ++s) {
        for (std::size_t f = 0; f < header.size(); ++f) {
            if (header[f] == schema[s].name) {
                fileIndex[s] = static_cast<int>(f);
                break;
            }
        }
        if (fileIndex[s] < 0 && !schema[s].nullable) {
            throw DataError("schema error: missing required column '" + schema[s].name + "' in " +
                            path);
        }
    }

    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> fields;
    std::size_t lineNo = 1;
    while (readRecord(in, delimiter, fields)) {
        ++lineNo;
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
        std::vector<Cell> row(schema.size());
        for (std::size_t s = 0; s < schema.size(); ++s) {
            const int f = fileIndex[s];
            const std::string raw = (f >= 0 && static_cast<std::size_t>(f) < fields.size())
                                        ? fields[static_cast<std::size_t>(f)]
                                        : std::string();
            if (trim(raw).empty()) {
                if (!schema[s].nullable) {
                    throw DataError("parse error at row " + std::to_string(lineNo) + ", column '" +
                                    schema[s].name + "': missing value in non-nullable column");
                }
                row[s] = std::monostate{};
                continue;
            }
            Cell parsed = std::monostate{};
            bool ok = true;
            switch (schema[s].kind) {
                case ColumnKind::Integer: {
                    auto v = parseInteger(raw);
                    if (v) parsed = *v;
                    else ok = false;
                    break;
                }
                case ColumnKind::Real: {
                    auto v = parseReal(raw);
                    if (v) parsed = *v;
                    else ok = false;
                    break;
                }
                case ColumnKind::Boolean: {
                    auto v = parseBoolean(raw);
                    if (v) parsed = *v;
                    else ok = false;
                    break;
                }
                case ColumnKind::Date: {
                    auto v = parseDate(raw, schema[s].dateFormat);
                    if (v) parsed = *v;
                    else ok = false;
                    break;
                }
                case ColumnKind::Categorical: parsed = trim(raw); break;
            }
            if (!ok) {
                if (schema[s].nullable) {
                    parsed = std::monostate{};
                } else {
                    throw DataError("parse error at row " + std::to_string(lineNo) + ", column '" +
                                    schema[s].name + "': cannot parse '" + trim(raw) + "'");
                }
            }
            row[s] = std::move(parsed);
        }
        rows.push_back(std::move(row));
    }

    Provenance prov;
    prov.sourcePath = path;
    prov.rowsBeforeCleaning = rows.size();
    prov.rowsAfterCleaning = rows.size();
    return Dataset(schema, std::move(rows), std::move(prov));
}

void writeCsv(const Dataset& ds, const std::string& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    const auto& schema = ds.schema();
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (c) out << delimiter;
        writeField(out, schema[c].name, delimiter);
    }
    out << '\n';
    for (const auto& row : ds.rows()) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            if (c) out << delimiter;
            writeField(out, cellText(row[c], schema[c]), delimiter);
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

void writeCsv(const FeatureMatrix& m, const std::string& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    out << "row_id";
    for (const auto& name : m.columnNames()) {
        out << delimiter;
        writeField(out, name, delimiter);
    }
    out << '\n';
    // %.17g so a resumed run sees bit-identical feature values.
    char buf[64];
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        out << m.rowIds()[r];
        for (std::size_t c = 0; c < m.columnCount(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.at(r, c));
            out << delimiter << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

FeatureMatrix encodeFeatures(const Dataset& ds, const std::vector<std::string>& columns,
                             const std::map<std::string, ColumnEncoding>& encodings) {
    const std::size_t n = ds.rowCount();

    struct OutColumn {
        std::string name;
        std::vector<double> values;
    };
    std::vector<OutColumn> out;

    for (const auto& name : columns) {
        const std::size_t col = ds.columnIndex(name);
        const ColumnSpec& spec = ds.schema()[col];
        ColumnEncoding enc;
        if (auto it = encodings.find(name); it != encodings.end()) enc = it->second;

        for (std::size_t r = 0; r < n; ++r) {
            if (cellMissing(ds.cell(r, col))) {
                throw DataError("incomplete data in column '" + name +
                                "' (row " + std::to_string(r) + "): impute missing values first");
            }
        }

        switch (enc.kind) {
            case EncodingKind::Numeric: {
                if (spec.kind == ColumnKind::Categorical) {
                    throw ConfigError("column '" + name +
                                      "' is categorical; use one_hot or ordinal encoding");
                }
                OutColumn oc{name, {}};
                oc.values.reserve(n);
                for (std::size_t r = 0; r < n; ++r) {
                    const Cell& c = ds.cell(r, col);
                    oc.values.push_back(spec.kind == ColumnKind::Date
                                            ? static_cast<double>(std::get<long long>(c))
                                            : cellAsReal(c));
                }
                out.push_back(std::move(oc));
                break;
            }
            case EncodingKind::OneHot: {
                if (spec.kind != ColumnKind::Categorical) {
                    throw ConfigError("one_hot encoding requires a categorical column: '" + name +
                                      "'");
                }
                std::set<std::string> categories;
                for (std::size_t r = 0; r < n; ++r) {
                    categories.insert(std::get<std::string>(ds.cell(r, col)));
                }
                for (const auto& cat : categories) {
                    OutColumn oc{name + "=" + cat, std::vector<double>(n, 0.0)};
                    for (std::size_t r = 0; r < n; ++r) {
                        if (std::get<std::string>(ds.cell(r, col)) == cat) oc.values[r] = 1.0;
                    }
                    out.push_back(std::move(oc));
                }
                break;
            }
            case EncodingKind::Ordinal: {
                if (spec.kind != ColumnKind::Categorical) {
                    throw ConfigError("ordinal encoding requires a categorical column: '" + name +
                                      "'");
                }
                std::unordered_map<std::string, double> rank;
                for (std::size_t i = 0; i < enc.ordinalOrder.size(); ++i) {
                    rank[enc.ordinalOrder[i]] = static_cast<double>(i);
                }
                OutColumn oc{name, {}};
                oc.values.reserve(n);
                for (std::size_t r = 0; r < n; ++r) {
                    const auto& v = std::get<std::string>(ds.cell(r, col));
                    auto it = rank.find(v);
                    if (it == rank.end()) {
                        throw ConfigError("encoding error: category '" + v +
                                          "' not covered by the ordinal order for '" + name + "'");
                    }
                    oc.values.push_back(it->second);
                }
                out.push_back(std::move(oc));
                break;
            }
        }
    }

    std::vector<long long> rowIds(n);
    const int idCol = ds.findColumn("ID");
    for (std::size_t r = 0; r < n; ++r) {
        if (idCol >= 0 && !cellMissing(ds.cell(r, static_cast<std::size_t>(idCol)))) {
            rowIds[r] = std::get<long long>(ds.cell(r, static_cast<std::size_t>(idCol)));
        } else {
            rowIds[r] = static_cast<long long>(r);
        }
    }

    std::vector<std::string> names;
    names.reserve(out.size());
    for (const auto& oc : out) names.push_back(oc.name);
    std::vector<double> values(n * out.size());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < out.size(); ++c) values[r * out.size() + c] = out[c].values[r];
    }
    return FeatureMatrix(n, out.size(), std::move(values), std::move(names), std::move(rowIds));
}

}  // namespace custprof
