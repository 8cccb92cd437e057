#include "fairlens/data.hpp"

#include "fairlens/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace fairlens::data {

namespace {

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    Index i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const Index start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_commas(std::string_view line) {
    std::vector<std::string> out;
    Index start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Index attribute_position(std::string_view name) {
    const auto& schema = german_credit_schema();
    for (Index j = 0; j < schema.size(); ++j) {
        if (schema[j].name == name) return j;
    }
    throw ConfigError("unknown German Credit attribute '" + std::string(name) + "'");
}

// Attributes whose columns carry protected information.
constexpr std::array<std::string_view, 3> kProtectedSources = {"personal_status", "age", "foreign_worker"};

}  // namespace

const std::vector<AttributeSpec>& german_credit_schema() {
    static const std::vector<AttributeSpec> schema = {
        {"checking_status", {"A11", "A12", "A13", "A14"}},
        {"duration", {}},
        {"credit_history", {"A30", "A31", "A32", "A33", "A34"}},
        {"purpose", {"A40", "A41", "A42", "A43", "A44", "A45", "A46", "A47", "A48", "A49", "A410"}},
        {"credit_amount", {}},
        {"savings", {"A61", "A62", "A63", "A64", "A65"}},
        {"employment_since", {"A71", "A72", "A73", "A74", "A75"}},
        {"installment_rate", {}},
        {"personal_status", {"A91", "A92", "A93", "A94", "A95"}},
        {"other_debtors", {"A101", "A102", "A103"}},
        {"residence_since", {}},
        {"property", {"A121", "A122", "A123", "A124"}},
        {"age", {}},
        {"other_installment_plans", {"A141", "A142", "A143"}},
        {"housing", {"A151", "A152", "A153"}},
        {"existing_credits", {}},
        {"job", {"A171", "A172", "A173", "A174"}},
        {"people_liable", {}},
        {"telephone", {"A191", "A192"}},
        {"foreign_worker", {"A201", "A202"}},
    };
    return schema;
}

const RawGermanCreditRecord::Field& RawGermanCreditRecord::at(std::string_view attribute) const {
    return fields[attribute_position(attribute)];
}

RawGermanCreditRecord parse_german_credit_line(std::string_view line, Index line_number) {
    const auto where = [&] { return "german.data line " + std::to_string(line_number) + ": "; };
    const auto tokens = split_whitespace(line);
    if (tokens.size() != kGermanCreditAttributes + 1) {
        throw ParseError(where() + "expected 21 fields, found " + std::to_string(tokens.size()));
    }
    const auto parse_int = [&](std::string_view tok, std::string_view what) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw ParseError(where() + std::string(what) + " is not an integer: '" + std::string(tok) + "'");
        }
        return v;
    };
    RawGermanCreditRecord rec;
    const auto& schema = german_credit_schema();
    for (Index j = 0; j < kGermanCreditAttributes; ++j) {
        const auto& spec = schema[j];
        if (spec.categorical()) {
            if (std::find(spec.codes.begin(), spec.codes.end(), tokens[j]) == spec.codes.end()) {
                throw ParseError(where() + std::string(spec.name) + " has unknown code '" + std::string(tokens[j]) + "'");
            }
            rec.fields[j].code = std::string(tokens[j]);
        } else {
            rec.fields[j].number = parse_int(tokens[j], spec.name);
            if (rec.fields[j].number < 0) throw ParseError(where() + std::string(spec.name) + " is negative");
        }
    }
    rec.risk = parse_int(tokens[kGermanCreditAttributes], "risk");
    if (rec.risk != 1 && rec.risk != 2) {
        throw ParseError(where() + "risk code must be 1 or 2, got " + std::to_string(rec.risk));
    }
    return rec;
}

std::vector<RawGermanCreditRecord> load_german_credit(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingInputError("cannot open dataset file " + path.string());
    std::vector<RawGermanCreditRecord> records;
    records.reserve(kGermanCreditRecords);
    std::string line;
    Index line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (blank(line)) continue;
        records.push_back(parse_german_credit_line(line, line_number));
    }
    if (records.size() != kGermanCreditRecords) {
        throw IntegrityError(path.string() + ": expected " + std::to_string(kGermanCreditRecords) + " records, found " +
                             std::to_string(records.size()));
    }
    return records;
}

void check_protected_name(std::string_view name) {
    if (std::find(kProtectedNames.begin(), kProtectedNames.end(), name) == kProtectedNames.end()) {
        throw ConfigError("unknown protected attribute '" + std::string(name) +
                          "' (expected female, foreign_worker or age_below_25)");
    }
}

ProtectedAttribute extract_protected(const std::vector<RawGermanCreditRecord>& records, std::string_view name) {
    check_protected_name(name);
    std::vector<int> s(records.size());
    for (Index i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (name == "female") {
            const auto& code = r.at("personal_status").code;
            s[i] = code == "A92" || code == "A95" ? 1 : 0;
        } else if (name == "foreign_worker") {
            s[i] = r.at("foreign_worker").code == "A201" ? 1 : 0;
        } else {
            s[i] = r.at("age").number <= 25 ? 1 : 0;
        }
    }
    return {std::move(s), std::string(name)};
}

BinaryLabels extract_labels(const std::vector<RawGermanCreditRecord>& records) {
    std::vector<int> y(records.size());
    for (Index i = 0; i < records.size(); ++i) y[i] = records[i].risk == 1 ? 1 : 0;
    return BinaryLabels(std::move(y));
}

EncodedGermanCredit encode(const std::vector<RawGermanCreditRecord>& records, std::string_view protected_name,
                           const EncodeOptions& options) {
    check_protected_name(protected_name);
    if (records.empty()) throw ValidationError("encode: no records");
    const auto& schema = german_credit_schema();

    EncodedGermanCredit out;
    std::vector<std::string> names;
    std::vector<std::pair<Index, std::string_view>> sources;  // attribute, code (empty = integer)
    for (Index j = 0; j < schema.size(); ++j) {
        const auto& spec = schema[j];
        const bool protected_source =
            std::find(kProtectedSources.begin(), kProtectedSources.end(), spec.name) != kProtectedSources.end();
        if (protected_source && options.drop_protected_sources) continue;
        if (spec.categorical()) {
            for (auto code : spec.codes) {
                names.push_back(std::string(spec.name) + "=" + std::string(code));
                sources.emplace_back(j, code);
                if (protected_source) out.protected_source_columns.push_back(names.back());
            }
        } else {
            names.emplace_back(spec.name);
            sources.emplace_back(j, std::string_view{});
            out.numeric_columns.push_back(names.back());
            if (protected_source) out.protected_source_columns.push_back(names.back());
        }
    }

    Eigen::MatrixXd X(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(names.size()));
    for (Index i = 0; i < records.size(); ++i) {
        for (Index c = 0; c < sources.size(); ++c) {
            const auto& field = records[i].fields[sources[c].first];
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                sources[c].second.empty() ? static_cast<double>(field.number) : (field.code == sources[c].second ? 1.0 : 0.0);
        }
    }
    FeatureMatrix features(std::move(X), std::move(names));
    if (options.standardize) features = Standardizer::fit(features, out.numeric_columns).transform(features);
    out.data = Dataset(std::move(features), extract_labels(records), extract_protected(records, protected_name));
    return out;
}

Standardizer::Standardizer(std::vector<std::string> columns, std::vector<double> means, std::vector<double> scales)
    : columns_(std::move(columns)), means_(std::move(means)), scales_(std::move(scales)) {
    if (means_.size() != columns_.size() || scales_.size() != columns_.size()) {
        throw ValidationError("standardizer: one mean and scale per column required");
    }
    for (double sc : scales_) {
        if (!(sc > 0.0) || !std::isfinite(sc)) throw ValidationError("standardizer: scales must be positive");
    }
}

Standardizer Standardizer::fit(const FeatureMatrix& X, const std::vector<std::string>& columns) {
    std::vector<std::string> kept;
    std::vector<double> means, scales;
    for (const auto& name : columns) {
        const long c = X.column_index(name);
        if (c < 0) continue;
        const auto col = X.values().col(c);
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().mean());
        kept.push_back(name);
        means.push_back(mean);
        scales.push_back(sd > 0.0 ? sd : 1.0);
    }
    return {std::move(kept), std::move(means), std::move(scales)};
}

FeatureMatrix Standardizer::transform(const FeatureMatrix& X) const {
    Eigen::MatrixXd values = X.values();
    for (Index k = 0; k < columns_.size(); ++k) {
        const long c = X.column_index(columns_[k]);
        if (c < 0) continue;
        values.col(c) = (values.col(c).array() - means_[k]) / scales_[k];
    }
    return {std::move(values), X.column_names()};
}

long NumericTable::column_index(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<long>(it - header.begin());
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingInputError("cannot open CSV file " + path.string());
    NumericTable table;
    std::string line;
    Index line_number = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_number;
        if (blank(line)) continue;
        auto cells = split_commas(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ParseError(path.string() + " line " + std::to_string(line_number) + ": expected " +
                             std::to_string(table.header.size()) + " fields, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (Index c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[c]);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw ParseError(path.string() + " line " + std::to_string(line_number) + ": column '" +
                                 table.header[c] + "' is not numeric: '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ParseError(path.string() + ": empty file");
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.header.size()));
    for (Index r = 0; r < rows.size(); ++r) {
        for (Index c = 0; c < rows[r].size(); ++c) {
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return table;
}

Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& label_column,
                         const std::string& protected_column) {
    const auto table = read_numeric_csv(path);
    const long label_at = table.column_index(label_column);
    const long s_at = table.column_index(protected_column);
    if (label_at < 0) throw MissingInputError(path.string() + ": no column '" + label_column + "'");
    if (s_at < 0) throw MissingInputError(path.string() + ": no column '" + protected_column + "'");

    RawDataset raw;
    raw.protected_name = protected_column;
    const Eigen::Index n = table.values.rows();
    std::vector<Eigen::Index> feature_cols;
    for (Index c = 0; c < table.header.size(); ++c) {
        if (static_cast<long>(c) == label_at || static_cast<long>(c) == s_at) continue;
        feature_cols.push_back(static_cast<Eigen::Index>(c));
        raw.column_names.push_back(table.header[c]);
    }
    raw.features.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
    for (Index k = 0; k < feature_cols.size(); ++k) {
        raw.features.col(static_cast<Eigen::Index>(k)) = table.values.col(feature_cols[k]);
    }
    const auto to_int = [&](Eigen::Index r, long c, const std::string& what) {
        const double v = table.values(r, c);
        if (v != 0.0 && v != 1.0) {
            throw ValidationError(path.string() + ": " + what + " must be 0 or 1 at data row " + std::to_string(r + 1));
        }
        return static_cast<int>(v);
    };
    for (Eigen::Index r = 0; r < n; ++r) {
        raw.labels.push_back(to_int(r, label_at, label_column));
        raw.protected_values.push_back(to_int(r, s_at, protected_column));
    }
    return validate_dataset(std::move(raw));
}

}  // namespace fairlens::data
