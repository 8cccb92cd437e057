#pragma once

#include "fairlens/core.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fairlens::data {

inline constexpr Index kGermanCreditRecords = 1000;
inline constexpr Index kGermanCreditAttributes = 20;

/// One attribute of the UCI layout. Categorical attributes list their admissible codes.
struct AttributeSpec {
    std::string_view name;
    std::vector<std::string_view> codes;  // empty for integer attributes

    [[nodiscard]] bool categorical() const noexcept { return !codes.empty(); }
};

/// The 20 attributes of german.data in file order.
[[nodiscard]] const std::vector<AttributeSpec>& german_credit_schema();

/// One line of german.data. Categorical fields keep their code ("A11"),
/// integer fields are stored in `number` and leave `code` empty.
struct RawGermanCreditRecord {
    struct Field {
        std::string code;
        int number = 0;
    };
    std::array<Field, kGermanCreditAttributes> fields;
    int risk = 1;  // 1 = good, 2 = bad

    [[nodiscard]] const Field& at(std::string_view attribute) const;
};

/// Parses one line; `line_number` is 1-based and only used in error messages.
[[nodiscard]] RawGermanCreditRecord parse_german_credit_line(std::string_view line, Index line_number);

/// Reads a whole german.data file. Blank lines are skipped; anything else must parse.
[[nodiscard]] std::vector<RawGermanCreditRecord> load_german_credit(const std::filesystem::path& path);

inline constexpr std::array<std::string_view, 3> kProtectedNames = {"female", "foreign_worker", "age_below_25"};

/// Throws ConfigError for anything outside kProtectedNames.
void check_protected_name(std::string_view name);

/// 1 = disadvantaged: female (A92, A95), foreign worker (A201), age <= 25.
[[nodiscard]] ProtectedAttribute extract_protected(const std::vector<RawGermanCreditRecord>& records,
                                                   std::string_view name);

/// Good risk (code 1) -> 1, bad risk -> 0.
[[nodiscard]] BinaryLabels extract_labels(const std::vector<RawGermanCreditRecord>& records);

struct EncodeOptions {
    /// z-score integer columns over all records. Off for cross-validation, where a
    /// Standardizer is fitted per training fold instead.
    bool standardize = true;
    /// Drop personal status, foreign worker and age columns from X.
    bool drop_protected_sources = false;
};

struct EncodedGermanCredit {
    Dataset data;
    std::vector<std::string> numeric_columns;
    std::vector<std::string> protected_source_columns;  // present in X unless dropped
};

/// One-hot categoricals ("purpose=A43") and integer columns by attribute name.
[[nodiscard]] EncodedGermanCredit encode(const std::vector<RawGermanCreditRecord>& records,
                                         std::string_view protected_name, const EncodeOptions& options = {});

/// Column z-scoring with ddof 0. A constant column gets scale 1.
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(std::vector<std::string> columns, std::vector<double> means, std::vector<double> scales);

    [[nodiscard]] static Standardizer fit(const FeatureMatrix& X, const std::vector<std::string>& columns);
    /// Columns absent from X are skipped.
    [[nodiscard]] FeatureMatrix transform(const FeatureMatrix& X) const;

    [[nodiscard]] const std::vector<std::string>& columns() const noexcept { return columns_; }
    [[nodiscard]] const std::vector<double>& means() const noexcept { return means_; }
    [[nodiscard]] const std::vector<double>& scales() const noexcept { return scales_; }

private:
    std::vector<std::string> columns_;
    std::vector<double> means_;
    std::vector<double> scales_;
};

/// Header row plus numeric body of a comma-separated file.
struct NumericTable {
    std::vector<std::string> header;
    Eigen::MatrixXd values;

    [[nodiscard]] long column_index(std::string_view name) const;
};

[[nodiscard]] NumericTable read_numeric_csv(const std::filesystem::path& path);

/// Generic CSV dataset: every column except the label and protected columns is a feature.
[[nodiscard]] Dataset load_csv_dataset(const std::filesystem::path& path, const std::string& label_column,
                                       const std::string& protected_column);

}  // namespace fairlens::data
