#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fairlens {

using Index = std::size_t;
using IndexList = std::vector<Index>;

/// Dense n x m feature block with named columns. Entries are finite, names unique.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names);

    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<std::string>& column_names() const noexcept { return names_; }
    [[nodiscard]] Index rows() const noexcept { return static_cast<Index>(values_.rows()); }
    [[nodiscard]] Index cols() const noexcept { return static_cast<Index>(values_.cols()); }

    /// Rows in the given order; indices may repeat.
    [[nodiscard]] FeatureMatrix select_rows(std::span<const Index> rows) const;
    /// Copy without the named columns. Names not present are ignored.
    [[nodiscard]] FeatureMatrix drop_columns(std::span<const std::string> names) const;
    /// Copy with one extra column appended at the right.
    [[nodiscard]] FeatureMatrix append_column(const std::string& name, const Eigen::VectorXd& column) const;
    /// Position of a column, or -1.
    [[nodiscard]] long column_index(const std::string& name) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

/// Binary outcome vector, 1 = desirable outcome.
class BinaryLabels {
public:
    BinaryLabels() = default;
    explicit BinaryLabels(std::vector<int> values);

    [[nodiscard]] const std::vector<int>& values() const noexcept { return values_; }
    [[nodiscard]] Index size() const noexcept { return values_.size(); }
    [[nodiscard]] int operator[](Index i) const { return values_[i]; }
    [[nodiscard]] BinaryLabels select(std::span<const Index> rows) const;

    friend bool operator==(const BinaryLabels&, const BinaryLabels&) = default;

private:
    std::vector<int> values_;
};

/// Binary group membership, 1 = disadvantaged group, 0 = advantaged group.
class ProtectedAttribute {
public:
    ProtectedAttribute() = default;
    ProtectedAttribute(std::vector<int> values, std::string name);

    [[nodiscard]] const std::vector<int>& values() const noexcept { return values_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] Index size() const noexcept { return values_.size(); }
    [[nodiscard]] int operator[](Index i) const { return values_[i]; }
    [[nodiscard]] ProtectedAttribute select(std::span<const Index> rows) const;
    /// 1 - s, same name.
    [[nodiscard]] ProtectedAttribute flipped() const;
    [[nodiscard]] Index count_disadvantaged() const noexcept;
    [[nodiscard]] Eigen::VectorXd as_vector() const;

private:
    std::vector<int> values_;
    std::string name_;
};

/// Non-negative finite per-row weights.
class SampleWeights {
public:
    SampleWeights() = default;
    explicit SampleWeights(std::vector<double> values);

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] Index size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](Index i) const { return values_[i]; }

private:
    std::vector<double> values_;
};

/// Per-row P(y = 1 | x), every entry in [0, 1].
class ProbabilityScores {
public:
    ProbabilityScores() = default;
    explicit ProbabilityScores(std::vector<double> values);

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] Index size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](Index i) const { return values_[i]; }

    /// 1[p >= 0.5] per row.
    [[nodiscard]] BinaryLabels threshold() const;

private:
    std::vector<double> values_;
};

/// The universal (X, y, s) triple. All three share the same row count.
class Dataset {
public:
    Dataset() = default;
    Dataset(FeatureMatrix X, BinaryLabels y, ProtectedAttribute s);

    [[nodiscard]] const FeatureMatrix& X() const noexcept { return X_; }
    [[nodiscard]] const BinaryLabels& y() const noexcept { return y_; }
    [[nodiscard]] const ProtectedAttribute& s() const noexcept { return s_; }
    [[nodiscard]] Index size() const noexcept { return y_.size(); }

    [[nodiscard]] Dataset subset(std::span<const Index> rows) const;
    [[nodiscard]] Dataset with_labels(BinaryLabels y) const;
    [[nodiscard]] Dataset with_features(FeatureMatrix X) const;

private:
    FeatureMatrix X_;
    BinaryLabels y_;
    ProtectedAttribute s_;
};

/// Row indices of the four (group, label) cells.
struct GroupPartition {
    IndexList disadvantaged_positive;
    IndexList disadvantaged_negative;
    IndexList advantaged_positive;
    IndexList advantaged_negative;

    /// Cell by protected value (1 = d) and label value.
    [[nodiscard]] const IndexList& cell(int s, int y) const;
};

[[nodiscard]] GroupPartition partition_groups(const BinaryLabels& y, const ProtectedAttribute& s);

/// Unvalidated inputs for validate_dataset.
struct RawDataset {
    Eigen::MatrixXd features;
    std::vector<std::string> column_names;
    std::vector<int> labels;
    std::vector<int> protected_values;
    std::string protected_name = "s";
};

/// Builds a Dataset, throwing ValidationError naming the first offending index.
[[nodiscard]] Dataset validate_dataset(RawDataset raw);
/// Re-checks every invariant of an existing dataset; returns it unchanged.
[[nodiscard]] Dataset validate_dataset(const Dataset& dataset);

}  // namespace fairlens
