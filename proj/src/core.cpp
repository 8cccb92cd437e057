#include "fairlens/core.hpp"

#include "fairlens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace fairlens {

namespace {

void check_binary(const std::vector<int>& values, const char* what) {
    for (Index i = 0; i < values.size(); ++i) {
        if (values[i] != 0 && values[i] != 1) {
            throw ValidationError(std::string(what) + " must be 0/1; found " + std::to_string(values[i]) +
                                  " at position " + std::to_string(i));
        }
    }
}

}  // namespace

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names)
    : values_(std::move(values)), names_(std::move(column_names)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw ValidationError("feature matrix must have at least one row and one column");
    }
    if (names_.size() != static_cast<Index>(values_.cols())) {
        throw ValidationError("feature matrix has " + std::to_string(values_.cols()) + " columns but " +
                              std::to_string(names_.size()) + " column names");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
        if (!seen.insert(name).second) {
            throw ValidationError("duplicate column name '" + name + "'");
        }
    }
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
        for (Eigen::Index c = 0; c < values_.cols(); ++c) {
            if (!std::isfinite(values_(r, c))) {
                throw ValidationError("non-finite feature at (" + std::to_string(r) + "," + std::to_string(c) + ")");
            }
        }
    }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const Index> rows) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (Index i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = values_.row(static_cast<Eigen::Index>(rows[i]));
    }
    return {std::move(out), names_};
}

FeatureMatrix FeatureMatrix::drop_columns(std::span<const std::string> names) const {
    std::vector<Eigen::Index> keep;
    std::vector<std::string> kept_names;
    for (Index c = 0; c < names_.size(); ++c) {
        if (std::find(names.begin(), names.end(), names_[c]) == names.end()) {
            keep.push_back(static_cast<Eigen::Index>(c));
            kept_names.push_back(names_[c]);
        }
    }
    Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(keep.size()));
    for (Index j = 0; j < keep.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = values_.col(keep[j]);
    }
    return {std::move(out), std::move(kept_names)};
}

FeatureMatrix FeatureMatrix::append_column(const std::string& name, const Eigen::VectorXd& column) const {
    if (column.size() != values_.rows()) {
        throw ValidationError("appended column length does not match row count");
    }
    Eigen::MatrixXd out(values_.rows(), values_.cols() + 1);
    out.leftCols(values_.cols()) = values_;
    out.col(values_.cols()) = column;
    auto names = names_;
    names.push_back(name);
    return {std::move(out), std::move(names)};
}

long FeatureMatrix::column_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : static_cast<long>(it - names_.begin());
}

BinaryLabels::BinaryLabels(std::vector<int> values) : values_(std::move(values)) {
    check_binary(values_, "label");
}

BinaryLabels BinaryLabels::select(std::span<const Index> rows) const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (Index r : rows) out.push_back(values_[r]);
    return BinaryLabels(std::move(out));
}

ProtectedAttribute::ProtectedAttribute(std::vector<int> values, std::string name)
    : values_(std::move(values)), name_(std::move(name)) {
    check_binary(values_, "protected attribute");
}

ProtectedAttribute ProtectedAttribute::select(std::span<const Index> rows) const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (Index r : rows) out.push_back(values_[r]);
    return {std::move(out), name_};
}

ProtectedAttribute ProtectedAttribute::flipped() const {
    std::vector<int> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](int v) { return 1 - v; });
    return {std::move(out), name_};
}

Index ProtectedAttribute::count_disadvantaged() const noexcept {
    return static_cast<Index>(std::count(values_.begin(), values_.end(), 1));
}

Eigen::VectorXd ProtectedAttribute::as_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values_.size()));
    for (Index i = 0; i < values_.size(); ++i) v(static_cast<Eigen::Index>(i)) = values_[i];
    return v;
}

SampleWeights::SampleWeights(std::vector<double> values) : values_(std::move(values)) {
    for (Index i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
            throw ValidationError("sample weight must be finite and non-negative at position " + std::to_string(i));
        }
    }
}

ProbabilityScores::ProbabilityScores(std::vector<double> values) : values_(std::move(values)) {
    for (Index i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
            throw ValidationError("probability score outside [0, 1] at position " + std::to_string(i));
        }
    }
}

BinaryLabels ProbabilityScores::threshold() const {
    std::vector<int> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), [](double p) { return p >= 0.5 ? 1 : 0; });
    return BinaryLabels(std::move(out));
}

Dataset::Dataset(FeatureMatrix X, BinaryLabels y, ProtectedAttribute s)
    : X_(std::move(X)), y_(std::move(y)), s_(std::move(s)) {
    if (X_.rows() != y_.size() || y_.size() != s_.size()) {
        throw ValidationError("length mismatch: X has " + std::to_string(X_.rows()) + " rows, y has " +
                              std::to_string(y_.size()) + ", s has " + std::to_string(s_.size()));
    }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
    return {X_.select_rows(rows), y_.select(rows), s_.select(rows)};
}

Dataset Dataset::with_labels(BinaryLabels y) const { return {X_, std::move(y), s_}; }

Dataset Dataset::with_features(FeatureMatrix X) const { return {std::move(X), y_, s_}; }

const IndexList& GroupPartition::cell(int s, int y) const {
    if (s == 1) return y == 1 ? disadvantaged_positive : disadvantaged_negative;
    return y == 1 ? advantaged_positive : advantaged_negative;
}

GroupPartition partition_groups(const BinaryLabels& y, const ProtectedAttribute& s) {
    if (y.size() != s.size()) {
        throw ValidationError("length mismatch: y has " + std::to_string(y.size()) + " entries, s has " +
                              std::to_string(s.size()));
    }
    GroupPartition parts;
    for (Index i = 0; i < y.size(); ++i) {
        if (s[i] == 1) {
            (y[i] == 1 ? parts.disadvantaged_positive : parts.disadvantaged_negative).push_back(i);
        } else {
            (y[i] == 1 ? parts.advantaged_positive : parts.advantaged_negative).push_back(i);
        }
    }
    return parts;
}

Dataset validate_dataset(RawDataset raw) {
    FeatureMatrix X(std::move(raw.features), std::move(raw.column_names));
    BinaryLabels y(std::move(raw.labels));
    ProtectedAttribute s(std::move(raw.protected_values), std::move(raw.protected_name));
    return {std::move(X), std::move(y), std::move(s)};
}

Dataset validate_dataset(const Dataset& dataset) {
    RawDataset raw{dataset.X().values(), dataset.X().column_names(), dataset.y().values(), dataset.s().values(),
                   dataset.s().name()};
    return validate_dataset(std::move(raw));
}

}  // namespace fairlens
