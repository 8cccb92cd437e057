#pragma once

#include "fairlens/classifier.hpp"

namespace fairlens {

enum class FeatureKind { Continuous, Binary };

/// Binary when every entry is 0 or 1, continuous otherwise.
[[nodiscard]] std::vector<FeatureKind> infer_feature_kinds(const FeatureMatrix& X);

/// Predicts one feature from the protected attribute alone.
/// Continuous: least squares x ~ a + b*s. Binary: logistic x ~ sigmoid(a + b*s).
struct Residualizer {
    FeatureKind kind = FeatureKind::Continuous;
    double intercept = 0.0;
    double slope = 0.0;

    [[nodiscard]] double predict(int s) const;
};

/// Fits a residualizer on one column. With a single binary regressor both fits are
/// saturated, so the least-squares and maximum-likelihood solutions are closed-form
/// (group means; logistic probabilities clipped to [1e-9, 1 - 1e-9]).
/// Throws ValidationError when s is constant.
[[nodiscard]] Residualizer fit_residualizer(const Eigen::VectorXd& column, const ProtectedAttribute& s,
                                            FeatureKind kind);

struct AcfPrediction {
    BinaryLabels labels;
    ProbabilityScores scores;
};

/// Per-feature residualizers plus a classifier trained on the residual matrix.
class LinearACFModel {
public:
    LinearACFModel(std::vector<Residualizer> residualizers, std::vector<std::string> column_names,
                   ClassifierPtr final_classifier);

    [[nodiscard]] const std::vector<Residualizer>& residualizers() const noexcept { return residualizers_; }
    [[nodiscard]] const ClassifierPtr& final_classifier() const noexcept { return final_; }
    [[nodiscard]] Index n_features() const noexcept { return residualizers_.size(); }

    /// epsilon_ij = x_ij - xhat_j(s_i). Throws ShapeError on a column mismatch.
    [[nodiscard]] FeatureMatrix residualize(const FeatureMatrix& X, const ProtectedAttribute& s) const;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] static LinearACFModel from_json(const nlohmann::json& j);

private:
    std::vector<Residualizer> residualizers_;
    std::vector<std::string> column_names_;
    ClassifierPtr final_;
};

/// feature_kinds empty = infer_feature_kinds(X). The final classifier defaults to logistic regression.
[[nodiscard]] LinearACFModel fit_linear_acf(const FeatureMatrix& X, const BinaryLabels& y,
                                            const ProtectedAttribute& s, std::vector<FeatureKind> feature_kinds = {},
                                            const ModelSpec& final_spec = {}, std::uint64_t seed = 0);

[[nodiscard]] AcfPrediction predict_acf(const LinearACFModel& model, const FeatureMatrix& X,
                                        const ProtectedAttribute& s);

}  // namespace fairlens
