#pragma once

#include "fairlens/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>

namespace fairlens {

/// A fitted probabilistic binary classifier. Instances are immutable once built.
class Classifier {
public:
    virtual ~Classifier() = default;

    /// P(y = 1 | x) for every row. Throws ShapeError on a column-count mismatch.
    [[nodiscard]] virtual Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const = 0;
    [[nodiscard]] virtual Index n_features() const noexcept = 0;
    /// Stable type tag used by the model file format.
    [[nodiscard]] virtual std::string kind() const = 0;
    [[nodiscard]] virtual nlohmann::json to_json() const = 0;

    [[nodiscard]] ProbabilityScores predict_scores(const FeatureMatrix& X) const;
    /// 1[predict_proba >= 0.5], identical rule for every model type.
    [[nodiscard]] BinaryLabels predict(const FeatureMatrix& X) const;

protected:
    void check_shape(const Eigen::MatrixXd& X) const;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

enum class ModelKind { Logistic, Tree, Forest };

[[nodiscard]] std::string to_string(ModelKind kind);
/// Accepts "logistic", "tree", "forest". Throws ConfigError otherwise.
[[nodiscard]] ModelKind parse_model_kind(const std::string& name);

enum class Penalty { L1, L2 };

struct LogisticOptions {
    double l2_lambda = 1.0;
    int max_iter = 1000;
    double tol = 1e-6;
};

struct TreeOptions {
    int max_depth = -1;  // < 0: grow until pure or min_samples_leaf binds
    Index min_samples_leaf = 1;
    Index max_features = 0;  // per-split feature subsample; 0 = all features
};

struct ForestOptions {
    Index n_trees = 100;
    TreeOptions tree{};  // max_features 0 here means floor(sqrt(m))
};

/// Recipe for training one of the base model types. Used wherever a method needs
/// a "trainable scoring model" (rankers, ROC/DAEC members, ACF final classifier).
struct ModelSpec {
    ModelKind kind = ModelKind::Logistic;
    LogisticOptions logistic{};
    TreeOptions tree{};
    ForestOptions forest{};

    [[nodiscard]] ClassifierPtr fit(const FeatureMatrix& X, const BinaryLabels& y, const SampleWeights* weights,
                                    std::uint64_t seed) const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Rebuilds any classifier written by Classifier::to_json. Throws ModelFormatError.
[[nodiscard]] ClassifierPtr classifier_from_json(const nlohmann::json& j);

}  // namespace fairlens
