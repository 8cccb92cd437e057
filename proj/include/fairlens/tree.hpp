#pragma once

#include "fairlens/classifier.hpp"

#include <span>
#include <vector>

namespace fairlens {

/// Weighted Gini impurity of a binary split, weighted by child mass:
/// (W_L * gini_L + W_R * gini_R) / W with gini = 1 - p0^2 - p1^2 and rows with x <= threshold going left.
[[nodiscard]] double weighted_gini_split(std::span<const double> x, std::span<const int> y,
                                         std::span<const double> w, double threshold);

/// CART classification tree over weighted Gini.
class TreeModel final : public Classifier {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double prob_positive = 0.0;  // leaf class distribution is (1 - p, p)
        Index n_samples = 0;
    };

    TreeModel(std::vector<Node> nodes, Index n_features);

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] int depth() const;
    [[nodiscard]] double predict_row(const double* row, Eigen::Index stride) const;

    [[nodiscard]] Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const override;
    [[nodiscard]] Index n_features() const noexcept override { return n_features_; }
    [[nodiscard]] std::string kind() const override { return "tree"; }
    [[nodiscard]] nlohmann::json to_json() const override;
    [[nodiscard]] static std::shared_ptr<const TreeModel> from_json(const nlohmann::json& j);

private:
    std::vector<Node> nodes_;
    Index n_features_;
};

/// Bagged trees; probability is the mean of leaf probabilities.
class ForestModel final : public Classifier {
public:
    ForestModel(std::vector<std::shared_ptr<const TreeModel>> trees, std::vector<std::uint64_t> seeds,
                Index max_features, Index n_features);

    [[nodiscard]] const std::vector<std::shared_ptr<const TreeModel>>& trees() const noexcept { return trees_; }
    [[nodiscard]] const std::vector<std::uint64_t>& seeds() const noexcept { return seeds_; }
    [[nodiscard]] Index max_features() const noexcept { return max_features_; }

    [[nodiscard]] Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const override;
    [[nodiscard]] Index n_features() const noexcept override { return n_features_; }
    [[nodiscard]] std::string kind() const override { return "forest"; }
    [[nodiscard]] nlohmann::json to_json() const override;
    [[nodiscard]] static std::shared_ptr<const ForestModel> from_json(const nlohmann::json& j);

private:
    std::vector<std::shared_ptr<const TreeModel>> trees_;
    std::vector<std::uint64_t> seeds_;
    Index max_features_;
    Index n_features_;
};

/// The seed only matters when opts.max_features subsamples features.
[[nodiscard]] std::shared_ptr<const TreeModel> fit_tree(const FeatureMatrix& X, const BinaryLabels& y,
                                                        const SampleWeights* weights = nullptr,
                                                        const TreeOptions& opts = {}, std::uint64_t seed = 0);

/// Tree t is grown on a bootstrap drawn from a seed derived from (seed, t), so the
/// result does not depend on the order in which trees are built.
[[nodiscard]] std::shared_ptr<const ForestModel> fit_forest(const FeatureMatrix& X, const BinaryLabels& y,
                                                            const SampleWeights* weights = nullptr,
                                                            const ForestOptions& opts = {}, std::uint64_t seed = 0);

}  // namespace fairlens
