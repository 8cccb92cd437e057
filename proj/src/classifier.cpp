#include "fairlens/classifier.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/linear_model.hpp"
#include "fairlens/tree.hpp"

namespace fairlens {

void Classifier::check_shape(const Eigen::MatrixXd& X) const {
    if (static_cast<Index>(X.cols()) != n_features()) {
        throw ShapeError(kind() + " model expects " + std::to_string(n_features()) + " feature columns, got " +
                         std::to_string(X.cols()));
    }
}

ProbabilityScores Classifier::predict_scores(const FeatureMatrix& X) const {
    const Eigen::VectorXd p = predict_proba(X.values());
    return ProbabilityScores(std::vector<double>(p.data(), p.data() + p.size()));
}

BinaryLabels Classifier::predict(const FeatureMatrix& X) const { return predict_scores(X).threshold(); }

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Logistic: return "logistic";
        case ModelKind::Tree: return "tree";
        case ModelKind::Forest: return "forest";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "logistic") return ModelKind::Logistic;
    if (name == "tree") return ModelKind::Tree;
    if (name == "forest") return ModelKind::Forest;
    throw ConfigError("unknown model type '" + name + "' (expected logistic, tree or forest)");
}

ClassifierPtr ModelSpec::fit(const FeatureMatrix& X, const BinaryLabels& y, const SampleWeights* weights,
                             std::uint64_t seed) const {
    switch (kind) {
        case ModelKind::Logistic: return fit_logistic(X, y, weights, logistic);
        case ModelKind::Tree: return fit_tree(X, y, weights, tree, seed);
        case ModelKind::Forest: return fit_forest(X, y, weights, forest, seed);
    }
    throw ConfigError("unhandled model kind");
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j{{"kind", to_string(kind)}};
    switch (kind) {
        case ModelKind::Logistic:
            j["l2_lambda"] = logistic.l2_lambda;
            j["max_iter"] = logistic.max_iter;
            j["tol"] = logistic.tol;
            break;
        case ModelKind::Tree:
            j["max_depth"] = tree.max_depth;
            j["min_samples_leaf"] = tree.min_samples_leaf;
            break;
        case ModelKind::Forest:
            j["n_trees"] = forest.n_trees;
            j["max_depth"] = forest.tree.max_depth;
            j["min_samples_leaf"] = forest.tree.min_samples_leaf;
            j["max_features"] = forest.tree.max_features;
            break;
    }
    return j;
}

ClassifierPtr classifier_from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "logistic") return LogisticModel::from_json(j);
        if (kind == "prejudice_remover") return PrejudiceRemoverModel::from_json(j);
        if (kind == "tree") return TreeModel::from_json(j);
        if (kind == "forest") return ForestModel::from_json(j);
        throw ModelFormatError("unknown classifier kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed classifier record: ") + e.what());
    }
}

}  // namespace fairlens
