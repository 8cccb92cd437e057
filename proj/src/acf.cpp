#include "fairlens/acf.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/linear_model.hpp"

#include <algorithm>
#include <cmath>

namespace fairlens {

namespace {

constexpr double kClip = 1e-9;

double logit(double p) { return std::log(p / (1.0 - p)); }

Eigen::MatrixXd subtract_fitted(const std::vector<Residualizer>& res, Eigen::MatrixXd values,
                                const ProtectedAttribute& s) {
    for (Index j = 0; j < res.size(); ++j) {
        const double fitted[2] = {res[j].predict(0), res[j].predict(1)};
        auto col = values.col(static_cast<Eigen::Index>(j));
        for (Eigen::Index i = 0; i < col.size(); ++i) col(i) -= fitted[s[static_cast<Index>(i)]];
    }
    return values;
}

}  // namespace

std::vector<FeatureKind> infer_feature_kinds(const FeatureMatrix& X) {
    std::vector<FeatureKind> kinds;
    kinds.reserve(X.cols());
    for (Eigen::Index c = 0; c < X.values().cols(); ++c) {
        const auto col = X.values().col(c);
        const bool binary = (col.array() == 0.0 || col.array() == 1.0).all();
        kinds.push_back(binary ? FeatureKind::Binary : FeatureKind::Continuous);
    }
    return kinds;
}

double Residualizer::predict(int s) const {
    const double z = intercept + slope * s;
    return kind == FeatureKind::Binary ? sigmoid(z) : z;
}

Residualizer fit_residualizer(const Eigen::VectorXd& column, const ProtectedAttribute& s, FeatureKind kind) {
    if (static_cast<Index>(column.size()) != s.size()) {
        throw ValidationError("residualizer: column and s differ in length");
    }
    double sum[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        const int g = s[static_cast<Index>(i)];
        sum[g] += column(i);
        count[g] += 1.0;
    }
    if (count[0] == 0 || count[1] == 0) {
        throw ValidationError("residualizer is degenerate: protected attribute is constant");
    }
    const double mean_a = sum[0] / count[0];
    const double mean_d = sum[1] / count[1];
    if (kind == FeatureKind::Continuous) {
        return {kind, mean_a, mean_d - mean_a};
    }
    const double p_a = std::clamp(mean_a, kClip, 1.0 - kClip);
    const double p_d = std::clamp(mean_d, kClip, 1.0 - kClip);
    return {kind, logit(p_a), logit(p_d) - logit(p_a)};
}

LinearACFModel::LinearACFModel(std::vector<Residualizer> residualizers, std::vector<std::string> column_names,
                               ClassifierPtr final_classifier)
    : residualizers_(std::move(residualizers)),
      column_names_(std::move(column_names)),
      final_(std::move(final_classifier)) {
    if (residualizers_.size() != column_names_.size()) {
        throw ModelFormatError("ACF model: residualizer count differs from column count");
    }
    if (!final_ || final_->n_features() != residualizers_.size()) {
        throw ModelFormatError("ACF model: final classifier must consume exactly one column per residualizer");
    }
}

FeatureMatrix LinearACFModel::residualize(const FeatureMatrix& X, const ProtectedAttribute& s) const {
    if (X.cols() != residualizers_.size()) {
        throw ShapeError("ACF model expects " + std::to_string(residualizers_.size()) + " feature columns, got " +
                         std::to_string(X.cols()));
    }
    if (X.rows() != s.size()) {
        throw ValidationError("ACF residualize: X and s differ in length");
    }
    return {subtract_fitted(residualizers_, X.values(), s), column_names_};
}

nlohmann::json LinearACFModel::to_json() const {
    nlohmann::json res = nlohmann::json::array();
    for (const auto& r : residualizers_) {
        res.push_back({{"kind", r.kind == FeatureKind::Binary ? "binary" : "continuous"},
                       {"intercept", r.intercept},
                       {"slope", r.slope}});
    }
    return {{"kind", "linear_acf"},
            {"columns", column_names_},
            {"residualizers", std::move(res)},
            {"final", final_->to_json()}};
}

LinearACFModel LinearACFModel::from_json(const nlohmann::json& j) {
    try {
        std::vector<Residualizer> res;
        for (const auto& r : j.at("residualizers")) {
            const auto kind = r.at("kind").get<std::string>();
            if (kind != "binary" && kind != "continuous") throw ModelFormatError("unknown residualizer kind");
            res.push_back({kind == "binary" ? FeatureKind::Binary : FeatureKind::Continuous,
                           r.at("intercept").get<double>(), r.at("slope").get<double>()});
        }
        return {std::move(res), j.at("columns").get<std::vector<std::string>>(), classifier_from_json(j.at("final"))};
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed ACF record: ") + e.what());
    }
}

LinearACFModel fit_linear_acf(const FeatureMatrix& X, const BinaryLabels& y, const ProtectedAttribute& s,
                              std::vector<FeatureKind> feature_kinds, const ModelSpec& final_spec,
                              std::uint64_t seed) {
    if (X.rows() != y.size() || y.size() != s.size()) {
        throw ValidationError("fit_linear_acf: X, y and s differ in length");
    }
    if (feature_kinds.empty()) feature_kinds = infer_feature_kinds(X);
    if (feature_kinds.size() != X.cols()) {
        throw ShapeError("fit_linear_acf: one feature kind per column required");
    }
    std::vector<Residualizer> res;
    res.reserve(X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        res.push_back(fit_residualizer(X.values().col(static_cast<Eigen::Index>(j)), s, feature_kinds[j]));
    }
    const FeatureMatrix eps(subtract_fitted(res, X.values(), s), X.column_names());
    auto final_model = final_spec.fit(eps, y, nullptr, seed);
    return {std::move(res), X.column_names(), std::move(final_model)};
}

AcfPrediction predict_acf(const LinearACFModel& model, const FeatureMatrix& X, const ProtectedAttribute& s) {
    const FeatureMatrix eps = model.residualize(X, s);
    auto scores = model.final_classifier()->predict_scores(eps);
    auto labels = scores.threshold();
    return {std::move(labels), std::move(scores)};
}

}  // namespace fairlens
