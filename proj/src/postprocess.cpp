#include "fairlens/postprocess.hpp"

#include "fairlens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairlens::postprocess {

namespace {

double reflect_towards(double p, int s) { return s == 1 ? std::max(p, 1.0 - p) : std::min(p, 1.0 - p); }

void check_rows(const FeatureMatrix& X, const ProtectedAttribute& s) {
    if (X.rows() != s.size()) throw ValidationError("postprocess: X and s differ in length");
}

}  // namespace

RejectOptionConfig::RejectOptionConfig(double theta, std::vector<ClassifierPtr> estimators,
                                       std::vector<double> weights)
    : theta_(theta), estimators_(std::move(estimators)), weights_(std::move(weights)) {
    if (!(theta_ > 0.5 && theta_ < 1.0)) {
        throw ConfigError("reject-option theta must lie in (0.5, 1), got " + std::to_string(theta_));
    }
    if (estimators_.empty()) throw ConfigError("reject-option classification needs at least one estimator");
    for (const auto& e : estimators_) {
        if (!e) throw ConfigError("reject-option estimator is null");
    }
    if (weights_.empty()) {
        weights_.assign(estimators_.size(), 1.0);
    } else if (weights_.size() != estimators_.size()) {
        throw ConfigError("reject-option weights must have one entry per estimator");
    }
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("reject-option weights must be positive");
    }
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    for (double& w : weights_) w /= total;
}

std::vector<double> averaged_probability(const RejectOptionConfig& config, const FeatureMatrix& X) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(X.rows()));
    for (std::size_t e = 0; e < config.estimators().size(); ++e) {
        mean += config.weights()[e] * config.estimators()[e]->predict_proba(X.values());
    }
    std::vector<double> out(mean.data(), mean.data() + mean.size());
    for (double& p : out) p = std::clamp(p, 0.0, 1.0);
    return out;
}

int reject_option_label(double p, int s, double theta) noexcept {
    if (std::max(p, 1.0 - p) < theta) return s;
    return p >= 0.5 ? 1 : 0;
}

PostprocessedPrediction roc_predict(const RejectOptionConfig& config, const FeatureMatrix& X,
                                    const ProtectedAttribute& s) {
    check_rows(X, s);
    std::vector<double> p = averaged_probability(config, X);
    std::vector<int> labels(p.size());
    PostprocessedPrediction out;
    for (Index i = 0; i < p.size(); ++i) {
        labels[i] = reject_option_label(p[i], s[i], config.theta());
        if (std::max(p[i], 1.0 - p[i]) < config.theta()) {
            out.overridden.push_back(i);
            p[i] = reflect_towards(p[i], s[i]);
        }
    }
    out.labels = BinaryLabels(std::move(labels));
    out.scores = ProbabilityScores(std::move(p));
    return out;
}

PostprocessedPrediction daec_predict(const std::vector<ClassifierPtr>& estimators, const FeatureMatrix& X,
                                     const ProtectedAttribute& s) {
    if (estimators.empty()) throw ConfigError("discrimination-aware ensemble needs at least one estimator");
    check_rows(X, s);
    const Index n = X.rows();
    std::vector<int> positive_votes(n, 0);
    std::vector<double> mean(n, 0.0);
    for (const auto& e : estimators) {
        if (!e) throw ConfigError("ensemble estimator is null");
        const Eigen::VectorXd p = e->predict_proba(X.values());
        for (Index i = 0; i < n; ++i) {
            const double pi = p(static_cast<Eigen::Index>(i));
            mean[i] += pi;
            positive_votes[i] += pi >= 0.5 ? 1 : 0;
        }
    }
    const int members = static_cast<int>(estimators.size());
    PostprocessedPrediction out;
    std::vector<int> labels(n);
    for (Index i = 0; i < n; ++i) {
        mean[i] = std::clamp(mean[i] / members, 0.0, 1.0);
        if (positive_votes[i] == 0 || positive_votes[i] == members) {
            labels[i] = positive_votes[i] == members ? 1 : 0;
        } else {
            labels[i] = s[i];
            mean[i] = reflect_towards(mean[i], s[i]);
            out.overridden.push_back(i);
        }
    }
    out.labels = BinaryLabels(std::move(labels));
    out.scores = ProbabilityScores(std::move(mean));
    return out;
}

}  // namespace fairlens::postprocess
