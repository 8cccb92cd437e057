#pragma once

#include "fairlens/classifier.hpp"

namespace fairlens::postprocess {

inline constexpr double kDefaultTheta = 0.6;

/// Critical-region threshold theta in (0.5, 1) and the probability models whose
/// (optionally weighted) average defines the decision score.
class RejectOptionConfig {
public:
    RejectOptionConfig(double theta, std::vector<ClassifierPtr> estimators, std::vector<double> weights = {});

    [[nodiscard]] double theta() const noexcept { return theta_; }
    [[nodiscard]] const std::vector<ClassifierPtr>& estimators() const noexcept { return estimators_; }
    /// Normalised to sum to one; uniform when none were given.
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

private:
    double theta_;
    std::vector<ClassifierPtr> estimators_;
    std::vector<double> weights_;
};

struct PostprocessedPrediction {
    BinaryLabels labels;
    /// Score consistent with the reassigned label: inside the overridden rows the
    /// probability is reflected towards the assigned class (max(p, 1-p) for s = 1,
    /// min(p, 1-p) for s = 0); elsewhere it is the averaged probability.
    ProbabilityScores scores;
    /// Rows whose label was decided by the protected attribute.
    IndexList overridden;
};

/// Weighted mean of estimator probabilities per row.
[[nodiscard]] std::vector<double> averaged_probability(const RejectOptionConfig& config, const FeatureMatrix& X);

/// Rule on one averaged probability: inside the critical region (max(p, 1-p) < theta)
/// the label is s; outside it is 1[p >= 0.5].
[[nodiscard]] int reject_option_label(double p, int s, double theta) noexcept;

[[nodiscard]] PostprocessedPrediction roc_predict(const RejectOptionConfig& config, const FeatureMatrix& X,
                                                  const ProtectedAttribute& s);

/// Discrimination-aware ensemble: the agreed label where all members agree,
/// otherwise s (1 for the disadvantaged group, 0 for the advantaged group).
/// Scores are the uniform mean member probability, reflected on disagreement rows.
[[nodiscard]] PostprocessedPrediction daec_predict(const std::vector<ClassifierPtr>& estimators,
                                                   const FeatureMatrix& X, const ProtectedAttribute& s);

}  // namespace fairlens::postprocess
