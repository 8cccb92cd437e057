#pragma once

#include "fairlens/core.hpp"

#include <span>
#include <string>

namespace fairlens::metrics {

/// A point estimate with its 95% interval. Bounds are not clipped to the metric's range.
struct MetricResult {
    std::string metric_name;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

inline constexpr Index kDefaultNeighbors = 5;

/// P(y=1 | s=0) - P(y=1 | s=1).
///
/// The interval is the pooled-variance two-sample Student-t interval on the
/// difference of group means: t(0.975, n-2) * s_p * sqrt(1/n_a + 1/n_d), where
/// s_p pools the within-group (population) standard deviations.
/// Throws UndefinedMetricError when either group is empty.
[[nodiscard]] MetricResult mean_difference(const BinaryLabels& y, const ProtectedAttribute& s);

/// Largest mean difference reachable with the same group sizes and positive rate:
/// min(P(y=1)/P(s=0), P(y=0)/P(s=1)).
[[nodiscard]] double max_mean_difference(const BinaryLabels& y, const ProtectedAttribute& s);

/// mean_difference / max_mean_difference; the interval is md's interval over the same divisor.
/// Throws UndefinedMetricError when the divisor is zero (all labels identical).
[[nodiscard]] MetricResult normalized_mean_difference(const BinaryLabels& y, const ProtectedAttribute& s);

/// k nearest neighbours of every row under Euclidean distance, excluding the row
/// itself; equal distances resolve to the lower row index. Result is n x k, row-major.
[[nodiscard]] std::vector<Index> nearest_neighbors(const FeatureMatrix& X, Index k);

/// Mean absolute label disagreement between each row and its k neighbours.
/// 0 means neighbours always agree, 1 means they always disagree.
[[nodiscard]] double consistency(const FeatureMatrix& X, const BinaryLabels& y, Index k = kDefaultNeighbors);

/// Average over disadvantaged rows of the mean difference inside each row's
/// neighbourhood (neighbours split by their own s). A neighbourhood missing
/// either group scores 0 and negative neighbourhood scores are clamped to 0.
[[nodiscard]] double situation_test_score(const FeatureMatrix& X, const BinaryLabels& y, const ProtectedAttribute& s,
                                          Index k = kDefaultNeighbors);

/// Mann-Whitney estimate of P(score_pos > score_neg), ties counted one half.
[[nodiscard]] double auc(const BinaryLabels& y_true, std::span<const double> scores);
[[nodiscard]] double auc(const BinaryLabels& y_true, const ProbabilityScores& scores);

/// Sample Pearson r with a Fisher-z 95% interval.
[[nodiscard]] MetricResult pearson_r_with_ci(std::span<const double> x, std::span<const double> y);

}  // namespace fairlens::metrics
