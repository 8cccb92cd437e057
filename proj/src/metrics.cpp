#include "fairlens/metrics.hpp"

#include "fairlens/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairlens::metrics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GroupCounts {
    double n_advantaged = 0;
    double n_disadvantaged = 0;
    double pos_advantaged = 0;
    double pos_disadvantaged = 0;
};

GroupCounts count_groups(const BinaryLabels& y, const ProtectedAttribute& s) {
    if (y.size() != s.size()) {
        throw ValidationError("length mismatch: y has " + std::to_string(y.size()) + " entries, s has " +
                              std::to_string(s.size()));
    }
    GroupCounts c;
    for (Index i = 0; i < y.size(); ++i) {
        if (s[i] == 1) {
            c.n_disadvantaged += 1;
            c.pos_disadvantaged += y[i];
        } else {
            c.n_advantaged += 1;
            c.pos_advantaged += y[i];
        }
    }
    if (c.n_advantaged == 0 || c.n_disadvantaged == 0) {
        throw UndefinedMetricError("mean difference needs both protected groups to be non-empty");
    }
    return c;
}

}  // namespace

MetricResult mean_difference(const BinaryLabels& y, const ProtectedAttribute& s) {
    const GroupCounts c = count_groups(y, s);
    const double p_a = c.pos_advantaged / c.n_advantaged;
    const double p_d = c.pos_disadvantaged / c.n_disadvantaged;
    const double md = p_a - p_d;

    MetricResult out{"mean_difference", md, kNaN, kNaN};
    const double df = c.n_advantaged + c.n_disadvantaged - 2.0;
    if (df >= 1.0) {
        // Bernoulli population variance within each group is p(1-p).
        const double pooled_var =
            ((c.n_disadvantaged - 1.0) * p_d * (1.0 - p_d) + (c.n_advantaged - 1.0) * p_a * (1.0 - p_a)) / df;
        const boost::math::students_t dist(df);
        const double t = boost::math::quantile(dist, 0.975);
        const double margin =
            t * std::sqrt(pooled_var) * std::sqrt(1.0 / c.n_advantaged + 1.0 / c.n_disadvantaged);
        out.ci_low = md - margin;
        out.ci_high = md + margin;
    }
    return out;
}

double max_mean_difference(const BinaryLabels& y, const ProtectedAttribute& s) {
    const GroupCounts c = count_groups(y, s);
    const double n = c.n_advantaged + c.n_disadvantaged;
    const double p_pos = (c.pos_advantaged + c.pos_disadvantaged) / n;
    const double p_adv = c.n_advantaged / n;
    const double p_dis = c.n_disadvantaged / n;
    return std::min(p_pos / p_adv, (1.0 - p_pos) / p_dis);
}

MetricResult normalized_mean_difference(const BinaryLabels& y, const ProtectedAttribute& s) {
    const double d_max = max_mean_difference(y, s);
    if (d_max <= 0.0) {
        throw UndefinedMetricError("normalized mean difference is undefined when all labels are identical");
    }
    const MetricResult md = mean_difference(y, s);
    return {"normalized_mean_difference", md.value / d_max, md.ci_low / d_max, md.ci_high / d_max};
}

std::vector<Index> nearest_neighbors(const FeatureMatrix& X, Index k) {
    const Index n = X.rows();
    if (k < 1 || k >= n) {
        throw ParameterError("neighbour count k must satisfy 1 <= k < n (k=" + std::to_string(k) +
                             ", n=" + std::to_string(n) + ")");
    }
    // Row-major copy so each distance walks contiguous memory.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> M = X.values();
    const Eigen::Index m = M.cols();

    Eigen::MatrixXd dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Index i = 0; i < n; ++i) {
        dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
        const double* a = M.row(static_cast<Eigen::Index>(i)).data();
        for (Index j = i + 1; j < n; ++j) {
            const double* b = M.row(static_cast<Eigen::Index>(j)).data();
            double d = 0.0;
            for (Eigen::Index c = 0; c < m; ++c) {
                const double diff = a[c] - b[c];
                d += diff * diff;
            }
            dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
            dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
        }
    }

    std::vector<Index> out(n * k);
    std::vector<Index> order(n - 1);
    for (Index i = 0; i < n; ++i) {
        Index pos = 0;
        for (Index j = 0; j < n; ++j) {
            if (j != i) order[pos++] = j;
        }
        const auto* row = &dist(0, static_cast<Eigen::Index>(i));  // column i == row i (symmetric)
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [row](Index a, Index b) { return row[a] < row[b] || (row[a] == row[b] && a < b); });
        std::copy_n(order.begin(), k, out.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    return out;
}

double consistency(const FeatureMatrix& X, const BinaryLabels& y, Index k) {
    if (X.rows() != y.size()) {
        throw ValidationError("length mismatch between X and y");
    }
    const auto nn = nearest_neighbors(X, k);
    const Index n = y.size();
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < k; ++j) {
            total += std::abs(y[i] - y[nn[i * k + j]]);
        }
    }
    return total / (static_cast<double>(n) * static_cast<double>(k));
}

double situation_test_score(const FeatureMatrix& X, const BinaryLabels& y, const ProtectedAttribute& s, Index k) {
    if (X.rows() != y.size() || y.size() != s.size()) {
        throw ValidationError("length mismatch between X, y and s");
    }
    if (s.count_disadvantaged() == 0) {
        throw UndefinedMetricError("situation test score needs at least one disadvantaged observation");
    }
    const auto nn = nearest_neighbors(X, k);
    double total = 0.0;
    Index n_disadvantaged = 0;
    for (Index i = 0; i < y.size(); ++i) {
        if (s[i] != 1) continue;
        ++n_disadvantaged;
        double n_a = 0, pos_a = 0, n_d = 0, pos_d = 0;
        for (Index j = 0; j < k; ++j) {
            const Index nb = nn[i * k + j];
            if (s[nb] == 1) {
                n_d += 1;
                pos_d += y[nb];
            } else {
                n_a += 1;
                pos_a += y[nb];
            }
        }
        if (n_a == 0 || n_d == 0) continue;
        total += std::max(0.0, pos_a / n_a - pos_d / n_d);
    }
    return total / static_cast<double>(n_disadvantaged);
}

double auc(const BinaryLabels& y_true, std::span<const double> scores) {
    const Index n = y_true.size();
    if (scores.size() != n) {
        throw ValidationError("length mismatch between labels and scores");
    }
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores[a] < scores[b]; });

    // Mid-ranks over tie blocks; U = sum of positive ranks - n_pos(n_pos+1)/2.
    double rank_sum_pos = 0.0;
    double n_pos = 0.0;
    Index i = 0;
    while (i < n) {
        Index j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (Index t = i; t <= j; ++t) {
            if (y_true[order[t]] == 1) {
                rank_sum_pos += mid_rank;
                n_pos += 1.0;
            }
        }
        i = j + 1;
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw UndefinedMetricError("AUC needs both classes in y_true");
    }
    const double u = rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0;
    return u / (n_pos * n_neg);
}

double auc(const BinaryLabels& y_true, const ProbabilityScores& scores) {
    return auc(y_true, std::span<const double>(scores.values()));
}

MetricResult pearson_r_with_ci(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError("pearson_r_with_ci: vectors differ in length");
    }
    const Index n = x.size();
    if (n < 4) {
        throw UndefinedMetricError("pearson_r_with_ci needs at least 4 points");
    }
    const auto constant = [](std::span<const double> v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo == *hi;
    };
    if (constant(x) || constant(y)) {
        throw UndefinedMetricError("pearson correlation is undefined for a constant vector");
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw UndefinedMetricError("pearson correlation is undefined for a constant vector");
    }
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double z = std::atanh(r);
    const double half = 1.96 / std::sqrt(static_cast<double>(n) - 3.0);
    return {"pearson_r", r, std::tanh(z - half), std::tanh(z + half)};
}

}  // namespace fairlens::metrics
