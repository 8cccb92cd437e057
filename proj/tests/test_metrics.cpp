#include "fairlens/errors.hpp"
#include "fairlens/metrics.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace fairlens;
using namespace fairlens::metrics;

namespace {

double brute_auc(const std::vector<int>& y, const std::vector<double>& p) {
    double wins = 0;
    double pairs = 0;
    for (Index i = 0; i < y.size(); ++i) {
        for (Index j = 0; j < y.size(); ++j) {
            if (y[i] == 1 && y[j] == 0) {
                pairs += 1;
                wins += p[i] > p[j] ? 1.0 : (p[i] == p[j] ? 0.5 : 0.0);
            }
        }
    }
    return wins / pairs;
}

// Exhaustive knn: sort all other rows by (squared distance, index).
std::vector<IndexList> brute_knn(const Eigen::MatrixXd& X, Index k) {
    std::vector<IndexList> out;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        std::vector<std::pair<double, Index>> d;
        for (Eigen::Index j = 0; j < X.rows(); ++j) {
            if (j != i) d.emplace_back((X.row(i) - X.row(j)).squaredNorm(), static_cast<Index>(j));
        }
        std::sort(d.begin(), d.end());
        IndexList nn;
        for (Index t = 0; t < k; ++t) nn.push_back(d[t].second);
        out.push_back(nn);
    }
    return out;
}

double brute_consistency(const Eigen::MatrixXd& X, const std::vector<int>& y, Index k) {
    const auto nn = brute_knn(X, k);
    double total = 0;
    for (Index i = 0; i < y.size(); ++i) {
        for (Index j : nn[i]) total += std::abs(y[i] - y[j]);
    }
    return total / static_cast<double>(y.size() * k);
}

double brute_situation(const Eigen::MatrixXd& X, const std::vector<int>& y, const std::vector<int>& s, Index k) {
    const auto nn = brute_knn(X, k);
    double total = 0;
    int count = 0;
    for (Index i = 0; i < y.size(); ++i) {
        if (s[i] != 1) continue;
        ++count;
        double pos[2] = {0, 0}, n[2] = {0, 0};
        for (Index j : nn[i]) {
            pos[s[j]] += y[j];
            n[s[j]] += 1;
        }
        if (n[0] == 0 || n[1] == 0) continue;
        total += std::max(0.0, pos[0] / n[0] - pos[1] / n[1]);
    }
    return total / count;
}

// Largest md over every placement of the same number of positives on the same s vector.
double brute_max_md(const std::vector<int>& y, const std::vector<int>& s) {
    const Index n = y.size();
    const int positives = std::accumulate(y.begin(), y.end(), 0);
    double best = -2;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != positives) continue;
        std::vector<int> yy(n);
        for (Index i = 0; i < n; ++i) yy[i] = (mask >> i) & 1u;
        best = std::max(best, mean_difference(BinaryLabels(yy), ProtectedAttribute(s, "s")).value);
    }
    return best;
}

}  // namespace

TEST(MeanDifference, HandProportions) {
    const auto r = mean_difference(BinaryLabels({1, 1, 0, 1, 0, 0}), ProtectedAttribute({0, 0, 0, 1, 1, 1}, "s"));
    EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-15);
    EXPECT_LE(r.ci_low, r.value);
    EXPECT_GE(r.ci_high, r.value);
}

TEST(MeanDifference, FullyDiscriminatory) {
    // y = 1 - s.
    const auto r = mean_difference(BinaryLabels({1, 1, 1, 0, 0}), ProtectedAttribute({0, 0, 0, 1, 1}, "s"));
    EXPECT_DOUBLE_EQ(r.value, 1.0);
}

TEST(MeanDifference, PooledTIntervalMatchesScipyQuantiles) {
    // t(0.975, df) from scipy.stats.t.ppf.
    const std::vector<std::pair<int, double>> quantiles = {{4, 2.7764451051977987}, {10, 2.2281388519649385}};
    // n = 6 (df 4): p_a = 2/3 over 3 rows, p_d = 1/3 over 3 rows.
    {
        const auto r = mean_difference(BinaryLabels({1, 1, 0, 1, 0, 0}), ProtectedAttribute({0, 0, 0, 1, 1, 1}, "s"));
        const double var_a = (2.0 / 3.0) * (1.0 / 3.0), var_d = var_a;
        const double sp = std::sqrt((2 * var_a + 2 * var_d) / 4.0);
        const double half = quantiles[0].second * sp * std::sqrt(1.0 / 3 + 1.0 / 3);
        EXPECT_NEAR(r.ci_low, 1.0 / 3 - half, 1e-9);
        EXPECT_NEAR(r.ci_high, 1.0 / 3 + half, 1e-9);
    }
    // n = 12 (df 10): a has 7 rows with 5 positive, d has 5 rows with 1 positive.
    {
        const auto r = mean_difference(BinaryLabels({1, 1, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0}),
                                       ProtectedAttribute({0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, "s"));
        const double pa = 5.0 / 7, pd = 1.0 / 5;
        const double sp = std::sqrt((6 * pa * (1 - pa) + 4 * pd * (1 - pd)) / 10.0);
        const double half = quantiles[1].second * sp * std::sqrt(1.0 / 7 + 1.0 / 5);
        EXPECT_NEAR(r.value, pa - pd, 1e-15);
        EXPECT_NEAR(r.ci_high - r.value, half, 1e-9);
    }
}

TEST(MeanDifference, EmptyGroupIsUndefined) {
    EXPECT_THROW((void)mean_difference(BinaryLabels({1, 0}), ProtectedAttribute({0, 0}, "s")), UndefinedMetricError);
}

TEST(MeanDifference, PropertiesOnRandomInputs) {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const Index n = gen::between(rng, 2, 80);
        const auto y = gen::both_values(rng, n, rng.uniform());
        const auto s = gen::both_values(rng, n, rng.uniform());
        const ProtectedAttribute sa(s, "s");
        const auto md = mean_difference(BinaryLabels(y), sa).value;
        EXPECT_GE(md, -1.0);
        EXPECT_LE(md, 1.0);
        EXPECT_NEAR(md, -mean_difference(BinaryLabels(y), sa.flipped()).value, 1e-12);
        // Permutation invariance.
        IndexList perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(std::span<Index>(perm));
        const auto yp = BinaryLabels(y).select(perm);
        EXPECT_NEAR(mean_difference(yp, sa.select(perm)).value, md, 1e-12);
    }
}

TEST(MeanDifference, IndependentLabelsGiveZero) {
    // Both groups 50% positive.
    EXPECT_DOUBLE_EQ(mean_difference(BinaryLabels({1, 0, 1, 0, 1, 0}), ProtectedAttribute({0, 0, 1, 1, 1, 1}, "s")).value,
                     0.0);
}

TEST(NormalizedMeanDifference, ZeroNumeratorAndUndefined) {
    const auto r =
        normalized_mean_difference(BinaryLabels({1, 0, 1, 0}), ProtectedAttribute({0, 0, 1, 1}, "s"));
    EXPECT_DOUBLE_EQ(r.value, 0.0);
    EXPECT_THROW((void)normalized_mean_difference(BinaryLabels({1, 1, 1}), ProtectedAttribute({0, 1, 1}, "s")),
                 UndefinedMetricError);
}

TEST(NormalizedMeanDifference, BruteForceMaxOracle) {
    Rng rng(17);
    for (int trial = 0; trial < 150; ++trial) {
        const Index n = gen::between(rng, 2, 12);
        auto y = gen::both_values(rng, n, rng.uniform());
        const auto s = gen::both_values(rng, n, rng.uniform());
        const double oracle = brute_max_md(y, s);
        const BinaryLabels yl(y);
        const ProtectedAttribute sa(s, "s");
        EXPECT_NEAR(max_mean_difference(yl, sa), oracle, 1e-12);
        const auto nmd = normalized_mean_difference(yl, sa);
        const auto md = mean_difference(yl, sa);
        EXPECT_NEAR(nmd.value, md.value / oracle, 1e-12);
        if (n > 2) EXPECT_NEAR(nmd.ci_low, md.ci_low / oracle, 1e-12);
        EXPECT_LE(nmd.value, 1.0 + 1e-12);
        // Lower bound only holds when the observed md is itself reachable in the positive direction.
        if (std::abs(md.value) <= oracle) EXPECT_GE(nmd.value, -1.0 - 1e-12);
    }
}

TEST(Consistency, HandLine) {
    Eigen::MatrixXd X(4, 1);
    X << 0, 1, 2, 3;
    EXPECT_DOUBLE_EQ(consistency(FeatureMatrix(X, {"x"}), BinaryLabels({1, 0, 1, 0}), 1), 1.0);
}

TEST(Consistency, ConstantLabelsAndClusters) {
    Rng rng(3);
    const auto X = gen::gaussian_features(rng, 12, 2);
    EXPECT_DOUBLE_EQ(consistency(X, BinaryLabels(std::vector<int>(12, 1)), 3), 0.0);

    Eigen::MatrixXd C(8, 1);
    C << 0, 0.1, 0.2, 0.3, 100, 100.1, 100.2, 100.3;
    EXPECT_DOUBLE_EQ(consistency(FeatureMatrix(C, {"x"}), BinaryLabels({1, 1, 1, 1, 0, 0, 0, 0}), 3), 0.0);
}

TEST(Consistency, KOutOfRange) {
    Eigen::MatrixXd X(3, 1);
    X << 0, 1, 2;
    EXPECT_THROW((void)consistency(FeatureMatrix(X, {"x"}), BinaryLabels({1, 0, 1}), 3), ParameterError);
    EXPECT_THROW((void)consistency(FeatureMatrix(X, {"x"}), BinaryLabels({1, 0, 1}), 0), ParameterError);
}

TEST(NearestNeighbors, TiesResolveToLowerIndex) {
    Eigen::MatrixXd X(4, 1);
    X << 0, 1, -1, 2;
    const auto nn = nearest_neighbors(FeatureMatrix(X, {"x"}), 2);
    // Row 0 has rows 1 and 2 both at distance 1.
    EXPECT_EQ(nn[0], 1u);
    EXPECT_EQ(nn[1], 2u);
}

TEST(KnnMetrics, ExhaustiveOracle) {
    Rng rng(23);
    for (int trial = 0; trial < 120; ++trial) {
        const Index n = gen::between(rng, 3, 20);
        const Index k = gen::between(rng, 1, n - 1);
        const auto X = trial % 2 ? gen::grid_features(rng, n, 2) : gen::gaussian_features(rng, n, 3);
        const auto y = gen::both_values(rng, n, 0.5);
        const auto s = gen::both_values(rng, n, 0.5);
        const auto nn = nearest_neighbors(X, k);
        const auto oracle = brute_knn(X.values(), k);
        for (Index i = 0; i < n; ++i) {
            for (Index t = 0; t < k; ++t) ASSERT_EQ(nn[i * k + t], oracle[i][t]);
        }
        EXPECT_NEAR(consistency(X, BinaryLabels(y), k), brute_consistency(X.values(), y, k), 1e-12);
        EXPECT_NEAR(situation_test_score(X, BinaryLabels(y), ProtectedAttribute(s, "s"), k),
                    brute_situation(X.values(), y, s, k), 1e-12);
    }
}

TEST(SituationTest, HandSixPoints) {
    // Two clusters on a line; k = 2.
    Eigen::MatrixXd X(6, 1);
    X << 0, 1, 2, 10, 11, 12;
    const BinaryLabels y({1, 0, 1, 1, 1, 0});
    const ProtectedAttribute s({0, 1, 0, 1, 0, 1}, "s");
    // Row 1: neighbours 0 (a, +) and 2 (a, +): no d neighbour -> 0.
    // Row 3: neighbours 4 (a, +) and 5 (d, -): 1 - 0 = 1.
    // Row 5: neighbours 4 (a, +) and 3 (d, +): 1 - 1 = 0.
    EXPECT_NEAR(situation_test_score(FeatureMatrix(X, {"x"}), y, s, 2), 1.0 / 3.0, 1e-15);
}

TEST(SituationTest, ExtremesAndErrors) {
    Eigen::MatrixXd X(4, 1);
    X << 0, 1, 2, 3;
    const FeatureMatrix F(X, {"x"});
    EXPECT_DOUBLE_EQ(situation_test_score(F, BinaryLabels({1, 1, 1, 1}), ProtectedAttribute({0, 1, 0, 1}, "s"), 2), 0.0);
    // Every d point: a neighbours positive, d neighbours negative.
    Eigen::MatrixXd Y(4, 1);
    Y << 0, 1, 10, 11;
    EXPECT_DOUBLE_EQ(
        situation_test_score(FeatureMatrix(Y, {"x"}), BinaryLabels({1, 0, 1, 0}), ProtectedAttribute({0, 1, 0, 1}, "s"), 1),
        0.0);
    Eigen::MatrixXd Z(6, 1);
    Z << 0, 0.1, 0.2, 10, 10.1, 10.2;
    EXPECT_DOUBLE_EQ(situation_test_score(FeatureMatrix(Z, {"x"}), BinaryLabels({1, 0, 0, 1, 0, 0}),
                                          ProtectedAttribute({0, 1, 1, 0, 1, 1}, "s"), 2),
                     1.0);
    EXPECT_THROW((void)situation_test_score(F, BinaryLabels({1, 0, 1, 0}), ProtectedAttribute({0, 0, 0, 0}, "s"), 1),
                 UndefinedMetricError);
}

TEST(Auc, Extremes) {
    EXPECT_DOUBLE_EQ(auc(BinaryLabels({0, 0, 1, 1}), std::vector<double>{0.1, 0.2, 0.8, 0.9}), 1.0);
    EXPECT_DOUBLE_EQ(auc(BinaryLabels({0, 0, 1, 1}), std::vector<double>(4, 0.3)), 0.5);
    EXPECT_THROW((void)auc(BinaryLabels({1, 1}), std::vector<double>{0.1, 0.2}), UndefinedMetricError);
}

TEST(Auc, PairwiseOracleWithTies) {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = gen::between(rng, 2, 50);
        const auto y = gen::both_values(rng, n, rng.uniform());
        std::vector<double> p(n);
        const bool coarse = trial % 2 == 0;
        for (auto& v : p) v = coarse ? static_cast<double>(rng.uniform_index(5)) / 4.0 : rng.uniform();
        EXPECT_EQ(auc(BinaryLabels(y), p), brute_auc(y, p));
    }
}

TEST(Pearson, PerfectAndTextbook) {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y2(5), yn(5);
    for (int i = 0; i < 5; ++i) {
        y2[i] = 2 * x[i] + 1;
        yn[i] = -x[i];
    }
    EXPECT_NEAR(pearson_r_with_ci(x, y2).value, 1.0, 1e-15);
    EXPECT_NEAR(pearson_r_with_ci(x, yn).value, -1.0, 1e-15);

    const std::vector<double> a = {1, 2, 3, 4, 6};
    const std::vector<double> b = {2, 1, 4, 3, 7};
    // mean a = 3.2, mean b = 3.4; Sab = 15.6, Saa = 14.8, Sbb = 21.2.
    const double r = 15.6 / std::sqrt(14.8 * 21.2);
    const auto res = pearson_r_with_ci(a, b);
    EXPECT_NEAR(res.value, r, 1e-12);
    const double z = std::atanh(r), half = 1.96 / std::sqrt(2.0);
    EXPECT_NEAR(res.ci_low, std::tanh(z - half), 1e-12);
    EXPECT_NEAR(res.ci_high, std::tanh(z + half), 1e-12);
}

TEST(Pearson, Undefined) {
    EXPECT_THROW((void)pearson_r_with_ci(std::vector<double>{1, 1, 1, 1}, std::vector<double>{1, 2, 3, 4}),
                 UndefinedMetricError);
    // A constant vector whose floating-point mean is not exact.
    EXPECT_THROW((void)pearson_r_with_ci(std::vector<double>{1, 2, 3, 4, 5, 6}, std::vector<double>(6, 0.2)),
                 UndefinedMetricError);
    EXPECT_THROW((void)pearson_r_with_ci(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}),
                 UndefinedMetricError);
}
