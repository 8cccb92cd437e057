#pragma once

#include "fairlens/classifier.hpp"

namespace fairlens {

struct FitMeta {
    int iterations = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    bool converged = false;  // false is a warning, not a failure
    std::vector<double> objective_trace;
};

/// Numerically stable logistic function.
[[nodiscard]] double sigmoid(double z) noexcept;

/// Weighted L2-regularised logistic regression with an unpenalised intercept.
class LogisticModel final : public Classifier {
public:
    LogisticModel(Eigen::VectorXd coefficients, double intercept, double l2_lambda, FitMeta meta = {});

    [[nodiscard]] const Eigen::VectorXd& coefficients() const noexcept { return coef_; }
    [[nodiscard]] double intercept() const noexcept { return intercept_; }
    [[nodiscard]] double l2_lambda() const noexcept { return lambda_; }
    [[nodiscard]] const FitMeta& fit_meta() const noexcept { return meta_; }

    [[nodiscard]] Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const override;
    [[nodiscard]] Index n_features() const noexcept override { return static_cast<Index>(coef_.size()); }
    [[nodiscard]] std::string kind() const override { return "logistic"; }
    [[nodiscard]] nlohmann::json to_json() const override;
    [[nodiscard]] static std::shared_ptr<const LogisticModel> from_json(const nlohmann::json& j);

private:
    Eigen::VectorXd coef_;
    double intercept_;
    double lambda_;
    FitMeta meta_;
};

/// Parameter layout shared by the objectives below: [coefficients..., intercept].
///
/// sum_i w_i * (log(1 + e^{z_i}) - y_i z_i) + (lambda / 2) * ||beta||^2,  z = X beta + b.
/// Weights default to 1 when empty.
[[nodiscard]] double logistic_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y, const Eigen::VectorXd& weights, double l2_lambda,
                                        Eigen::VectorXd* grad);

[[nodiscard]] std::shared_ptr<const LogisticModel> fit_logistic(const FeatureMatrix& X, const BinaryLabels& y,
                                                                const SampleWeights* weights = nullptr,
                                                                const LogisticOptions& opts = {});

/// Mutual-information prejudice index between soft predictions and s, averaged per row:
/// (1/n) sum_i sum_c p_i(c) ln( p(c | s_i) / p(c) ), where p(c | s) and p(c) are means of p_i(c).
[[nodiscard]] double prejudice_index(const Eigen::VectorXd& proba, const ProtectedAttribute& s);

/// Logistic regression trained with an extra prejudice-index penalty.
class PrejudiceRemoverModel final : public Classifier {
public:
    PrejudiceRemoverModel(Eigen::VectorXd coefficients, double intercept, double l2_lambda, double eta,
                          Penalty penalty, FitMeta meta = {});

    [[nodiscard]] const LogisticModel& base() const noexcept { return base_; }
    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] Penalty penalty() const noexcept { return penalty_; }
    [[nodiscard]] const FitMeta& fit_meta() const noexcept { return base_.fit_meta(); }

    [[nodiscard]] Eigen::VectorXd predict_proba(const Eigen::MatrixXd& X) const override {
        return base_.predict_proba(X);
    }
    [[nodiscard]] Index n_features() const noexcept override { return base_.n_features(); }
    [[nodiscard]] std::string kind() const override { return "prejudice_remover"; }
    [[nodiscard]] nlohmann::json to_json() const override;
    [[nodiscard]] static std::shared_ptr<const PrejudiceRemoverModel> from_json(const nlohmann::json& j);

private:
    LogisticModel base_;
    double eta_;
    Penalty penalty_;
};

struct PrejudiceRemoverOptions {
    double eta = 1.0;
    Penalty penalty = Penalty::L2;
    LogisticOptions logistic{};
};

/// Full training objective:
///   sum_i logloss_i + penalty(beta) + eta * n * prejudice_index
/// with penalty = (lambda/2)||beta||^2 (L2) or lambda*||beta||_1 (L1, subgradient sign(0) = 0).
/// With eta = 0 and L2 this is exactly logistic_objective with unit weights.
[[nodiscard]] double prejudice_remover_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X,
                                                 const Eigen::VectorXd& y, const ProtectedAttribute& s,
                                                 double l2_lambda, double eta, Penalty penalty,
                                                 Eigen::VectorXd* grad);

[[nodiscard]] std::shared_ptr<const PrejudiceRemoverModel> fit_prejudice_remover(
    const FeatureMatrix& X, const BinaryLabels& y, const ProtectedAttribute& s,
    const PrejudiceRemoverOptions& opts = {});

}  // namespace fairlens
