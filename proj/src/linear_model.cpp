#include "fairlens/linear_model.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/optimize.hpp"

#include <cmath>
#include <limits>

namespace fairlens {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

double softplus(double z) noexcept { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Eigen::VectorXd to_vector(const std::vector<int>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

nlohmann::json meta_to_json(const FitMeta& m) {
    return {{"iterations", m.iterations}, {"objective", m.objective}, {"grad_norm", m.grad_norm},
            {"converged", m.converged}};
}

FitMeta meta_from_json(const nlohmann::json& j) {
    FitMeta m;
    if (j.contains("fit_meta")) {
        const auto& f = j.at("fit_meta");
        m.iterations = f.at("iterations").get<int>();
        m.objective = f.at("objective").get<double>();
        m.grad_norm = f.at("grad_norm").get<double>();
        m.converged = f.at("converged").get<bool>();
    }
    return m;
}

Eigen::VectorXd coef_from_json(const nlohmann::json& j) {
    const auto v = j.at("coefficients").get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

FitMeta to_meta(const optimize::Result& r) {
    return {r.iterations, r.value, r.grad_norm, r.converged, r.trace};
}

struct GroupMeans {
    double overall = 0.0;
    double group[2] = {0.0, 0.0};
};

GroupMeans group_means(const Eigen::VectorXd& proba, const ProtectedAttribute& s) {
    double sum[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    for (Eigen::Index i = 0; i < proba.size(); ++i) {
        const int g = s[static_cast<Index>(i)];
        sum[g] += proba(i);
        count[g] += 1.0;
    }
    if (count[0] == 0 || count[1] == 0) {
        throw UndefinedMetricError("prejudice index needs both protected groups to be non-empty");
    }
    GroupMeans m;
    m.overall = (sum[0] + sum[1]) / (count[0] + count[1]);
    m.group[0] = sum[0] / count[0];
    m.group[1] = sum[1] / count[1];
    return m;
}

// ln(p(c=1|g)/p(c=1)) - ln(p(c=0|g)/p(c=0)), and the per-row PI contributions, for each group g.
struct PiTerms {
    double log_ratio_pos[2];
    double log_ratio_neg[2];
};

PiTerms pi_terms(const GroupMeans& m) {
    PiTerms t{};
    const double q1 = std::max(m.overall, kTiny);
    const double q0 = std::max(1.0 - m.overall, kTiny);
    for (int g = 0; g < 2; ++g) {
        t.log_ratio_pos[g] = std::log(std::max(m.group[g], kTiny) / q1);
        t.log_ratio_neg[g] = std::log(std::max(1.0 - m.group[g], kTiny) / q0);
    }
    return t;
}

}  // namespace

double sigmoid(double z) noexcept {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

LogisticModel::LogisticModel(Eigen::VectorXd coefficients, double intercept, double l2_lambda, FitMeta meta)
    : coef_(std::move(coefficients)), intercept_(intercept), lambda_(l2_lambda), meta_(std::move(meta)) {}

Eigen::VectorXd LogisticModel::predict_proba(const Eigen::MatrixXd& X) const {
    check_shape(X);
    Eigen::VectorXd z = X * coef_;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i) + intercept_);
    return z;
}

nlohmann::json LogisticModel::to_json() const {
    return {{"kind", kind()},
            {"coefficients", std::vector<double>(coef_.data(), coef_.data() + coef_.size())},
            {"intercept", intercept_},
            {"l2_lambda", lambda_},
            {"fit_meta", meta_to_json(meta_)}};
}

std::shared_ptr<const LogisticModel> LogisticModel::from_json(const nlohmann::json& j) {
    return std::make_shared<const LogisticModel>(coef_from_json(j), j.at("intercept").get<double>(),
                                                 j.at("l2_lambda").get<double>(), meta_from_json(j));
}

double logistic_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& weights, double l2_lambda, Eigen::VectorXd* grad) {
    const Eigen::Index m = X.cols();
    const auto beta = params.head(m);
    const double b = params(m);
    const Eigen::VectorXd z = (X * beta).array() + b;
    const bool weighted = weights.size() > 0;

    double value = 0.0;
    Eigen::VectorXd residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double w = weighted ? weights(i) : 1.0;
        value += w * (softplus(z(i)) - y(i) * z(i));
        residual(i) = w * (sigmoid(z(i)) - y(i));
    }
    value += 0.5 * l2_lambda * beta.squaredNorm();
    if (grad != nullptr) {
        grad->resize(m + 1);
        grad->head(m) = X.transpose() * residual + l2_lambda * beta;
        (*grad)(m) = residual.sum();
    }
    return value;
}

std::shared_ptr<const LogisticModel> fit_logistic(const FeatureMatrix& X, const BinaryLabels& y,
                                                  const SampleWeights* weights, const LogisticOptions& opts) {
    if (X.rows() != y.size()) throw ValidationError("fit_logistic: X and y differ in length");
    Eigen::VectorXd w;
    if (weights != nullptr) {
        if (weights->size() != y.size()) throw ValidationError("fit_logistic: weights length does not match y");
        w = Eigen::Map<const Eigen::VectorXd>(weights->values().data(), static_cast<Eigen::Index>(weights->size()));
    }
    const Eigen::VectorXd target = to_vector(y.values());
    const Eigen::MatrixXd& data = X.values();
    const double lambda = opts.l2_lambda;

    auto objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
        return logistic_objective(p, data, target, w, lambda, g);
    };
    const auto result = optimize::gradient_descent(objective, Eigen::VectorXd::Zero(data.cols() + 1),
                                                   {opts.max_iter, opts.tol});
    return std::make_shared<const LogisticModel>(result.x.head(data.cols()), result.x(data.cols()), lambda,
                                                 to_meta(result));
}

double prejudice_index(const Eigen::VectorXd& proba, const ProtectedAttribute& s) {
    if (static_cast<Index>(proba.size()) != s.size()) {
        throw ValidationError("prejudice_index: probabilities and s differ in length");
    }
    const PiTerms t = pi_terms(group_means(proba, s));
    double total = 0.0;
    for (Eigen::Index i = 0; i < proba.size(); ++i) {
        const int g = s[static_cast<Index>(i)];
        total += proba(i) * t.log_ratio_pos[g] + (1.0 - proba(i)) * t.log_ratio_neg[g];
    }
    return total / static_cast<double>(proba.size());
}

PrejudiceRemoverModel::PrejudiceRemoverModel(Eigen::VectorXd coefficients, double intercept, double l2_lambda,
                                             double eta, Penalty penalty, FitMeta meta)
    : base_(std::move(coefficients), intercept, l2_lambda, std::move(meta)), eta_(eta), penalty_(penalty) {}

nlohmann::json PrejudiceRemoverModel::to_json() const {
    auto j = base_.to_json();
    j["kind"] = kind();
    j["eta"] = eta_;
    j["penalty"] = penalty_ == Penalty::L1 ? "L1" : "L2";
    return j;
}

std::shared_ptr<const PrejudiceRemoverModel> PrejudiceRemoverModel::from_json(const nlohmann::json& j) {
    const auto penalty = j.at("penalty").get<std::string>();
    if (penalty != "L1" && penalty != "L2") throw ModelFormatError("unknown penalty '" + penalty + "'");
    return std::make_shared<const PrejudiceRemoverModel>(
        coef_from_json(j), j.at("intercept").get<double>(), j.at("l2_lambda").get<double>(),
        j.at("eta").get<double>(), penalty == "L1" ? Penalty::L1 : Penalty::L2, meta_from_json(j));
}

double prejudice_remover_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   const ProtectedAttribute& s, double l2_lambda, double eta, Penalty penalty,
                                   Eigen::VectorXd* grad) {
    const Eigen::Index m = X.cols();
    const auto beta = params.head(m);
    const double b = params(m);
    const Eigen::VectorXd z = (X * beta).array() + b;

    Eigen::VectorXd proba(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) proba(i) = sigmoid(z(i));

    double value = 0.0;
    Eigen::VectorXd dz(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        value += softplus(z(i)) - y(i) * z(i);
        dz(i) = proba(i) - y(i);
    }

    if (eta != 0.0) {
        // d/dp_i of sum_j sum_c p_j(c) ln(p(c|s_j)/p(c)) reduces to the log-ratio difference:
        // the terms through the group and overall means cancel because each mean pair sums to 1.
        const PiTerms t = pi_terms(group_means(proba, s));
        double pi_sum = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const int g = s[static_cast<Index>(i)];
            pi_sum += proba(i) * t.log_ratio_pos[g] + (1.0 - proba(i)) * t.log_ratio_neg[g];
            dz(i) += eta * proba(i) * (1.0 - proba(i)) * (t.log_ratio_pos[g] - t.log_ratio_neg[g]);
        }
        value += eta * pi_sum;
    }

    Eigen::VectorXd penalty_grad;
    if (penalty == Penalty::L2) {
        value += 0.5 * l2_lambda * beta.squaredNorm();
        penalty_grad = l2_lambda * beta;
    } else {
        value += l2_lambda * beta.lpNorm<1>();
        penalty_grad = l2_lambda * beta.unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
    }

    if (grad != nullptr) {
        grad->resize(m + 1);
        grad->head(m) = X.transpose() * dz + penalty_grad;
        (*grad)(m) = dz.sum();
    }
    return value;
}

std::shared_ptr<const PrejudiceRemoverModel> fit_prejudice_remover(const FeatureMatrix& X, const BinaryLabels& y,
                                                                   const ProtectedAttribute& s,
                                                                   const PrejudiceRemoverOptions& opts) {
    if (X.rows() != y.size() || y.size() != s.size()) {
        throw ValidationError("fit_prejudice_remover: X, y and s differ in length");
    }
    const Index n_d = s.count_disadvantaged();
    if (n_d == 0 || n_d == s.size()) {
        throw UndefinedMetricError("fit_prejudice_remover needs both protected groups");
    }
    if (opts.eta < 0.0) throw ParameterError("eta must be non-negative");

    const Eigen::VectorXd target = to_vector(y.values());
    const Eigen::MatrixXd& data = X.values();
    auto objective = [&](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
        return prejudice_remover_objective(p, data, target, s, opts.logistic.l2_lambda, opts.eta, opts.penalty, g);
    };
    const auto result = optimize::gradient_descent(objective, Eigen::VectorXd::Zero(data.cols() + 1),
                                                   {opts.logistic.max_iter, opts.logistic.tol});
    return std::make_shared<const PrejudiceRemoverModel>(result.x.head(data.cols()), result.x(data.cols()),
                                                         opts.logistic.l2_lambda, opts.eta, opts.penalty,
                                                         to_meta(result));
}

}  // namespace fairlens
