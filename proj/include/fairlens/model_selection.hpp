#pragma once

#include "fairlens/classifier.hpp"
#include "fairlens/data.hpp"
#include "fairlens/metrics.hpp"
#include "fairlens/pipeline.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fairlens::model_selection {

[[nodiscard]] std::vector<Condition> default_conditions();

enum class Split { Train, Test };
[[nodiscard]] std::string to_string(Split s);

struct ExperimentConfig {
    std::vector<Condition> conditions = default_conditions();
    std::vector<ModelKind> model_types = {ModelKind::Logistic, ModelKind::Tree, ModelKind::Forest};
    std::vector<std::string> protected_names = {"female", "foreign_worker", "age_below_25"};
    Index folds = 10;
    std::uint64_t seed = 0;
    LogisticOptions logistic{};
    TreeOptions tree{};
    ForestOptions forest{};
    MethodOptions method{};
    unsigned jobs = 1;

    /// Throws ConfigError / ParameterError.
    void validate() const;
    [[nodiscard]] ModelSpec model_spec(ModelKind kind) const;
};

struct Fold {
    IndexList train;
    IndexList test;
};

struct FoldPlan {
    std::vector<Fold> folds;
    /// False when some (y, s) cell had fewer than k rows and only y was stratified.
    bool stratified_on_s = true;
};

/// Each (y, s) cell is shuffled with a seeded generator and dealt to folds round-robin,
/// the deal continuing across cells so fold sizes differ by at most one.
/// Throws ParameterError unless 2 <= k <= n.
[[nodiscard]] FoldPlan stratified_kfold(const BinaryLabels& y, const ProtectedAttribute& s, Index k,
                                        std::uint64_t seed);

struct ReportRow {
    Condition condition = Condition::B;
    ModelKind model = ModelKind::Logistic;
    std::string protected_name;
    Index fold = 0;
    Split split = Split::Train;
    double auc = 0.0;
    double mean_difference = 0.0;
};

struct FoldFailure {
    Condition condition = Condition::B;
    ModelKind model = ModelKind::Logistic;
    std::string protected_name;
    Index fold = 0;
    std::string message;
};

struct CellMean {
    Condition condition = Condition::B;
    ModelKind model = ModelKind::Logistic;
    std::string protected_name;
    Split split = Split::Test;
    double auc = 0.0;
    double mean_difference = 0.0;
    Index folds = 0;
};

struct CorrelationCell {
    Condition condition = Condition::B;
    std::string protected_name;
    Index points = 0;
    std::optional<metrics::MetricResult> r;
    std::string error;  // set when r is undefined
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::vector<FoldFailure> failures;
    std::vector<std::string> notes;

    /// Mean over successful folds per (condition, model, protected, split), in row order.
    [[nodiscard]] std::vector<CellMean> means() const;
    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] nlohmann::json to_json() const;
    /// Long format: condition,model,protected,fold,split,metric,value.
    [[nodiscard]] std::string plot_data_csv() const;

    /// Inverse of to_csv (rows only). Throws ParseError naming the line.
    [[nodiscard]] static ExperimentReport from_csv(std::string_view text);
    /// Inverse of to_json. Throws ParseError.
    [[nodiscard]] static ExperimentReport from_json(const nlohmann::json& j);
};

/// Training-split inputs for one protected attribute. Numeric columns are z-scored
/// per fold with training statistics; RPA removes protected_source_columns.
using ExperimentInput = data::EncodedGermanCredit;

/// Rows for every fold of one (condition, model) pair. A fold that throws is
/// recorded in `failures` and skipped.
[[nodiscard]] ExperimentReport run_condition(Condition condition, ModelKind model, const ExperimentInput& input,
                                             const FoldPlan& folds, const ExperimentConfig& config);

/// Full grid. Rows are sorted by the order of conditions, models and protected names
/// in the config, then fold, then split. Output does not depend on config.jobs.
[[nodiscard]] ExperimentReport run_experiment(const std::vector<ExperimentInput>& inputs,
                                              const ExperimentConfig& config);

/// Pearson r between test AUC and test mean difference per (condition, protected),
/// pooling models and folds.
[[nodiscard]] std::vector<CorrelationCell> fairness_utility_correlation(const ExperimentReport& report);

[[nodiscard]] std::string format_fixed(double v);
[[nodiscard]] std::uint64_t stable_hash(std::string_view text) noexcept;

}  // namespace fairlens::model_selection
