#pragma once

#include "fairlens/acf.hpp"
#include "fairlens/classifier.hpp"
#include "fairlens/data.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fairlens {

/// B: baseline, RPA: protected-source columns removed, RTV: relabelled training labels,
/// CFM: additive counterfactually fair model, ROC: reject-option postprocessing.
/// RW, US, PS, PRR and DAEC are extra conditions outside the default grid.
enum class Condition { B, RPA, RTV, CFM, ROC, RW, US, PS, PRR, DAEC };

[[nodiscard]] std::string to_string(Condition c);
[[nodiscard]] Condition parse_condition(const std::string& name);
/// False for pairs that have no recipe (PRR is logistic only).
[[nodiscard]] bool compatible(Condition c, ModelKind m) noexcept;
/// Whether prediction needs the protected attribute.
[[nodiscard]] bool needs_protected(Condition c) noexcept;

struct MethodOptions {
    double theta = 0.6;       // ROC
    double eta = 1.0;         // PRR
    Index daec_members = 5;   // DAEC
};

struct PipelineOutput {
    BinaryLabels labels;
    std::vector<double> scores;
};

/// A fitted method: standardization, column selection and the condition's predictor.
/// Input features are the raw (unstandardized) encoded columns.
class Pipeline {
public:
    struct Roc {
        double theta;
        ClassifierPtr estimator;
    };
    struct Ensemble {
        std::vector<ClassifierPtr> members;
    };
    using Predictor = std::variant<ClassifierPtr, LinearACFModel, Roc, Ensemble>;

    Pipeline(Condition condition, ModelKind model, std::vector<std::string> input_columns,
             data::Standardizer scaler, std::vector<std::string> dropped, Predictor predictor);

    [[nodiscard]] Condition condition() const noexcept { return condition_; }
    [[nodiscard]] ModelKind model() const noexcept { return model_; }
    [[nodiscard]] const std::vector<std::string>& input_columns() const noexcept { return input_columns_; }
    [[nodiscard]] bool needs_protected() const noexcept { return fairlens::needs_protected(condition_); }

    /// X must carry input_columns() in order. s is required when needs_protected().
    [[nodiscard]] PipelineOutput predict(const FeatureMatrix& X, const ProtectedAttribute* s) const;

    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] static Pipeline from_json(const nlohmann::json& j);

private:
    Condition condition_;
    ModelKind model_;
    std::vector<std::string> input_columns_;
    data::Standardizer scaler_;
    std::vector<std::string> dropped_;
    Predictor predictor_;
};

struct PipelineRequest {
    Condition condition = Condition::B;
    ModelSpec model{};
    MethodOptions method{};
    std::vector<std::string> numeric_columns;           // z-scored with training statistics
    std::vector<std::string> protected_source_columns;  // removed under RPA
    std::uint64_t seed = 0;
};

/// Fits the condition's recipe on raw training data. `base` caches the plain model
/// fitted on the standardized training features, which B and ROC share.
[[nodiscard]] Pipeline fit_pipeline(const PipelineRequest& request, const Dataset& train,
                                    ClassifierPtr* base = nullptr);

inline constexpr int kModelFileVersion = 1;
inline constexpr std::string_view kModelFileFormat = "fairlens-model";

/// What `train` writes: the pipeline plus the context needed to rebuild its inputs.
struct ModelFile {
    Pipeline pipeline;
    std::string protected_name;
    std::uint64_t seed = 0;
};

/// {"format", "version", "checksum", "payload"}; checksum is FNV-1a 64 of payload.dump() in hex.
[[nodiscard]] std::string serialize_model(const ModelFile& file);
/// Throws ModelFormatError on malformed text, unknown format, version mismatch or checksum mismatch.
[[nodiscard]] ModelFile deserialize_model(std::string_view text);

}  // namespace fairlens
