#include "cli.hpp"
#include "fairlens/data.hpp"
#include "fairlens/errors.hpp"
#include "fairlens/metrics.hpp"
#include "fairlens/pipeline.hpp"
#include "fairlens/preprocess.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace fairlens;

namespace {

py::dict metric_dict(const metrics::MetricResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["ci_low"] = r.ci_low;
    d["ci_high"] = r.ci_high;
    return d;
}

FeatureMatrix features(const Eigen::MatrixXd& X, std::vector<std::string> columns) {
    if (columns.empty()) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) columns.push_back("x" + std::to_string(j));
    }
    return {X, std::move(columns)};
}

std::string train(const Eigen::MatrixXd& X, const std::vector<int>& y, const std::vector<int>& s,
                  const std::vector<std::string>& columns, const std::string& condition, const std::string& model,
                  std::uint64_t seed, const std::vector<std::string>& numeric_columns,
                  const std::vector<std::string>& protected_source_columns, double theta, double eta,
                  const std::string& protected_name) {
    PipelineRequest request;
    request.condition = parse_condition(condition);
    request.model.kind = parse_model_kind(model);
    request.method.theta = theta;
    request.method.eta = eta;
    request.numeric_columns = numeric_columns;
    request.protected_source_columns = protected_source_columns;
    request.seed = seed;
    const Dataset data(features(X, columns), BinaryLabels(y), ProtectedAttribute(s, protected_name));
    return serialize_model({fit_pipeline(request, data), protected_name, seed});
}

py::tuple predict(const std::string& model_text, const Eigen::MatrixXd& X, const std::optional<std::vector<int>>& s) {
    const ModelFile file = deserialize_model(model_text);
    const FeatureMatrix F(X, file.pipeline.input_columns());
    std::optional<ProtectedAttribute> attr;
    if (s) attr.emplace(*s, file.protected_name);
    const auto out = file.pipeline.predict(F, attr ? &*attr : nullptr);
    return py::make_tuple(out.labels.values(), out.scores);
}

py::dict german_credit(const std::string& path, const std::string& protected_name, bool standardize) {
    data::check_protected_name(protected_name);
    const auto enc = data::encode(data::load_german_credit(path), protected_name, {.standardize = standardize});
    py::dict d;
    d["X"] = enc.data.X().values();
    d["columns"] = enc.data.X().column_names();
    d["y"] = enc.data.y().values();
    d["s"] = enc.data.s().values();
    d["numeric_columns"] = enc.numeric_columns;
    d["protected_source_columns"] = enc.protected_source_columns;
    return d;
}

py::tuple run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fairlens");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_fairlens, m) {
    m.doc() = "Fairness metrics, fairness-aware estimators and the experiment harness.";

    auto base = py::register_exception<Error>(m, "FairlensError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", base);
    py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base);
    py::register_exception<ParameterError>(m, "ParameterError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base);
    py::register_exception<ShapeError>(m, "ShapeError", base);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<IntegrityError>(m, "IntegrityError", base);
    py::register_exception<ModelFormatError>(m, "ModelFormatError", base);
    py::register_exception<MissingInputError>(m, "MissingInputError", base);

    m.def(
        "mean_difference",
        [](const std::vector<int>& y, const std::vector<int>& s) {
            return metric_dict(metrics::mean_difference(BinaryLabels(y), ProtectedAttribute(s, "s")));
        },
        py::arg("y"), py::arg("s"), "P(y=1 | s=0) - P(y=1 | s=1) with a 95% interval.");
    m.def(
        "normalized_mean_difference",
        [](const std::vector<int>& y, const std::vector<int>& s) {
            return metric_dict(metrics::normalized_mean_difference(BinaryLabels(y), ProtectedAttribute(s, "s")));
        },
        py::arg("y"), py::arg("s"));
    m.def(
        "max_mean_difference",
        [](const std::vector<int>& y, const std::vector<int>& s) {
            return metrics::max_mean_difference(BinaryLabels(y), ProtectedAttribute(s, "s"));
        },
        py::arg("y"), py::arg("s"));
    m.def(
        "auc",
        [](const std::vector<int>& y, const std::vector<double>& scores) {
            return metrics::auc(BinaryLabels(y), std::span<const double>(scores));
        },
        py::arg("y"), py::arg("scores"));
    m.def(
        "consistency",
        [](const Eigen::MatrixXd& X, const std::vector<int>& y, Index k) {
            return metrics::consistency(features(X, {}), BinaryLabels(y), k);
        },
        py::arg("X"), py::arg("y"), py::arg("k") = metrics::kDefaultNeighbors);
    m.def(
        "situation_test_score",
        [](const Eigen::MatrixXd& X, const std::vector<int>& y, const std::vector<int>& s, Index k) {
            return metrics::situation_test_score(features(X, {}), BinaryLabels(y), ProtectedAttribute(s, "s"), k);
        },
        py::arg("X"), py::arg("y"), py::arg("s"), py::arg("k") = metrics::kDefaultNeighbors);
    m.def(
        "pearson_r",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            return metric_dict(metrics::pearson_r_with_ci(x, y));
        },
        py::arg("x"), py::arg("y"));
    m.def(
        "reweigh",
        [](const std::vector<int>& y, const std::vector<int>& s) {
            return preprocess::reweigh(BinaryLabels(y), ProtectedAttribute(s, "s")).values();
        },
        py::arg("y"), py::arg("s"));
    m.def(
        "relabel_count",
        [](const std::vector<int>& y, const std::vector<int>& s) {
            return preprocess::relabel_count(BinaryLabels(y), ProtectedAttribute(s, "s"));
        },
        py::arg("y"), py::arg("s"));
    m.def("load_german_credit", &german_credit, py::arg("path"), py::arg("protected"),
          py::arg("standardize") = false, "Encoded German Credit data as a dict of arrays.");
    m.def("train", &train, py::arg("X"), py::arg("y"), py::arg("s"), py::arg("columns") = std::vector<std::string>{},
          py::arg("condition") = "B", py::arg("model") = "logistic", py::arg("seed") = 0,
          py::arg("numeric_columns") = std::vector<std::string>{},
          py::arg("protected_source_columns") = std::vector<std::string>{}, py::arg("theta") = MethodOptions{}.theta,
          py::arg("eta") = MethodOptions{}.eta, py::arg("protected_name") = "s",
          "Fits one condition and returns the serialized model file.");
    m.def("predict", &predict, py::arg("model"), py::arg("X"), py::arg("s") = py::none(),
          "(labels, scores) from a serialized model file.");
    m.def("run_cli", &run_cli, py::arg("args"), "Runs the command-line front end in process: (exit code, stdout, stderr).");
}
