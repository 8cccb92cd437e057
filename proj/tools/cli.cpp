#include "cli.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/model_selection.hpp"
#include "fairlens/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fairlens::cli {

namespace ms = model_selection;
namespace fs = std::filesystem;

namespace {

struct DatasetArgs {
    std::string path;
    std::string csv_label;      // set: generic CSV instead of german.data
    std::string csv_protected;

    [[nodiscard]] bool generic() const { return !csv_label.empty(); }
};

struct AuditArgs {
    DatasetArgs dataset;
    std::vector<std::string> protected_names = {"female", "foreign_worker", "age_below_25"};
    std::string format = "json";
    std::string output;
    Index neighbors = metrics::kDefaultNeighbors;
};

struct TrainArgs {
    DatasetArgs dataset;
    std::string protected_name;
    std::string condition = "B";
    std::string model = "logistic";
    std::optional<std::uint64_t> seed;
    std::string output;
    std::string export_features;
    std::string export_sensitive;
};

struct PredictArgs {
    std::string model;
    std::string dataset;
    std::string features;
    std::string sensitive;
    std::string format = "csv";
    std::string output;
};

struct ExperimentArgs {
    DatasetArgs dataset;
    std::vector<std::string> protected_names = {"female", "foreign_worker", "age_below_25"};
    std::vector<std::string> conditions = {"B", "RPA", "RTV", "CFM", "ROC"};
    std::vector<std::string> models = {"logistic", "tree", "forest"};
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    bool plot_data = false;
};

struct ReportArgs {
    std::string input;
    std::string output_dir;
    bool plot_data = false;
};

struct HyperArgs {
    double l2 = 1.0;
    int max_iter = 1000;
    Index n_trees = 100;
    int max_depth = -1;
    Index min_samples_leaf = 1;
    double theta = 0.6;
    double eta = 1.0;
    Index daec_members = 5;
    Index folds = 10;
    unsigned jobs = 1;
};

std::string fixed(double v) { return ms::format_fixed(v); }

nlohmann::json rounded(double v) {
    if (std::isnan(v)) return nullptr;
    return std::stod(fixed(v));
}

nlohmann::json metric_json(const std::optional<metrics::MetricResult>& m) {
    if (!m) return nullptr;
    return {{"value", rounded(m->value)}, {"ci_low", rounded(m->ci_low)}, {"ci_high", rounded(m->ci_high)}};
}

nlohmann::json scalar_json(const std::optional<double>& v) { return v ? rounded(*v) : nlohmann::json(nullptr); }

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw MissingInputError("cannot write " + path);
    f << text;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MissingInputError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void add_dataset_options(CLI::App* app, DatasetArgs& args, bool required = true) {
    auto* opt = app->add_option("--dataset", args.path, "german.data file, or a numeric CSV with --csv-label");
    if (required) opt->required();
    app->add_option("--csv-label", args.csv_label, "label column of a generic CSV dataset");
    app->add_option("--csv-protected", args.csv_protected, "protected column of a generic CSV dataset");
}

std::vector<ms::ExperimentInput> load_inputs(const DatasetArgs& args, const std::vector<std::string>& names) {
    std::vector<ms::ExperimentInput> inputs;
    if (args.generic()) {
        if (args.csv_protected.empty()) throw ConfigError("--csv-label needs --csv-protected");
        ms::ExperimentInput in;
        in.data = data::load_csv_dataset(args.path, args.csv_label, args.csv_protected);
        for (Eigen::Index c = 0; c < in.data.X().values().cols(); ++c) {
            const auto col = in.data.X().values().col(c);
            if (!(col.array() == 0.0 || col.array() == 1.0).all()) {
                in.numeric_columns.push_back(in.data.X().column_names()[static_cast<Index>(c)]);
            }
        }
        inputs.push_back(std::move(in));
        return inputs;
    }
    for (const auto& name : names) data::check_protected_name(name);
    const auto records = data::load_german_credit(args.path);
    for (const auto& name : names) inputs.push_back(data::encode(records, name, {.standardize = false}));
    return inputs;
}

std::vector<std::string> protected_selection(const DatasetArgs& args, const std::vector<std::string>& names) {
    if (args.generic()) return {args.csv_protected};
    return names;
}

template <class F>
std::optional<double> guarded(F&& f) {
    try {
        return f();
    } catch (const UndefinedMetricError&) {
        return std::nullopt;
    } catch (const ParameterError&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------- audit

int cmd_audit(const AuditArgs& args, std::ostream& out) {
    const auto names = protected_selection(args.dataset, args.protected_names);
    const auto inputs = load_inputs(args.dataset, names);
    std::vector<AttributeAudit> audits;
    for (const auto& in : inputs) {
        const auto scaler = data::Standardizer::fit(in.data.X(), in.numeric_columns);
        audits.push_back(audit_attribute(in.data.with_features(scaler.transform(in.data.X())), args.neighbors));
    }

    std::string text;
    if (args.format == "csv") {
        std::ostringstream csv;
        csv << "protected,metric,value,ci_low,ci_high\n";
        const auto row = [&](const std::string& p, const char* metric, const std::optional<double>& v,
                             const std::optional<metrics::MetricResult>& ci) {
            csv << p << ',' << metric << ',' << (v ? fixed(*v) : "") << ',' << (ci ? fixed(ci->ci_low) : "") << ','
                << (ci ? fixed(ci->ci_high) : "") << '\n';
        };
        for (const auto& a : audits) {
            const auto value = [](const auto& m) { return m ? std::optional<double>(m->value) : std::nullopt; };
            row(a.protected_name, "mean_difference", value(a.mean_difference), a.mean_difference);
            row(a.protected_name, "normalized_mean_difference", value(a.normalized_mean_difference),
                a.normalized_mean_difference);
            row(a.protected_name, "max_mean_difference", a.max_mean_difference, std::nullopt);
            row(a.protected_name, "consistency", a.consistency, std::nullopt);
            row(a.protected_name, "situation_test_score", a.situation_test_score, std::nullopt);
        }
        text = csv.str();
    } else {
        nlohmann::json doc;
        doc["records"] = inputs.empty() ? 0 : inputs.front().data.size();
        doc["neighbors"] = args.neighbors;
        doc["attributes"] = nlohmann::json::array();
        for (const auto& a : audits) {
            doc["attributes"].push_back({{"protected", a.protected_name},
                                         {"n_disadvantaged", a.n_disadvantaged},
                                         {"n_advantaged", a.n_advantaged},
                                         {"mean_difference", metric_json(a.mean_difference)},
                                         {"normalized_mean_difference", metric_json(a.normalized_mean_difference)},
                                         {"max_mean_difference", scalar_json(a.max_mean_difference)},
                                         {"consistency", scalar_json(a.consistency)},
                                         {"situation_test_score", scalar_json(a.situation_test_score)}});
        }
        text = doc.dump(2) + "\n";
    }
    write_text(args.output, text, out);
    return kOk;
}

// ---------------------------------------------------------------------------- train / predict

ModelSpec spec_from(const std::string& model, const HyperArgs& h) {
    ms::ExperimentConfig cfg;
    cfg.logistic.l2_lambda = h.l2;
    cfg.logistic.max_iter = h.max_iter;
    cfg.tree.max_depth = h.max_depth;
    cfg.tree.min_samples_leaf = h.min_samples_leaf;
    cfg.forest.n_trees = h.n_trees;
    cfg.forest.tree.max_depth = h.max_depth;
    cfg.forest.tree.min_samples_leaf = h.min_samples_leaf;
    return cfg.model_spec(parse_model_kind(model));
}

MethodOptions method_from(const HyperArgs& h) { return {h.theta, h.eta, h.daec_members}; }

std::string matrix_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values) {
    std::ostringstream csv;
    for (Index c = 0; c < header.size(); ++c) csv << (c ? "," : "") << header[c];
    csv << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", values(r, c));
            csv << (c ? "," : "") << buf;
        }
        csv << '\n';
    }
    return csv.str();
}

int cmd_train(const TrainArgs& args, const HyperArgs& h, std::ostream& out) {
    if (!args.seed) throw ConfigError("train needs --seed");
    const std::string name = args.dataset.generic() ? args.dataset.csv_protected : args.protected_name;
    if (name.empty()) throw ConfigError("train needs --protected");
    const auto inputs = load_inputs(args.dataset, {name});
    const auto& in = inputs.front();

    PipelineRequest request;
    request.condition = parse_condition(args.condition);
    request.model = spec_from(args.model, h);
    request.method = method_from(h);
    request.numeric_columns = in.numeric_columns;
    request.protected_source_columns = in.protected_source_columns;
    request.seed = *args.seed;
    const ModelFile file{fit_pipeline(request, in.data), name, *args.seed};
    write_text(args.output, serialize_model(file), out);

    if (!args.export_features.empty()) {
        write_text(args.export_features, matrix_csv(in.data.X().column_names(), in.data.X().values()), out);
    }
    if (!args.export_sensitive.empty()) {
        write_text(args.export_sensitive, matrix_csv({name}, in.data.s().as_vector()), out);
    }
    return kOk;
}

int cmd_predict(const PredictArgs& args, std::ostream& out) {
    const ModelFile file = deserialize_model(read_text(args.model));
    FeatureMatrix X;
    std::optional<ProtectedAttribute> s;
    if (!args.dataset.empty()) {
        if (!args.features.empty()) throw ConfigError("give either --dataset or --features, not both");
        const auto records = data::load_german_credit(args.dataset);
        auto encoded = data::encode(records, file.protected_name, {.standardize = false});
        X = encoded.data.X();
        s = encoded.data.s();
    } else if (!args.features.empty()) {
        const auto table = data::read_numeric_csv(args.features);
        X = FeatureMatrix(table.values, table.header);
        if (!args.sensitive.empty()) {
            const auto st = data::read_numeric_csv(args.sensitive);
            long col = st.column_index(file.protected_name);
            if (col < 0 && st.header.size() == 1) col = 0;
            if (col < 0) throw MissingInputError(args.sensitive + ": no column '" + file.protected_name + "'");
            std::vector<int> values;
            for (Eigen::Index r = 0; r < st.values.rows(); ++r) {
                const double v = st.values(r, col);
                if (v != 0.0 && v != 1.0) {
                    throw ValidationError(args.sensitive + ": protected value must be 0 or 1 at data row " +
                                          std::to_string(r + 1));
                }
                values.push_back(static_cast<int>(v));
            }
            s = ProtectedAttribute(std::move(values), file.protected_name);
        }
    } else {
        throw ConfigError("predict needs --dataset or --features");
    }

    const auto pred = file.pipeline.predict(X, s ? &*s : nullptr);
    std::string text;
    if (args.format == "json") {
        nlohmann::json doc;
        doc["labels"] = pred.labels.values();
        doc["scores"] = nlohmann::json::array();
        for (double p : pred.scores) doc["scores"].push_back(rounded(p));
        text = doc.dump() + "\n";
    } else {
        std::ostringstream csv;
        csv << "row,label,score\n";
        for (Index i = 0; i < pred.scores.size(); ++i) csv << i << ',' << pred.labels[i] << ',' << fixed(pred.scores[i]) << '\n';
        text = csv.str();
    }
    write_text(args.output, text, out);
    return kOk;
}

// ---------------------------------------------------------------------------- experiment / report

std::string means_csv(const ms::ExperimentReport& report) {
    std::ostringstream csv;
    csv << "condition,model,protected,split,folds,auc,mean_difference\n";
    for (const auto& m : report.means()) {
        csv << to_string(m.condition) << ',' << to_string(m.model) << ',' << m.protected_name << ','
            << ms::to_string(m.split) << ',' << m.folds << ',' << fixed(m.auc) << ',' << fixed(m.mean_difference)
            << '\n';
    }
    return csv.str();
}

std::string correlation_csv(const std::vector<ms::CorrelationCell>& cells) {
    std::ostringstream csv;
    csv << "condition,protected,points,r,ci_low,ci_high,note\n";
    for (const auto& c : cells) {
        csv << to_string(c.condition) << ',' << c.protected_name << ',' << c.points << ',';
        if (c.r) {
            csv << fixed(c.r->value) << ',' << fixed(c.r->ci_low) << ',' << fixed(c.r->ci_high) << ",\n";
        } else {
            csv << ",,," << "undefined" << '\n';
        }
    }
    return csv.str();
}

std::string summary_text(const ms::ExperimentReport& report, const std::vector<ms::CorrelationCell>& cells) {
    std::ostringstream s;
    char buf[256];
    s << "per-cell means over folds\n";
    std::snprintf(buf, sizeof buf, "%-5s %-9s %-15s %-5s %5s %10s %16s\n", "cond", "model", "protected", "split",
                  "folds", "auc", "mean_difference");
    s << buf;
    for (const auto& m : report.means()) {
        std::snprintf(buf, sizeof buf, "%-5s %-9s %-15s %-5s %5zu %10s %16s\n", to_string(m.condition).c_str(),
                      to_string(m.model).c_str(), m.protected_name.c_str(), ms::to_string(m.split).c_str(), m.folds,
                      fixed(m.auc).c_str(), fixed(m.mean_difference).c_str());
        s << buf;
    }
    s << "\nfairness-utility correlation, test split (pearson r of auc vs mean_difference)\n";
    std::snprintf(buf, sizeof buf, "%-5s %-15s %6s %10s %10s %10s\n", "cond", "protected", "points", "r", "ci_low",
                  "ci_high");
    s << buf;
    int positive = 0, defined = 0;
    for (const auto& c : cells) {
        if (c.r) {
            ++defined;
            positive += c.r->value > 0 ? 1 : 0;
            std::snprintf(buf, sizeof buf, "%-5s %-15s %6zu %10s %10s %10s\n", to_string(c.condition).c_str(),
                          c.protected_name.c_str(), c.points, fixed(c.r->value).c_str(), fixed(c.r->ci_low).c_str(),
                          fixed(c.r->ci_high).c_str());
        } else {
            std::snprintf(buf, sizeof buf, "%-5s %-15s %6zu %10s (%s)\n", to_string(c.condition).c_str(),
                          c.protected_name.c_str(), c.points, "undefined", c.error.c_str());
        }
        s << buf;
    }
    s << "positive r in " << positive << " of " << defined << " defined cells\n";
    if (!report.failures.empty()) {
        s << "\nfailures (" << report.failures.size() << ")\n";
        for (const auto& f : report.failures) {
            s << to_string(f.condition) << ' ' << to_string(f.model) << ' ' << f.protected_name << " fold " << f.fold
              << ": " << f.message << '\n';
        }
    }
    if (!report.notes.empty()) {
        s << "\nnotes\n";
        for (const auto& n : report.notes) s << n << '\n';
    }
    return s.str();
}

// Summaries use the published six-decimal values so `report` reproduces them from report.csv.
ms::ExperimentReport published(ms::ExperimentReport report) {
    const auto round6 = [](double v) { return std::isnan(v) ? v : std::stod(ms::format_fixed(v)); };
    for (auto& r : report.rows) {
        r.auc = round6(r.auc);
        r.mean_difference = round6(r.mean_difference);
    }
    return report;
}

void write_report_files(const ms::ExperimentReport& full, const std::string& dir, bool plot_data,
                        std::ostream& out) {
    const auto report = published(full);
    const auto cells = ms::fairness_utility_correlation(report);
    if (!dir.empty()) {
        const fs::path d(dir);
        write_text((d / "report.csv").string(), report.to_csv(), out);
        write_text((d / "report.json").string(), report.to_json().dump(1) + "\n", out);
        write_text((d / "means.csv").string(), means_csv(report), out);
        write_text((d / "correlation.csv").string(), correlation_csv(cells), out);
        if (plot_data) write_text((d / "plot_data.csv").string(), report.plot_data_csv(), out);
    } else if (plot_data) {
        throw ConfigError("--emit-plot-data needs --output-dir");
    }
    out << summary_text(report, cells);
}

int cmd_experiment(const ExperimentArgs& args, const HyperArgs& h, std::ostream& out) {
    if (!args.seed) throw ConfigError("experiment needs --seed");
    ms::ExperimentConfig cfg;
    cfg.conditions.clear();
    for (const auto& c : args.conditions) cfg.conditions.push_back(parse_condition(c));
    cfg.model_types.clear();
    for (const auto& m : args.models) cfg.model_types.push_back(parse_model_kind(m));
    cfg.protected_names = protected_selection(args.dataset, args.protected_names);
    cfg.folds = h.folds;
    cfg.seed = *args.seed;
    const ModelSpec any = spec_from("logistic", h);
    cfg.logistic = any.logistic;
    cfg.tree = any.tree;
    cfg.forest = any.forest;
    cfg.method = method_from(h);
    cfg.jobs = h.jobs;
    cfg.validate();

    const auto inputs = load_inputs(args.dataset, cfg.protected_names);
    const auto report = ms::run_experiment(inputs, cfg);
    write_report_files(report, args.output_dir, args.plot_data, out);
    return report.rows.empty() ? kDataError : kOk;
}

int cmd_report(const ReportArgs& args, std::ostream& out) {
    const std::string text = read_text(args.input);
    ms::ExperimentReport report;
    if (fs::path(args.input).extension() == ".json") {
        try {
            report = ms::ExperimentReport::from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(args.input + ": " + e.what());
        }
    } else {
        report = ms::ExperimentReport::from_csv(text);
    }
    write_report_files(report, args.output_dir, args.plot_data, out);
    return kOk;
}

void add_hyper_options(CLI::App* app, HyperArgs& h, bool experiment) {
    app->add_option("--l2", h.l2, "logistic L2 strength (lambda)")->check(CLI::NonNegativeNumber);
    app->add_option("--max-iter", h.max_iter, "logistic iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--trees", h.n_trees, "forest size")->check(CLI::PositiveNumber);
    app->add_option("--max-depth", h.max_depth, "tree depth limit (-1 = none)");
    app->add_option("--min-samples-leaf", h.min_samples_leaf, "tree leaf size")->check(CLI::PositiveNumber);
    app->add_option("--theta", h.theta, "reject-option critical threshold in (0.5, 1)");
    app->add_option("--eta", h.eta, "prejudice remover strength")->check(CLI::NonNegativeNumber);
    app->add_option("--daec-members", h.daec_members, "ensemble size")->check(CLI::PositiveNumber);
    if (experiment) {
        app->add_option("--folds", h.folds, "cross-validation folds");
        app->add_option("--jobs", h.jobs, "worker threads")->check(CLI::PositiveNumber);
    }
}

int classify(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e)) return kUsage;
    if (dynamic_cast<const Error*>(&e)) return kDataError;
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return kDataError;
    return kInternal;
}

}  // namespace

AttributeAudit audit_attribute(const Dataset& data, Index neighbors) {
    AttributeAudit a;
    a.protected_name = data.s().name();
    a.n_disadvantaged = data.s().count_disadvantaged();
    a.n_advantaged = data.size() - a.n_disadvantaged;
    const auto result = [](auto&& f) -> std::optional<metrics::MetricResult> {
        try {
            return f();
        } catch (const UndefinedMetricError&) {
            return std::nullopt;
        }
    };
    a.mean_difference = result([&] { return metrics::mean_difference(data.y(), data.s()); });
    a.normalized_mean_difference = result([&] { return metrics::normalized_mean_difference(data.y(), data.s()); });
    a.max_mean_difference = guarded([&] { return metrics::max_mean_difference(data.y(), data.s()); });
    a.consistency = guarded([&] { return metrics::consistency(data.X(), data.y(), neighbors); });
    a.situation_test_score = guarded([&] { return metrics::situation_test_score(data.X(), data.y(), data.s(), neighbors); });
    return a;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"fairlens: fairness auditing and fairness-aware classification"};
    app.set_config("--config", "", "key = value file mirroring the flags ([subcommand] sections)");
    app.require_subcommand(1);

    AuditArgs audit;
    auto* audit_cmd = app.add_subcommand("audit", "group discrimination metrics for a dataset");
    add_dataset_options(audit_cmd, audit.dataset);
    audit_cmd->add_option("--protected", audit.protected_names, "protected attributes")->delimiter(',');
    audit_cmd->add_option("--format", audit.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    audit_cmd->add_option("--output", audit.output, "output file (default stdout)");
    audit_cmd->add_option("--neighbors", audit.neighbors, "k for consistency and situation testing")
        ->check(CLI::PositiveNumber);

    HyperArgs hyper;
    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "fit one method on a whole dataset and save it");
    add_dataset_options(train_cmd, train.dataset);
    train_cmd->add_option("--protected", train.protected_name, "protected attribute");
    train_cmd->add_option("--condition", train.condition, "B, RPA, RTV, CFM, ROC, RW, US, PS, PRR or DAEC");
    train_cmd->add_option("--model", train.model, "logistic, tree or forest");
    train_cmd->add_option("--seed", train.seed, "random seed")->required();
    train_cmd->add_option("--output", train.output, "model file")->required();
    train_cmd->add_option("--export-features", train.export_features, "also write the encoded feature CSV");
    train_cmd->add_option("--export-sensitive", train.export_sensitive, "also write the protected attribute CSV");
    add_hyper_options(train_cmd, hyper, false);

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "labels and scores from a saved model");
    predict_cmd->add_option("--model", predict.model, "model file")->required();
    predict_cmd->add_option("--dataset", predict.dataset, "german.data file");
    predict_cmd->add_option("--features", predict.features, "encoded feature CSV with the training columns");
    predict_cmd->add_option("--sensitive", predict.sensitive, "protected attribute CSV");
    predict_cmd->add_option("--format", predict.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    predict_cmd->add_option("--output", predict.output, "output file (default stdout)");

    ExperimentArgs experiment;
    auto* experiment_cmd = app.add_subcommand("experiment", "cross-validated grid of conditions and models");
    add_dataset_options(experiment_cmd, experiment.dataset);
    experiment_cmd->add_option("--protected", experiment.protected_names, "protected attributes")->delimiter(',');
    experiment_cmd->add_option("--conditions", experiment.conditions, "conditions")->delimiter(',');
    experiment_cmd->add_option("--models", experiment.models, "model types")->delimiter(',');
    experiment_cmd->add_option("--seed", experiment.seed, "random seed")->required();
    experiment_cmd->add_option("--output-dir", experiment.output_dir, "directory for report files");
    experiment_cmd->add_flag("--emit-plot-data", experiment.plot_data, "also write long-format plot_data.csv");
    add_hyper_options(experiment_cmd, hyper, true);

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "summary tables recomputed from a report file");
    report_cmd->add_option("--input", report.input, "report.csv or report.json")->required();
    report_cmd->add_option("--output-dir", report.output_dir, "directory for recomputed files");
    report_cmd->add_flag("--emit-plot-data", report.plot_data, "also write long-format plot_data.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*audit_cmd) return cmd_audit(audit, out);
        if (*train_cmd) return cmd_train(train, hyper, out);
        if (*predict_cmd) return cmd_predict(predict, out);
        if (*experiment_cmd) return cmd_experiment(experiment, hyper, out);
        if (*report_cmd) return cmd_report(report, out);
    } catch (const std::exception& e) {
        return classify(e, err);
    }
    return kUsage;
}

}  // namespace fairlens::cli
