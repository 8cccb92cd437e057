#include "fairlens/model_selection.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace fairlens::model_selection {

namespace {

ReportRow score(Condition c, ModelKind m, const std::string& name, Index fold, Split split, const Dataset& d,
                const PipelineOutput& p) {
    ReportRow row{c, m, name, fold, split, 0.0, 0.0};
    row.auc = metrics::auc(d.y(), p.scores);
    row.mean_difference = metrics::mean_difference(p.labels, d.s()).value;
    return row;
}

std::uint64_t fold_seed(const ExperimentConfig& config, const std::string& protected_name, ModelKind model,
                        Index fold) {
    std::uint64_t seed = mix_seed(config.seed, stable_hash(protected_name));
    seed = mix_seed(seed, static_cast<std::uint64_t>(model) + 1);
    return mix_seed(seed, fold + 1);
}

std::uint64_t split_seed(const ExperimentConfig& config, const std::string& protected_name) {
    return mix_seed(config.seed, stable_hash(protected_name) ^ 0x5151ULL);
}

// Runs every requested condition for one (input, model, fold) unit. B and ROC share
// one fitted base model.
void run_unit(const std::vector<Condition>& conditions, ModelKind model, const ExperimentInput& input,
              const FoldPlan& plan, Index fold, const ExperimentConfig& config, ExperimentReport& out) {
    const std::string& name = input.data.s().name();
    const Dataset train = input.data.subset(plan.folds[fold].train);
    const Dataset test = input.data.subset(plan.folds[fold].test);
    PipelineRequest request;
    request.model = config.model_spec(model);
    request.method = config.method;
    request.numeric_columns = input.numeric_columns;
    request.protected_source_columns = input.protected_source_columns;
    request.seed = fold_seed(config, name, model, fold);
    ClassifierPtr base;
    for (Condition c : conditions) {
        try {
            request.condition = c;
            const Pipeline pipeline = fit_pipeline(request, train, &base);
            ReportRow tr = score(c, model, name, fold, Split::Train, train, pipeline.predict(train.X(), &train.s()));
            ReportRow te = score(c, model, name, fold, Split::Test, test, pipeline.predict(test.X(), &test.s()));
            out.rows.push_back(std::move(tr));
            out.rows.push_back(std::move(te));
        } catch (const Error& e) {
            out.failures.push_back({c, model, name, fold, e.what()});
        }
    }
}

template <class T>
Index position_of(const std::vector<T>& order, const T& value) {
    return static_cast<Index>(std::find(order.begin(), order.end(), value) - order.begin());
}

}  // namespace

std::vector<Condition> default_conditions() {
    return {Condition::B, Condition::RPA, Condition::RTV, Condition::CFM, Condition::ROC};
}

std::string to_string(Split s) { return s == Split::Train ? "train" : "test"; }

void ExperimentConfig::validate() const {
    if (conditions.empty()) throw ConfigError("experiment needs at least one condition");
    if (model_types.empty()) throw ConfigError("experiment needs at least one model type");
    if (protected_names.empty()) throw ConfigError("experiment needs at least one protected attribute");
    if (folds < 2) throw ParameterError("folds must be at least 2, got " + std::to_string(folds));
    if (!(method.theta > 0.5 && method.theta < 1.0)) throw ConfigError("theta must lie in (0.5, 1)");
    if (!(method.eta >= 0.0) || !std::isfinite(method.eta)) throw ConfigError("eta must be a finite non-negative number");
    if (method.daec_members < 1) throw ConfigError("ensemble needs at least one member");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    const auto unique = [](auto v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (!unique(conditions) || !unique(model_types) || !unique(protected_names)) {
        throw ConfigError("experiment selections must not repeat");
    }
    bool any = false;
    for (Condition c : conditions) {
        for (ModelKind m : model_types) any = any || compatible(c, m);
    }
    if (!any) throw ConfigError("no compatible (condition, model) pair selected");
}

ModelSpec ExperimentConfig::model_spec(ModelKind kind) const {
    ModelSpec spec;
    spec.kind = kind;
    spec.logistic = logistic;
    spec.tree = tree;
    spec.forest = forest;
    return spec;
}

FoldPlan stratified_kfold(const BinaryLabels& y, const ProtectedAttribute& s, Index k, std::uint64_t seed) {
    const Index n = y.size();
    if (s.size() != n) throw ValidationError("stratified_kfold: y and s differ in length");
    if (k < 2 || k > n) {
        throw ParameterError("fold count must satisfy 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) +
                             ")");
    }
    const auto parts = partition_groups(y, s);
    FoldPlan plan;
    std::vector<IndexList> cells;
    for (int g = 0; g < 2; ++g) {
        for (int l = 0; l < 2; ++l) {
            if (parts.cell(g, l).size() < k) plan.stratified_on_s = false;
        }
    }
    if (plan.stratified_on_s) {
        for (int g = 0; g < 2; ++g) {
            for (int l = 0; l < 2; ++l) cells.push_back(parts.cell(g, l));
        }
    } else {
        for (int l = 0; l < 2; ++l) {
            IndexList cell = parts.cell(0, l);
            cell.insert(cell.end(), parts.cell(1, l).begin(), parts.cell(1, l).end());
            std::sort(cell.begin(), cell.end());
            cells.push_back(std::move(cell));
        }
    }

    Rng rng(seed);
    std::vector<Index> fold_of(n);
    Index dealt = 0;
    for (auto& cell : cells) {
        rng.shuffle(std::span<Index>(cell));
        for (Index i : cell) fold_of[i] = dealt++ % k;
    }
    plan.folds.resize(k);
    for (Index i = 0; i < n; ++i) {
        for (Index f = 0; f < k; ++f) {
            (fold_of[i] == f ? plan.folds[f].test : plan.folds[f].train).push_back(i);
        }
    }
    return plan;
}

ExperimentReport run_condition(Condition condition, ModelKind model, const ExperimentInput& input,
                               const FoldPlan& folds, const ExperimentConfig& config) {
    ExperimentReport out;
    if (!compatible(condition, model)) {
        throw ConfigError("condition " + to_string(condition) + " has no recipe for model " + to_string(model));
    }
    for (Index f = 0; f < folds.folds.size(); ++f) run_unit({condition}, model, input, folds, f, config, out);
    return out;
}

ExperimentReport run_experiment(const std::vector<ExperimentInput>& inputs, const ExperimentConfig& config) {
    config.validate();
    std::vector<const ExperimentInput*> selected;
    for (const auto& name : config.protected_names) {
        const auto it = std::find_if(inputs.begin(), inputs.end(),
                                     [&](const ExperimentInput& in) { return in.data.s().name() == name; });
        if (it == inputs.end()) throw ConfigError("no input encoded for protected attribute '" + name + "'");
        selected.push_back(&*it);
    }

    ExperimentReport report;
    std::vector<FoldPlan> plans;
    for (const auto* input : selected) {
        const auto& name = input->data.s().name();
        plans.push_back(stratified_kfold(input->data.y(), input->data.s(), config.folds, split_seed(config, name)));
        if (!plans.back().stratified_on_s) {
            report.notes.push_back("folds for " + name + " stratified on y only: a (y, s) cell has fewer than " +
                                   std::to_string(config.folds) + " rows");
        }
    }
    for (Condition c : config.conditions) {
        for (ModelKind m : config.model_types) {
            if (!compatible(c, m)) {
                report.notes.push_back("skipped " + to_string(c) + " with " + to_string(m) + ": no recipe");
            }
        }
    }

    struct Unit {
        Index input;
        ModelKind model;
        Index fold;
    };
    std::vector<Unit> units;
    for (Index p = 0; p < selected.size(); ++p) {
        for (ModelKind m : config.model_types) {
            for (Index f = 0; f < config.folds; ++f) units.push_back({p, m, f});
        }
    }
    std::vector<ExperimentReport> partial(units.size());
    std::atomic<Index> next{0};
    std::mutex internal_error_mutex;
    std::optional<std::string> internal_error;
    const auto worker = [&] {
        for (Index u = next++; u < units.size(); u = next++) {
            const auto& unit = units[u];
            std::vector<Condition> conditions;
            for (Condition c : config.conditions) {
                if (compatible(c, unit.model)) conditions.push_back(c);
            }
            try {
                run_unit(conditions, unit.model, *selected[unit.input], plans[unit.input], unit.fold, config,
                         partial[u]);
            } catch (const std::exception& e) {
                const std::lock_guard lock(internal_error_mutex);
                if (!internal_error) internal_error = e.what();
            }
        }
    };
    const unsigned n_threads = std::min<unsigned>(config.jobs, static_cast<unsigned>(units.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (internal_error) throw std::runtime_error(*internal_error);

    for (auto& part : partial) {
        std::move(part.rows.begin(), part.rows.end(), std::back_inserter(report.rows));
        std::move(part.failures.begin(), part.failures.end(), std::back_inserter(report.failures));
    }
    const auto key = [&](Condition c, ModelKind m, const std::string& name, Index fold) {
        return std::make_tuple(position_of(config.conditions, c), position_of(config.model_types, m),
                               position_of(config.protected_names, name), fold);
    };
    std::sort(report.rows.begin(), report.rows.end(), [&](const ReportRow& a, const ReportRow& b) {
        return std::tuple_cat(key(a.condition, a.model, a.protected_name, a.fold), std::make_tuple(a.split)) <
               std::tuple_cat(key(b.condition, b.model, b.protected_name, b.fold), std::make_tuple(b.split));
    });
    std::sort(report.failures.begin(), report.failures.end(), [&](const FoldFailure& a, const FoldFailure& b) {
        return key(a.condition, a.model, a.protected_name, a.fold) < key(b.condition, b.model, b.protected_name, b.fold);
    });
    return report;
}

std::vector<CellMean> ExperimentReport::means() const {
    std::vector<CellMean> out;
    std::map<std::tuple<Condition, ModelKind, std::string, Split>, Index> slot;
    for (const auto& row : rows) {
        const auto k = std::make_tuple(row.condition, row.model, row.protected_name, row.split);
        auto it = slot.find(k);
        if (it == slot.end()) {
            it = slot.emplace(k, out.size()).first;
            out.push_back({row.condition, row.model, row.protected_name, row.split, 0.0, 0.0, 0});
        }
        auto& cell = out[it->second];
        cell.auc += row.auc;
        cell.mean_difference += row.mean_difference;
        ++cell.folds;
    }
    for (auto& cell : out) {
        cell.auc /= static_cast<double>(cell.folds);
        cell.mean_difference /= static_cast<double>(cell.folds);
    }
    return out;
}

std::string format_fixed(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    // Avoid "-0.000000" so tiny negative noise cannot change bytes between equivalent runs.
    if (std::string_view(buf) == "-0.000000") return "0.000000";
    return buf;
}

std::uint64_t stable_hash(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream out;
    out << "condition,model,protected,fold,split,auc,mean_difference\n";
    for (const auto& r : rows) {
        out << to_string(r.condition) << ',' << to_string(r.model) << ',' << r.protected_name << ',' << r.fold << ','
            << to_string(r.split) << ',' << format_fixed(r.auc) << ',' << format_fixed(r.mean_difference) << '\n';
    }
    return out.str();
}

nlohmann::json ExperimentReport::to_json() const {
    const auto rounded = [](double v) -> nlohmann::json {
        if (std::isnan(v)) return nullptr;
        return std::stod(format_fixed(v));
    };
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"condition", to_string(r.condition)},
                             {"model", to_string(r.model)},
                             {"protected", r.protected_name},
                             {"fold", r.fold},
                             {"split", to_string(r.split)},
                             {"auc", rounded(r.auc)},
                             {"mean_difference", rounded(r.mean_difference)}});
    }
    j["failures"] = nlohmann::json::array();
    for (const auto& f : failures) {
        j["failures"].push_back({{"condition", to_string(f.condition)},
                                 {"model", to_string(f.model)},
                                 {"protected", f.protected_name},
                                 {"fold", f.fold},
                                 {"message", f.message}});
    }
    j["notes"] = notes;
    return j;
}

std::string ExperimentReport::plot_data_csv() const {
    std::ostringstream out;
    out << "condition,model,protected,fold,split,metric,value\n";
    for (const auto& r : rows) {
        const std::string prefix = to_string(r.condition) + ',' + to_string(r.model) + ',' + r.protected_name + ',' +
                                   std::to_string(r.fold) + ',' + to_string(r.split) + ',';
        out << prefix << "auc," << format_fixed(r.auc) << '\n';
        out << prefix << "mean_difference," << format_fixed(r.mean_difference) << '\n';
    }
    return out.str();
}

namespace {

Split parse_split(const std::string& text) {
    if (text == "train") return Split::Train;
    if (text == "test") return Split::Test;
    throw ConfigError("unknown split '" + text + "'");
}

double parse_metric(const std::string& text) {
    if (text == "nan") return std::nan("");
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
}

}  // namespace

ExperimentReport ExperimentReport::from_csv(std::string_view text) {
    ExperimentReport report;
    std::istringstream in{std::string(text)};
    std::string line;
    Index line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_number == 1) {
            if (line != "condition,model,protected,fold,split,auc,mean_difference") {
                throw ParseError("report CSV line 1: unexpected header");
            }
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream fields(line);
        for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
        if (cells.size() != 7) throw ParseError("report CSV line " + std::to_string(line_number) + ": expected 7 fields");
        try {
            ReportRow row;
            row.condition = parse_condition(cells[0]);
            row.model = parse_model_kind(cells[1]);
            row.protected_name = cells[2];
            row.fold = static_cast<Index>(std::stoul(cells[3]));
            row.split = parse_split(cells[4]);
            row.auc = parse_metric(cells[5]);
            row.mean_difference = parse_metric(cells[6]);
            report.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            throw ParseError("report CSV line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    if (line_number == 0) throw ParseError("report CSV is empty");
    return report;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
    ExperimentReport report;
    const auto metric = [](const nlohmann::json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
    try {
        for (const auto& r : j.at("rows")) {
            report.rows.push_back({parse_condition(r.at("condition").get<std::string>()),
                                   parse_model_kind(r.at("model").get<std::string>()),
                                   r.at("protected").get<std::string>(), r.at("fold").get<Index>(),
                                   parse_split(r.at("split").get<std::string>()), metric(r.at("auc")),
                                   metric(r.at("mean_difference"))});
        }
        for (const auto& f : j.value("failures", nlohmann::json::array())) {
            report.failures.push_back({parse_condition(f.at("condition").get<std::string>()),
                                       parse_model_kind(f.at("model").get<std::string>()),
                                       f.at("protected").get<std::string>(), f.at("fold").get<Index>(),
                                       f.at("message").get<std::string>()});
        }
        report.notes = j.value("notes", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(std::string("malformed report JSON: ") + e.what());
    }
    return report;
}

std::vector<CorrelationCell> fairness_utility_correlation(const ExperimentReport& report) {
    std::vector<CorrelationCell> cells;
    std::map<std::pair<Condition, std::string>, Index> slot;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> points;
    for (const auto& row : report.rows) {
        if (row.split != Split::Test) continue;
        const auto k = std::make_pair(row.condition, row.protected_name);
        auto it = slot.find(k);
        if (it == slot.end()) {
            it = slot.emplace(k, cells.size()).first;
            cells.push_back({row.condition, row.protected_name, 0, std::nullopt, {}});
            points.emplace_back();
        }
        points[it->second].first.push_back(row.auc);
        points[it->second].second.push_back(row.mean_difference);
    }
    for (Index c = 0; c < cells.size(); ++c) {
        cells[c].points = points[c].first.size();
        try {
            cells[c].r = metrics::pearson_r_with_ci(points[c].first, points[c].second);
        } catch (const Error& e) {
            cells[c].error = e.what();
        }
    }
    return cells;
}

}  // namespace fairlens::model_selection
