#include "fairlens/pipeline.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/linear_model.hpp"
#include "fairlens/postprocess.hpp"
#include "fairlens/preprocess.hpp"
#include "fairlens/rng.hpp"

#include <array>
#include <cstdio>

namespace fairlens {

namespace {

constexpr std::array<Condition, 10> kAllConditions = {Condition::B,  Condition::RPA, Condition::RTV, Condition::CFM,
                                                      Condition::ROC, Condition::RW,  Condition::US,  Condition::PS,
                                                      Condition::PRR, Condition::DAEC};

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

PipelineOutput from_classifier(const Classifier& model, const FeatureMatrix& X) {
    const Eigen::VectorXd p = model.predict_proba(X.values());
    PipelineOutput out;
    out.scores.assign(p.data(), p.data() + p.size());
    std::vector<int> labels(out.scores.size());
    for (Index i = 0; i < labels.size(); ++i) labels[i] = out.scores[i] >= 0.5 ? 1 : 0;
    out.labels = BinaryLabels(std::move(labels));
    return out;
}

PipelineOutput from_postprocessed(postprocess::PostprocessedPrediction p) {
    return {std::move(p.labels), p.scores.values()};
}

nlohmann::json scaler_json(const data::Standardizer& s) {
    return {{"columns", s.columns()}, {"means", s.means()}, {"scales", s.scales()}};
}

ModelSpec ranker_for(const ModelSpec& model) {
    ModelSpec r;
    r.logistic = model.logistic;
    return r;
}

}  // namespace

std::string to_string(Condition c) {
    switch (c) {
        case Condition::B: return "B";
        case Condition::RPA: return "RPA";
        case Condition::RTV: return "RTV";
        case Condition::CFM: return "CFM";
        case Condition::ROC: return "ROC";
        case Condition::RW: return "RW";
        case Condition::US: return "US";
        case Condition::PS: return "PS";
        case Condition::PRR: return "PRR";
        case Condition::DAEC: return "DAEC";
    }
    return "?";
}

Condition parse_condition(const std::string& name) {
    for (Condition c : kAllConditions) {
        if (to_string(c) == name) return c;
    }
    throw ConfigError("unknown condition '" + name + "' (expected B, RPA, RTV, CFM, ROC, RW, US, PS, PRR or DAEC)");
}

bool compatible(Condition c, ModelKind m) noexcept { return c != Condition::PRR || m == ModelKind::Logistic; }

bool needs_protected(Condition c) noexcept {
    return c == Condition::CFM || c == Condition::ROC || c == Condition::DAEC;
}

Pipeline::Pipeline(Condition condition, ModelKind model, std::vector<std::string> input_columns,
                   data::Standardizer scaler, std::vector<std::string> dropped, Predictor predictor)
    : condition_(condition),
      model_(model),
      input_columns_(std::move(input_columns)),
      scaler_(std::move(scaler)),
      dropped_(std::move(dropped)),
      predictor_(std::move(predictor)) {}

PipelineOutput Pipeline::predict(const FeatureMatrix& X, const ProtectedAttribute* s) const {
    if (X.column_names() != input_columns_) {
        throw ShapeError("feature columns do not match the model's training columns (expected " +
                         std::to_string(input_columns_.size()) + " named columns, got " + std::to_string(X.cols()) +
                         ")");
    }
    if (needs_protected() && s == nullptr) {
        throw MissingInputError("condition " + to_string(condition_) + " needs the protected attribute at prediction time");
    }
    if (s != nullptr && s->size() != X.rows()) throw ValidationError("X and s differ in length");
    const FeatureMatrix Z = scaler_.transform(X).drop_columns(dropped_);
    return std::visit(Overloaded{
                          [&](const ClassifierPtr& m) { return from_classifier(*m, Z); },
                          [&](const LinearACFModel& m) {
                              auto p = predict_acf(m, Z, *s);
                              return PipelineOutput{std::move(p.labels), p.scores.values()};
                          },
                          [&](const Roc& r) {
                              const postprocess::RejectOptionConfig cfg(r.theta, {r.estimator});
                              return from_postprocessed(postprocess::roc_predict(cfg, Z, *s));
                          },
                          [&](const Ensemble& e) {
                              return from_postprocessed(postprocess::daec_predict(e.members, Z, *s));
                          },
                      },
                      predictor_);
}

nlohmann::json Pipeline::to_json() const {
    nlohmann::json predictor = std::visit(
        Overloaded{
            [](const ClassifierPtr& m) { return nlohmann::json{{"type", "classifier"}, {"model", m->to_json()}}; },
            [](const LinearACFModel& m) { return nlohmann::json{{"type", "acf"}, {"model", m.to_json()}}; },
            [](const Roc& r) {
                return nlohmann::json{{"type", "roc"}, {"theta", r.theta}, {"estimator", r.estimator->to_json()}};
            },
            [](const Ensemble& e) {
                nlohmann::json members = nlohmann::json::array();
                for (const auto& m : e.members) members.push_back(m->to_json());
                return nlohmann::json{{"type", "ensemble"}, {"members", std::move(members)}};
            },
        },
        predictor_);
    return {{"condition", to_string(condition_)},
            {"model", to_string(model_)},
            {"input_columns", input_columns_},
            {"scaler", scaler_json(scaler_)},
            {"dropped", dropped_},
            {"predictor", std::move(predictor)}};
}

Pipeline Pipeline::from_json(const nlohmann::json& j) {
    try {
        const auto& p = j.at("predictor");
        const auto type = p.at("type").get<std::string>();
        Predictor predictor;
        if (type == "classifier") {
            predictor = classifier_from_json(p.at("model"));
        } else if (type == "acf") {
            predictor = LinearACFModel::from_json(p.at("model"));
        } else if (type == "roc") {
            predictor = Roc{p.at("theta").get<double>(), classifier_from_json(p.at("estimator"))};
        } else if (type == "ensemble") {
            Ensemble e;
            for (const auto& m : p.at("members")) e.members.push_back(classifier_from_json(m));
            predictor = std::move(e);
        } else {
            throw ModelFormatError("unknown predictor type '" + type + "'");
        }
        const auto& sc = j.at("scaler");
        data::Standardizer scaler(sc.at("columns").get<std::vector<std::string>>(),
                                  sc.at("means").get<std::vector<double>>(), sc.at("scales").get<std::vector<double>>());
        return {parse_condition(j.at("condition").get<std::string>()),
                parse_model_kind(j.at("model").get<std::string>()),
                j.at("input_columns").get<std::vector<std::string>>(),
                std::move(scaler),
                j.at("dropped").get<std::vector<std::string>>(),
                std::move(predictor)};
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed pipeline record: ") + e.what());
    } catch (const ConfigError& e) {
        throw ModelFormatError(std::string("malformed pipeline record: ") + e.what());
    } catch (const ValidationError& e) {
        throw ModelFormatError(std::string("malformed pipeline record: ") + e.what());
    }
}

Pipeline fit_pipeline(const PipelineRequest& request, const Dataset& train, ClassifierPtr* base) {
    const Condition condition = request.condition;
    const ModelSpec& spec = request.model;
    if (!compatible(condition, spec.kind)) {
        throw ConfigError("condition " + to_string(condition) + " has no recipe for model " + to_string(spec.kind));
    }
    const std::uint64_t seed = request.seed;
    auto scaler = data::Standardizer::fit(train.X(), request.numeric_columns);
    const Dataset tr = train.with_features(scaler.transform(train.X()));
    std::vector<std::string> dropped;
    const auto make = [&](Pipeline::Predictor p) {
        return Pipeline(condition, spec.kind, train.X().column_names(), scaler, dropped, std::move(p));
    };
    const auto plain_model = [&]() -> ClassifierPtr {
        if (base != nullptr && *base) return *base;
        auto m = spec.fit(tr.X(), tr.y(), nullptr, seed);
        if (base != nullptr) *base = m;
        return m;
    };

    switch (condition) {
        case Condition::B: return make(plain_model());
        case Condition::RPA: {
            for (const auto& name : request.protected_source_columns) {
                if (tr.X().column_index(name) >= 0) dropped.push_back(name);
            }
            const FeatureMatrix X = tr.X().drop_columns(dropped);
            return make(spec.fit(X, tr.y(), nullptr, seed));
        }
        case Condition::RTV: {
            const auto relabelled = preprocess::relabel(tr, ranker_for(spec), seed);
            return make(spec.fit(tr.X(), relabelled.labels, nullptr, seed));
        }
        case Condition::CFM: return make(fit_linear_acf(tr.X(), tr.y(), tr.s(), {}, spec, seed));
        case Condition::ROC: {
            if (!(request.method.theta > 0.5 && request.method.theta < 1.0)) {
                throw ConfigError("reject-option theta must lie in (0.5, 1)");
            }
            return make(Pipeline::Roc{request.method.theta, plain_model()});
        }
        case Condition::RW: {
            const auto w = preprocess::reweigh(tr.y(), tr.s());
            return make(spec.fit(tr.X(), tr.y(), &w, seed));
        }
        case Condition::US: {
            const Dataset sample = preprocess::uniform_sample(tr, seed);
            return make(spec.fit(sample.X(), sample.y(), nullptr, seed));
        }
        case Condition::PS: {
            const Dataset sample = preprocess::preferential_sample(tr, ranker_for(spec), seed);
            return make(spec.fit(sample.X(), sample.y(), nullptr, seed));
        }
        case Condition::PRR: {
            PrejudiceRemoverOptions opts;
            opts.eta = request.method.eta;
            opts.logistic = spec.logistic;
            return make(ClassifierPtr(fit_prejudice_remover(tr.X(), tr.y(), tr.s(), opts)));
        }
        case Condition::DAEC: {
            if (request.method.daec_members < 1) throw ConfigError("ensemble needs at least one member");
            Pipeline::Ensemble e;
            for (Index k = 0; k < request.method.daec_members; ++k) {
                const std::uint64_t member_seed = mix_seed(seed, 0xDAEC0000ULL + k);
                Rng rng(member_seed);
                IndexList rows(tr.size());
                for (auto& r : rows) r = rng.uniform_index(tr.size());
                const Dataset boot = tr.subset(rows);
                e.members.push_back(spec.fit(boot.X(), boot.y(), nullptr, member_seed));
            }
            return make(std::move(e));
        }
    }
    throw ConfigError("unhandled condition");
}

namespace {

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
    const nlohmann::json payload = {{"pipeline", file.pipeline.to_json()},
                                    {"protected", file.protected_name},
                                    {"seed", file.seed}};
    const nlohmann::json doc = {{"format", kModelFileFormat},
                                {"version", kModelFileVersion},
                                {"checksum", fnv1a_hex(payload.dump())},
                                {"payload", payload}};
    return doc.dump(1) + "\n";
}

ModelFile deserialize_model(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object() || doc.value("format", std::string{}) != kModelFileFormat) {
            throw ModelFormatError("not a fairlens model file");
        }
        const int version = doc.at("version").get<int>();
        if (version != kModelFileVersion) {
            throw ModelFormatError("model file version " + std::to_string(version) + " is not supported (expected " +
                                   std::to_string(kModelFileVersion) + ")");
        }
        const auto& payload = doc.at("payload");
        if (doc.at("checksum").get<std::string>() != fnv1a_hex(payload.dump())) {
            throw ModelFormatError("model file checksum mismatch: the payload was modified");
        }
        return {Pipeline::from_json(payload.at("pipeline")), payload.at("protected").get<std::string>(),
                payload.at("seed").get<std::uint64_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("malformed model file: ") + e.what());
    }
}

}  // namespace fairlens
