#include "fairlens/errors.hpp"
#include "fairlens/pipeline.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

using namespace fairlens;

namespace {

struct Fixture {
    Dataset data;
    PipelineRequest request;
};

Fixture fixture(Condition c, ModelKind m = ModelKind::Logistic) {
    Rng rng(21);
    const Dataset base = gen::biased_dataset(rng, 120, 3, 1.0);
    Fixture f;
    f.data = Dataset(base.X().append_column("src", base.s().as_vector()), base.y(), base.s());
    f.request.condition = c;
    f.request.model.kind = m;
    f.request.model.tree.max_depth = 4;
    f.request.model.forest.n_trees = 5;
    f.request.numeric_columns = {"x0", "x1"};
    f.request.protected_source_columns = {"src"};
    f.request.seed = 5;
    return f;
}

const std::vector<Condition> kAll = {Condition::B,  Condition::RPA, Condition::RTV, Condition::CFM, Condition::ROC,
                                     Condition::RW, Condition::US,  Condition::PS,  Condition::PRR, Condition::DAEC};

}  // namespace

TEST(Condition, NamesRoundTrip) {
    for (const Condition c : kAll) EXPECT_EQ(parse_condition(to_string(c)), c);
    EXPECT_THROW((void)parse_condition("XYZ"), ConfigError);
    EXPECT_FALSE(compatible(Condition::PRR, ModelKind::Tree));
    EXPECT_TRUE(compatible(Condition::CFM, ModelKind::Forest));
    EXPECT_TRUE(needs_protected(Condition::ROC));
    EXPECT_FALSE(needs_protected(Condition::RPA));
}

TEST(Pipeline, EveryConditionSerializesAndPredictsIdentically) {
    for (const Condition c : kAll) {
        for (const ModelKind m : {ModelKind::Logistic, ModelKind::Tree, ModelKind::Forest}) {
            if (!compatible(c, m)) continue;
            const auto f = fixture(c, m);
            const Pipeline p = fit_pipeline(f.request, f.data);
            const auto before = p.predict(f.data.X(), &f.data.s());
            const std::string text = serialize_model({p, "female", 5});
            const ModelFile back = deserialize_model(text);
            EXPECT_EQ(back.protected_name, "female");
            EXPECT_EQ(back.seed, 5u);
            const auto after = back.pipeline.predict(f.data.X(), &f.data.s());
            EXPECT_EQ(before.labels.values(), after.labels.values()) << to_string(c) << " " << to_string(m);
            EXPECT_EQ(before.scores, after.scores) << to_string(c) << " " << to_string(m);
            EXPECT_EQ(serialize_model(back), text);
            // Labels follow the shared threshold rule except where the condition overrides them.
            if (c == Condition::B || c == Condition::RPA) {
                for (Index i = 0; i < before.labels.size(); ++i) {
                    EXPECT_EQ(before.labels[i], before.scores[i] >= 0.5 ? 1 : 0);
                }
            }
        }
    }
}

TEST(Pipeline, DeterministicFit) {
    for (const Condition c : kAll) {
        const auto f = fixture(c, ModelKind::Forest);
        if (!compatible(c, ModelKind::Forest)) continue;
        EXPECT_EQ(serialize_model({fit_pipeline(f.request, f.data), "female", 5}),
                  serialize_model({fit_pipeline(f.request, f.data), "female", 5}))
            << to_string(c);
    }
}

TEST(Pipeline, RpaOnlyDropsSourceColumns) {
    const auto b = fixture(Condition::B);
    const auto r = fixture(Condition::RPA);
    const auto pb = fit_pipeline(b.request, b.data);
    const auto pr = fit_pipeline(r.request, r.data);
    EXPECT_EQ(pb.input_columns(), pr.input_columns());
    const auto jb = pb.to_json();
    const auto jr = pr.to_json();
    EXPECT_EQ(jr.at("dropped"), nlohmann::json::array({"src"}));
    EXPECT_TRUE(jb.at("dropped").empty());
    EXPECT_EQ(jr.at("predictor").at("model").at("coefficients").size() + 1,
              jb.at("predictor").at("model").at("coefficients").size());
}

TEST(Pipeline, BaseModelIsShared) {
    const auto f = fixture(Condition::B);
    ClassifierPtr base;
    const auto b = fit_pipeline(f.request, f.data, &base);
    ASSERT_TRUE(base);
    auto roc_request = f.request;
    roc_request.condition = Condition::ROC;
    roc_request.method.theta = 0.5 + 1e-9;
    const auto roc = fit_pipeline(roc_request, f.data, &base);
    EXPECT_EQ(b.predict(f.data.X(), nullptr).labels.values(), roc.predict(f.data.X(), &f.data.s()).labels.values());
}

TEST(Pipeline, PredictInputChecks) {
    const auto f = fixture(Condition::CFM);
    const auto p = fit_pipeline(f.request, f.data);
    EXPECT_THROW((void)p.predict(f.data.X(), nullptr), MissingInputError);
    const auto fewer = f.data.X().drop_columns(std::vector<std::string>{"x2"});
    EXPECT_THROW((void)p.predict(fewer, &f.data.s()), ShapeError);
    const auto b = fit_pipeline(fixture(Condition::B).request, f.data);
    EXPECT_NO_THROW((void)b.predict(f.data.X(), nullptr));
}

TEST(ModelFile, TamperVersionAndGarbage) {
    const auto f = fixture(Condition::ROC);
    const std::string text = serialize_model({fit_pipeline(f.request, f.data), "female", 5});

    auto j = nlohmann::json::parse(text);
    j["payload"]["pipeline"]["predictor"]["theta"] = 0.9;
    EXPECT_THROW((void)deserialize_model(j.dump()), ModelFormatError);

    j = nlohmann::json::parse(text);
    j["version"] = kModelFileVersion + 1;
    try {
        (void)deserialize_model(j.dump());
        ADD_FAILURE() << "version mismatch accepted";
    } catch (const ModelFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
    }

    j = nlohmann::json::parse(text);
    j["format"] = "something-else";
    EXPECT_THROW((void)deserialize_model(j.dump()), ModelFormatError);
    EXPECT_THROW((void)deserialize_model("{not json"), ModelFormatError);
    EXPECT_THROW((void)deserialize_model(text.substr(0, text.size() / 2)), ModelFormatError);
}
