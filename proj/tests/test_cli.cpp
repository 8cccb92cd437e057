#include "cli.hpp"
#include "fairlens/data.hpp"
#include "fairlens/pipeline.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace fairlens;
namespace fs = std::filesystem;

namespace {

const std::string kGerman = (fs::path(FAIRLENS_SOURCE_DIR) / "data" / "german.data").string();

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "fairlens");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("fairlens_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(CliAudit, GermanCreditDeterministic) {
    const auto a = run({"audit", "--dataset", kGerman, "--protected", "female,foreign_worker,age_below_25"});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto b = run({"audit", "--dataset", kGerman, "--protected", "female,foreign_worker,age_below_25"});
    EXPECT_EQ(a.out, b.out);
    const auto doc = nlohmann::json::parse(a.out);
    ASSERT_EQ(doc.at("attributes").size(), 3u);
    EXPECT_EQ(doc.at("records"), 1000);
    const auto& female = doc.at("attributes")[0];
    EXPECT_EQ(female.at("protected"), "female");
    EXPECT_NEAR(female.at("mean_difference").at("value").get<double>(), 0.0748, 0.005);
    EXPECT_TRUE(female.at("consistency").is_number());

    const auto csv = run({"audit", "--dataset", kGerman, "--protected", "age_below_25", "--format", "csv"});
    ASSERT_EQ(csv.code, 0) << csv.err;
    const auto rows = csv_rows(csv.out);
    EXPECT_EQ(rows[0], std::vector<std::string>({"protected", "metric", "value", "ci_low", "ci_high"}));
    EXPECT_EQ(rows.size(), 6u);
}

TEST(CliAudit, ZeroBiasCsv) {
    TempDir dir;
    std::ofstream(dir / "flat.csv") << "x,label,g\n0,1,0\n1,0,0\n2,1,1\n3,0,1\n4,1,0\n5,0,1\n6,0,0\n7,1,1\n";
    const auto r = run({"audit", "--dataset", dir / "flat.csv", "--csv-label", "label", "--csv-protected", "g",
                        "--neighbors", "2", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(csv_rows(r.out)[1][2], "0.000000");
    EXPECT_EQ(csv_rows(r.out)[1][0], "g");
}

TEST(CliAudit, UndefinedMetricIsNull) {
    TempDir dir;
    std::ofstream(dir / "one.csv") << "x,label,g\n0,1,0\n1,1,0\n2,1,1\n3,1,1\n4,1,0\n";
    const auto r = run({"audit", "--dataset", dir / "one.csv", "--csv-label", "label", "--csv-protected", "g",
                        "--neighbors", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_TRUE(doc.at("attributes")[0].at("normalized_mean_difference").is_null());
    EXPECT_EQ(doc.at("attributes")[0].at("mean_difference").at("value"), 0.0);
}

TEST(CliErrors, ExitCodes) {
    EXPECT_EQ(run({"audit", "--dataset", kGerman, "--bogus"}).code, cli::kUsage);
    EXPECT_EQ(run({"audit", "--dataset", kGerman, "--protected", "race"}).code, cli::kUsage);
    EXPECT_EQ(run({"audit", "--dataset", "/nonexistent/german.data"}).code, cli::kDataError);
    EXPECT_EQ(run({}).code, cli::kUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
    TempDir dir;
    // Seed is mandatory for stochastic subcommands.
    EXPECT_EQ(run({"train", "--dataset", kGerman, "--protected", "female", "--output", dir / "m.json"}).code,
              cli::kUsage);
    EXPECT_EQ(run({"experiment", "--dataset", kGerman}).code, cli::kUsage);
    EXPECT_EQ(run({"train", "--dataset", kGerman, "--protected", "female", "--condition", "PRR", "--model", "tree",
                   "--seed", "1", "--output", dir / "m.json"})
                  .code,
              cli::kUsage);
    EXPECT_EQ(run({"experiment", "--dataset", kGerman, "--seed", "1", "--theta", "0.4"}).code, cli::kUsage);
}

TEST(CliTrainPredict, RoundTripAndIntegrity) {
    TempDir dir;
    const auto t = run({"train", "--dataset", kGerman, "--protected", "age_below_25", "--condition", "CFM", "--model",
                        "logistic", "--seed", "4", "--output", dir / "cfm.json", "--export-features",
                        dir / "features.csv", "--export-sensitive", dir / "sensitive.csv"});
    ASSERT_EQ(t.code, 0) << t.err;

    const auto via_dataset = run({"predict", "--model", dir / "cfm.json", "--dataset", kGerman});
    ASSERT_EQ(via_dataset.code, 0) << via_dataset.err;
    const auto via_files = run({"predict", "--model", dir / "cfm.json", "--features", dir / "features.csv",
                                "--sensitive", dir / "sensitive.csv"});
    ASSERT_EQ(via_files.code, 0) << via_files.err;
    EXPECT_EQ(via_dataset.out, via_files.out);

    // In-process prediction with the same file.
    const auto file = deserialize_model(slurp(dir / "cfm.json"));
    const auto records = data::load_german_credit(kGerman);
    const auto encoded = data::encode(records, "age_below_25", {.standardize = false});
    const auto pred = file.pipeline.predict(encoded.data.X(), &encoded.data.s());
    const auto rows = csv_rows(via_dataset.out);
    ASSERT_EQ(rows.size(), 1001u);
    EXPECT_EQ(rows[0], std::vector<std::string>({"row", "label", "score"}));
    for (Index i = 0; i < 1000; ++i) {
        ASSERT_EQ(std::stoi(rows[i + 1][1]), pred.labels[i]);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", pred.scores[i]);
        ASSERT_EQ(rows[i + 1][2], buf);
    }

    // Missing s for a model that needs it.
    const auto missing = run({"predict", "--model", dir / "cfm.json", "--features", dir / "features.csv"});
    EXPECT_EQ(missing.code, cli::kDataError);
    EXPECT_NE(missing.err.find("protected"), std::string::npos) << missing.err;

    // Tampered payload.
    std::string text = slurp(dir / "cfm.json");
    const auto pos = text.find("\"slope\"");
    ASSERT_NE(pos, std::string::npos);
    const auto digit = text.find_first_of("0123456789", pos);
    text[digit] = text[digit] == '9' ? '8' : static_cast<char>(text[digit] + 1);
    std::ofstream(dir / "tampered.json") << text;
    const auto tampered = run({"predict", "--model", dir / "tampered.json", "--dataset", kGerman});
    EXPECT_EQ(tampered.code, cli::kDataError);
    EXPECT_NE(tampered.err.find("checksum"), std::string::npos) << tampered.err;

    // Same seed, same bytes.
    const auto again = run({"train", "--dataset", kGerman, "--protected", "age_below_25", "--condition", "CFM",
                            "--model", "logistic", "--seed", "4", "--output", dir / "cfm2.json"});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(slurp(dir / "cfm.json"), slurp(dir / "cfm2.json"));
}

TEST(CliExperiment, DegenerateThetaDeterminismAndReport) {
    TempDir dir;
    const std::vector<std::string> args = {"experiment", "--dataset", kGerman, "--protected", "female",
                                           "--conditions", "B,ROC", "--models", "logistic", "--folds", "3",
                                           "--theta", "0.5001", "--seed", "3", "--emit-plot-data"};
    auto first = args;
    first.insert(first.end(), {"--output-dir", dir / "one"});
    auto second = args;
    second.insert(second.end(), {"--output-dir", dir / "two"});
    const auto a = run(first);
    ASSERT_EQ(a.code, 0) << a.err;
    const auto b = run(second);
    ASSERT_EQ(b.code, 0) << b.err;
    for (const char* name : {"report.csv", "report.json", "means.csv", "correlation.csv", "plot_data.csv"}) {
        EXPECT_EQ(slurp(dir / ("one/" + std::string(name))), slurp(dir / ("two/" + std::string(name)))) << name;
    }

    const auto rows = csv_rows(slurp(dir / "one/report.csv"));
    ASSERT_EQ(rows.size(), 1u + 2 * 3 * 2);
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> base;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0] == "B") base[{rows[i][3], rows[i][4]}] = rows[i];
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0] != "ROC") continue;
        const auto& r = base.at({rows[i][3], rows[i][4]});
        EXPECT_EQ(rows[i][5], r[5]);
        EXPECT_EQ(rows[i][6], r[6]);
    }

    // Recomputing from either machine-readable file reproduces the summary files.
    for (const char* input : {"one/report.csv", "one/report.json"}) {
        const auto rep = run({"report", "--input", dir / input, "--output-dir", dir / "re"});
        ASSERT_EQ(rep.code, 0) << rep.err;
        EXPECT_EQ(rep.out, a.out);
        EXPECT_EQ(slurp(dir / "re/means.csv"), slurp(dir / "one/means.csv"));
        EXPECT_EQ(slurp(dir / "re/correlation.csv"), slurp(dir / "one/correlation.csv"));
        EXPECT_EQ(slurp(dir / "re/report.csv"), slurp(dir / "one/report.csv"));
    }
    std::ofstream(dir / "broken.csv") << "condition,model,protected,fold,split,auc,mean_difference\nB,logistic\n";
    EXPECT_EQ(run({"report", "--input", dir / "broken.csv"}).code, cli::kDataError);
}

TEST(CliConfig, FileValuesAndFlagPrecedence) {
    TempDir dir;
    std::ofstream(dir / "cfg.ini") << "[audit]\ndataset = " << kGerman << "\nprotected = age_below_25\nformat = csv\n";
    const auto from_file = run({"--config", dir / "cfg.ini", "audit"});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    EXPECT_EQ(from_file.out, run({"audit", "--dataset", kGerman, "--protected", "age_below_25", "--format", "csv"}).out);
    const auto flag_wins = run({"--config", dir / "cfg.ini", "audit", "--format", "json"});
    ASSERT_EQ(flag_wins.code, 0) << flag_wins.err;
    EXPECT_EQ(flag_wins.out.front(), '{');
}
