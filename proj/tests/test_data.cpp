#include "fairlens/data.hpp"
#include "fairlens/errors.hpp"
#include "fairlens/metrics.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace fairlens;
using namespace fairlens::data;

namespace {

const std::filesystem::path kGerman = std::filesystem::path(FAIRLENS_SOURCE_DIR) / "data" / "german.data";

std::vector<std::string> german_lines() {
    std::ifstream in(kGerman);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

class TempFile {
public:
    explicit TempFile(const std::string& contents, const std::string& suffix = ".data") {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("fairlens_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + suffix);
        std::ofstream(path_) << contents;
    }
    ~TempFile() { std::filesystem::remove(path_); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string join(const std::vector<std::string>& lines, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) out += lines[i] + "\n";
    return out;
}

template <class F>
std::string message_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(GermanCredit, LoadsAllRecords) {
    const auto records = load_german_credit(kGerman);
    ASSERT_EQ(records.size(), kGermanCreditRecords);
    EXPECT_EQ(records[0].at("checking_status").code, "A11");
    EXPECT_EQ(records[0].at("duration").number, 6);
    EXPECT_EQ(records[0].at("age").number, 67);
    EXPECT_EQ(records[0].risk, 1);
    EXPECT_EQ(records[1].risk, 2);
    EXPECT_EQ(german_credit_schema().size(), kGermanCreditAttributes);
}

TEST(GermanCredit, TruncatedFileIsIntegrityError) {
    const TempFile f(join(german_lines(), 999));
    EXPECT_THROW((void)load_german_credit(f.path()), IntegrityError);
}

TEST(GermanCredit, BadFieldsNameTheLine) {
    auto lines = german_lines();
    std::string bad = lines[2];
    // Age is the 13th field.
    std::istringstream in(bad);
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(f);
    fields[12] = "old";
    bad.clear();
    for (const auto& f : fields) bad += f + " ";
    lines[2] = bad;
    const TempFile f(join(lines, lines.size()));
    const auto msg = message_of([&] { (void)load_german_credit(f.path()); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_THROW((void)load_german_credit(f.path()), ParseError);

    EXPECT_THROW((void)parse_german_credit_line("A11 6 A34", 1), ParseError);
    std::string unknown = german_lines()[0];
    unknown.replace(0, 3, "A19");
    EXPECT_THROW((void)parse_german_credit_line(unknown, 1), ParseError);
    std::string risk = german_lines()[0];
    risk.back() = '3';
    EXPECT_THROW((void)parse_german_credit_line(risk, 1), ParseError);
}

TEST(GermanCredit, MissingFile) {
    EXPECT_THROW((void)load_german_credit("/nonexistent/german.data"), MissingInputError);
}

TEST(GermanCredit, AgeCountOnePassOracle) {
    Index oracle = 0;
    for (const auto& line : german_lines()) {
        std::istringstream in(line);
        std::string field;
        for (int k = 0; k < 13; ++k) in >> field;
        if (!field.empty() && std::stoi(field) <= 25) ++oracle;
    }
    const auto s = extract_protected(load_german_credit(kGerman), "age_below_25");
    EXPECT_EQ(s.count_disadvantaged(), oracle);
    EXPECT_EQ(oracle, 190u);
}

TEST(GermanCredit, ProtectedVectorsAreBinaryWithBothGroups) {
    const auto records = load_german_credit(kGerman);
    for (const auto name : kProtectedNames) {
        const auto s = extract_protected(records, name);
        EXPECT_EQ(s.size(), kGermanCreditRecords);
        EXPECT_GT(s.count_disadvantaged(), 0u) << name;
        EXPECT_LT(s.count_disadvantaged(), kGermanCreditRecords) << name;
    }
    EXPECT_THROW(check_protected_name("race"), ConfigError);
    EXPECT_NO_THROW(check_protected_name("female"));
}

TEST(GermanCredit, FemaleMeanDifference) {
    const auto records = load_german_credit(kGerman);
    const auto md = metrics::mean_difference(extract_labels(records), extract_protected(records, "female"));
    EXPECT_NEAR(md.value, 0.0748, 0.005);
}

TEST(Encode, ColumnsAndDeterminism) {
    const auto records = load_german_credit(kGerman);
    const auto a = encode(records, "female");
    const auto b = encode(records, "female");
    EXPECT_EQ(a.data.X().values(), b.data.X().values());
    EXPECT_EQ(a.data.X().column_names(), b.data.X().column_names());
    const auto& X = a.data.X();
    EXPECT_GE(X.column_index("purpose=A43"), 0);
    EXPECT_GE(X.column_index("age"), 0);
    EXPECT_EQ(a.numeric_columns.size(), 7u);
    // One-hot blocks sum to one per row.
    const auto& schema = german_credit_schema();
    for (const auto& attr : schema) {
        if (!attr.categorical()) continue;
        for (Eigen::Index i = 0; i < X.values().rows(); i += 97) {
            double total = 0;
            for (const auto code : attr.codes) {
                const auto j = X.column_index(std::string(attr.name) + "=" + std::string(code));
                if (j >= 0) total += X.values()(i, j);
            }
            EXPECT_EQ(total, 1.0) << attr.name;
        }
    }
    // Standardized numeric columns.
    const auto age = X.values().col(X.column_index("age"));
    EXPECT_NEAR(age.mean(), 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt((age.array() - age.mean()).square().mean()), 1.0, 1e-12);
    EXPECT_EQ(a.data.s().values(), extract_protected(records, "female").values());
    EXPECT_EQ(a.data.y().values(), extract_labels(records).values());
}

TEST(Encode, DropProtectedSources) {
    const auto records = load_german_credit(kGerman);
    EncodeOptions opts;
    opts.drop_protected_sources = true;
    const auto full = encode(records, "age_below_25");
    const auto dropped = encode(records, "age_below_25", opts);
    EXPECT_FALSE(full.protected_source_columns.empty());
    for (const auto& c : full.protected_source_columns) {
        EXPECT_GE(full.data.X().column_index(c), 0) << c;
        EXPECT_EQ(dropped.data.X().column_index(c), -1) << c;
    }
    EXPECT_EQ(dropped.data.X().cols() + full.protected_source_columns.size(), full.data.X().cols());
}

TEST(Standardizer, FitTransform) {
    Eigen::MatrixXd X(4, 3);
    X << 1, 5, 0, 2, 5, 1, 3, 5, 0, 4, 5, 1;
    const FeatureMatrix F(X, {"a", "b", "c"});
    const auto st = Standardizer::fit(F, {"a", "b"});
    EXPECT_DOUBLE_EQ(st.means()[0], 2.5);
    EXPECT_DOUBLE_EQ(st.scales()[0], std::sqrt(1.25));
    EXPECT_DOUBLE_EQ(st.scales()[1], 1.0);
    const auto T = st.transform(F);
    EXPECT_DOUBLE_EQ(T.values()(0, 0), -1.5 / std::sqrt(1.25));
    EXPECT_DOUBLE_EQ(T.values()(0, 1), 0.0);
    EXPECT_EQ(T.values().col(2), X.col(2));
    const auto partial = st.transform(FeatureMatrix(X.leftCols(1), {"a"}));
    EXPECT_EQ(partial.cols(), 1u);
    EXPECT_THROW(Standardizer({"a"}, {0.0}, {0.0}), ValidationError);
}

TEST(NumericCsv, LoadAndErrors) {
    const TempFile good("x1,x2,label,group\n0.5,1,1,0\n-1,2,0,1\n3,0,1,1\n", ".csv");
    const auto d = load_csv_dataset(good.path(), "label", "group");
    EXPECT_EQ(d.X().column_names(), std::vector<std::string>({"x1", "x2"}));
    EXPECT_EQ(d.y().values(), std::vector<int>({1, 0, 1}));
    EXPECT_EQ(d.s().values(), std::vector<int>({0, 1, 1}));
    EXPECT_EQ(d.s().name(), "group");

    const TempFile bad("x1,label,group\n0.5,1,0\nabc,0,1\n", ".csv");
    const auto msg = message_of([&] { (void)read_numeric_csv(bad.path()); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_THROW((void)load_csv_dataset(good.path(), "nope", "group"), Error);
    const TempFile labels("x1,label,group\n0.5,2,0\n", ".csv");
    EXPECT_THROW((void)load_csv_dataset(labels.path(), "label", "group"), ValidationError);
}
