#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "coherelint/cli.hpp"
#include "support/synthetic.hpp"

using namespace coherelint;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "coherelint");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CliWorkspace : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("coherelint_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        write_csv((dir / "pairs.csv").string(), synth::java_like_corpus(12, 17));
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# small settings for tests\n"
            << "data.csv = " << (dir / "pairs.csv").string() << "\n"
            << "data.vectors = " << (dir / "vectors.bin").string() << "\n"
            << "encoder.dim = 12\nencoder.max_len = 30\n"
            << "model.hidden = 6\ntrain.epochs = 2\ntrain.batch = 16\n"
            << "skipgram.epochs = 2\nsvm.epochs = 5\n";
    }

    void TearDown() override { fs::remove_all(dir); }

    std::string cfg() const { return (dir / "run.cfg").string(); }
    std::string at(const std::string& name) const { return (dir / name).string(); }

    // embed, train three models, evaluate them all
    std::string full_pipeline(const std::string& tag) {
        EXPECT_EQ(run_cli({"embed", "--config", cfg(), "--vectors", at("vectors.bin")}).code, 0);
        for (std::string cell : {"rnn", "lstm", "svm"}) {
            const auto r = run_cli({"train", "--config", cfg(), "--model.cell", cell, "--model.out", at(cell + ".co3d")});
            EXPECT_EQ(r.code, 0) << r.err;
        }
        const auto report = at("report_" + tag + ".csv");
        const auto r = run_cli({"eval", "--config", cfg(), "--model", at("rnn.co3d"), "--model", at("lstm.co3d"),
                                "--model", at("svm.co3d"), "--report.csv", report});
        EXPECT_EQ(r.code, 0) << r.err;
        return slurp(report);
    }

    fs::path dir;
};

}  // namespace

TEST_F(CliWorkspace, EmbedTrainEvalProducesReport) {
    const auto report = full_pipeline("a");
    const auto entries = parse_report_csv(report);
    std::set<std::string> methods, rows;
    for (const auto& e : entries) {
        methods.insert(e.method);
        rows.insert(e.row);
    }
    EXPECT_EQ(methods, (std::set<std::string>{"C1", "C2", "SVM"}));
    EXPECT_EQ(rows.size(), 6u);
    EXPECT_TRUE(rows.contains("All"));
}

TEST_F(CliWorkspace, RepeatedRunsAreByteIdentical) {
    const auto first = full_pipeline("a");
    const auto second = full_pipeline("b");
    EXPECT_FALSE(first.empty());
    EXPECT_EQ(first, second);
}

TEST_F(CliWorkspace, MissingVectorFileExitsWithOneAndNamesPath) {
    const auto missing = at("nowhere.bin");
    const auto r = run_cli({"train", "--config", cfg(), "--data.vectors", missing});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
}

TEST_F(CliWorkspace, ConfigErrorsNameTheLine) {
    std::ofstream(at("bad.cfg")) << "data.csv = x\nno.such.key = 3\n";
    const auto r = run_cli({"split", "--config", at("bad.cfg")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find(":2"), std::string::npos) << r.err;
}

TEST_F(CliWorkspace, SplitWritesBothFiles) {
    const auto r = run_cli({"split", "--config", cfg(), "--split.dir", at("split")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto train = load_csv(at("split/train.csv")), test = load_csv(at("split/test.csv"));
    EXPECT_EQ(train.size() + test.size(), 60u);
}

TEST_F(CliWorkspace, ExplainWritesHtmlAndScores) {
    ASSERT_EQ(run_cli({"embed", "--config", cfg(), "--vectors", at("vectors.bin")}).code, 0);
    ASSERT_EQ(run_cli({"train", "--config", cfg(), "--model.out", at("m.co3d")}).code, 0);
    for (std::string method : {"grad", "occlusion"}) {
        const auto html = at("explain_" + method + ".html");
        const auto r = run_cli({"explain", "--config", cfg(), "--model", at("m.co3d"), "--pair-id", "Benchmark-0",
                                "--out", html, "--method", method});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_NE(slurp(html).find("<span class=\"tok\""), std::string::npos);
        EXPECT_EQ(slurp(at("explain_" + method + ".csv")).rfind("index,token,score\n", 0), 0u);
    }
    EXPECT_EQ(run_cli({"explain", "--config", cfg(), "--model", at("m.co3d"), "--pair-id", "missing"}).code, 1);
}

TEST_F(CliWorkspace, BenchWritesTimings) {
    const auto r = run_cli({"bench", "--config", cfg(), "--data.vectors", "", "--bench.csv", at("bench.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = slurp(at("bench.csv"));
    EXPECT_EQ(text.rfind("dataset,method,wall_minutes\n", 0), 0u);
    EXPECT_NE(text.find("All,tfidf,"), std::string::npos);
}

TEST_F(CliWorkspace, EmbedConvertsBetweenFormats) {
    ASSERT_EQ(run_cli({"embed", "--config", cfg(), "--vectors", at("vectors.bin")}).code, 0);
    ASSERT_EQ(run_cli({"embed", "--config", cfg(), "--vectors", at("vectors.txt"), "--format", "text", "--from",
                       at("vectors.bin")})
                  .code,
              0);
    EXPECT_EQ(load_word_vectors(at("vectors.txt"), VectorFormat::Text),
              load_word_vectors(at("vectors.bin"), VectorFormat::Binary));
}

TEST(Cli, HelpListsEveryKey) {
    const auto r = run_cli({"train", "--help"});
    EXPECT_EQ(r.code, 0);
    for (const auto& k : kConfigKeys) EXPECT_NE(r.out.find("--" + std::string(k.name)), std::string::npos) << k.name;
}

TEST(Cli, UnknownSubcommandFails) { EXPECT_EQ(run_cli({"frobnicate"}).code, 1); }
