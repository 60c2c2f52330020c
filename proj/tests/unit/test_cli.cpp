#include "cli.hpp"

#include "neurosvm/persistence.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace neurosvm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args, const std::string &stdin_text = "") {
    args.insert(args.begin(), "neurosvm");
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("neurosvm-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        data_ = (dir_ / "ilpd.csv").string();
        std::ofstream f(data_);
        write_ilpd(fixtures::synthetic_ilpd(180, 21, 2), f);
        store_ = (dir_ / "models").string();
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path dir_;
    std::string data_;
    std::string store_;
    const std::string features_ = "Age,TB,DB,Alkphos,Sgpt,Sgot";
};

const char *kPatient = R"({"Age":50,"Gender":"Male","TB":3.1,"DB":1.5,"Alkphos":300,"Sgpt":80,"Sgot":90,"TP":6.5,"ALB":3.1,"A/G Ratio":0.9})";

}  // namespace

TEST_F(CliTest, CompareEmitsFiveRows) {
    const auto r = run_cli({"compare", "--data", data_, "--seed", "7", "--format", "json", "--features", features_});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("kind"), "comparison_table");
    EXPECT_EQ(j.at("rows").size(), 5u);
    EXPECT_EQ(run_cli({"compare", "--data", data_, "--seed", "7", "--format", "json", "--features", features_}).out,
              r.out);
}

TEST_F(CliTest, TrainTwiceGivesSameModelId) {
    const std::vector<std::string> args{"train",   "--algorithm", "svm",    "--data",   data_,      "--seed",
                                        "7",       "--store",     store_,   "--format", "json", "--features", features_};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    const auto id = json::parse(a.out).at("model_id").get<std::string>();
    EXPECT_EQ(json::parse(b.out).at("model_id"), id);
    EXPECT_EQ(ModelStore(store_).list().size(), 1u);
    EXPECT_TRUE(ModelStore(store_).load_metrics(id).has_value());
}

TEST_F(CliTest, PredictReadsOneRecordFromStdin) {
    const auto t = run_cli({"train", "--algorithm", "neurosvm", "--data", data_, "--store", store_, "--format", "json",
                            "--features", features_});
    ASSERT_EQ(t.code, 0) << t.err;
    const auto id = json::parse(t.out).at("model_id").get<std::string>();
    const auto p = run_cli({"predict", "--store", store_, "--model", id}, kPatient);
    ASSERT_EQ(p.code, 0) << p.err;
    EXPECT_EQ(std::count(p.out.begin(), p.out.end(), '\n'), 1);
    const auto j = json::parse(p.out);
    EXPECT_EQ(j.at("model_id"), id);
    EXPECT_EQ(j.at("algorithm"), "neurosvm");
    const auto wrapped = run_cli({"predict", "--store", store_, "--model", id},
                                 std::string(R"({"attributes":)") + kPatient + "}");
    EXPECT_EQ(wrapped.out, p.out);

    const auto bad = run_cli({"predict", "--store", store_, "--model", id}, R"({"Age":-5})");
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("out_of_range"), std::string::npos);
    EXPECT_EQ(run_cli({"predict", "--store", store_, "--model", std::string(64, 'f')}, kPatient).code, 1);
    EXPECT_EQ(run_cli({"predict", "--store", store_, "--model", id}, "{").code, 1);
}

TEST_F(CliTest, EvaluateCrossValidatesOrScoresAStoredModel) {
    const auto cv = run_cli({"evaluate", "--data", data_, "--algorithm", "nb", "--folds", "4", "--format", "json",
                             "--features", features_});
    ASSERT_EQ(cv.code, 0) << cv.err;
    EXPECT_EQ(json::parse(cv.out).at("folds").size(), 4u);

    const auto t = run_cli({"train", "--algorithm", "nb", "--data", data_, "--store", store_, "--format", "json",
                            "--features", features_});
    const auto id = json::parse(t.out).at("model_id").get<std::string>();
    const auto e = run_cli({"evaluate", "--data", data_, "--store", store_, "--model", id, "--format", "json"});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(json::parse(e.out).at("n"), 178);
    EXPECT_EQ(ModelStore(store_).load_metrics(id)->n, 178u);
}

TEST_F(CliTest, TextFormatAndOutFile) {
    const auto out = (dir_ / "report.txt").string();
    const auto r = run_cli({"compare", "--data", data_, "--features", features_, "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(out);
    std::stringstream s;
    s << f.rdbuf();
    EXPECT_NE(s.str().find("NeuroSVM"), std::string::npos);
    EXPECT_NE(s.str().find("Naive Bayes"), std::string::npos);
}

TEST_F(CliTest, SelectFeaturesReport) {
    const auto r = run_cli({"select-features", "--data", data_, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("kind"), "feature_report");
    EXPECT_FALSE(j.at("correlation_removed").empty());
    const auto nofilter = run_cli({"select-features", "--data", data_, "--format", "json", "--no-corr-filter"});
    EXPECT_TRUE(json::parse(nofilter.out).at("correlation_removed").empty());
}

TEST_F(CliTest, UsageErrorsExitOne) {
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"compare", "--data", (dir_ / "missing.csv").string()}).code, 1);
    EXPECT_EQ(run_cli({"compare", "--data", data_, "--bogus"}).code, 1);
    EXPECT_EQ(run_cli({"train", "--data", data_, "--algorithm", "knn"}).code, 1);
    EXPECT_EQ(run_cli({"compare", "--data", data_, "--format", "xml"}).code, 1);
    EXPECT_EQ(run_cli({"compare", "--data", data_, "--features", "Age,Liver"}).code, 1);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, MalformedDataExitsOne) {
    const auto bad = (dir_ / "bad.csv").string();
    std::ofstream(bad) << "65,Female,0.7,0.1,187,16,18,6.8,3.3,0.9,7\n";
    const auto r = run_cli({"compare", "--data", bad});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 1"), std::string::npos);
}
