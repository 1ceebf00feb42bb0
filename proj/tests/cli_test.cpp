#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "oodgate/cli.hpp"
#include "oodgate/formats.hpp"

namespace oodgate::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run oodgate(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(formats::read_file(p)); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    corpus_ = testing::write_fixture_corpus(dir_ / "corpus", 9, OODGATE_DATA_DIR "/backbones.csv");
  }
  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }
  fs::path dir_;
  testing::FixtureCorpus corpus_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(oodgate({}).code, 1);
  EXPECT_EQ(oodgate({"frobnicate"}).code, 1);
  EXPECT_EQ(oodgate({"gate", "--manifest", "x"}).code, 1);  // --gallery required
  EXPECT_EQ(oodgate({"--help"}).code, 0);
  EXPECT_EQ(oodgate({"rank", "--table", corpus_.backbone_table.string(), "--weights", "0.5,0.5,0.5"}).code,
            1);
  EXPECT_EQ(oodgate({"gate", "--gallery", corpus_.gallery.string(), "--manifest", corpus_.manifest.string(),
                     "--threshold", "1.01", "--out", out("o")})
                .code,
            1);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  const auto r = oodgate({"gate", "--gallery", (dir_ / "absent.galv1").string(), "--manifest",
                          corpus_.manifest.string(), "--out", out("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("IoError"), std::string::npos);
  EXPECT_EQ(oodgate({"gate", "--gallery", corpus_.train_embeddings.string(), "--manifest",
                     corpus_.manifest.string(), "--out", out("o")})
                .code,
            2);  // EMBV1 where GALV1 is required
}

TEST_F(CliTest, GalleryBuildThenGate) {
  const auto g = dir_ / "built.galv1";
  auto r = oodgate({"gallery-build", "--embeddings", corpus_.train_embeddings.string(), "--gallery", g.string(),
                    "--source-tag", "unit", "--out", out("build")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(formats::read_file(g), formats::read_file(corpus_.gallery));
  EXPECT_EQ(load(dir_ / "build" / "gallery-build.json")["gallery"]["records"], 60);

  r = oodgate({"eval-ood", "--gallery", g.string(), "--manifest", corpus_.manifest.string(), "--out",
               out("ood")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load(dir_ / "ood" / "eval-ood.json");
  EXPECT_EQ(j["gate"]["pass_through"].size(), 9u);
  EXPECT_EQ(j["domain_accuracy"]["correct_out_of_domain"], 6);
}

TEST_F(CliTest, TwoStageDetectionViaGateReport) {
  ASSERT_EQ(oodgate({"gate", "--gallery", corpus_.gallery.string(), "--manifest", corpus_.manifest.string(),
                     "--out", out("gate")})
                .code,
            0);
  const auto r = oodgate({"eval-det", "--manifest", corpus_.manifest.string(), "--ground-truth",
                          corpus_.ground_truth.string(), "--gate-report", out("gate") + "/gate.json", "--out",
                          out("det")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load(dir_ / "det" / "eval-det.json");
  EXPECT_EQ(j["detection"]["images"], 9);
  EXPECT_EQ(j["detection"]["status"], "ok");
}

TEST_F(CliTest, EmptyPassThroughExitsThree) {
  formats::write_file(dir_ / "gate.json", R"({"gate": {"pass_through": []}})");
  const auto r = oodgate({"eval-det", "--manifest", corpus_.manifest.string(), "--ground-truth",
                          corpus_.ground_truth.string(), "--gate-report", (dir_ / "gate.json").string(), "--out",
                          out("det")});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(load(dir_ / "det" / "eval-det.json")["detection"]["status"], "NoSamples");
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  formats::write_file(dir_ / "cfg.json", R"({"threshold": 0.2, "k": 2, "format": "json"})");
  auto r = oodgate({"gate", "--config", (dir_ / "cfg.json").string(), "--gallery", corpus_.gallery.string(),
                    "--manifest", corpus_.manifest.string(), "--out", out("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = load(dir_ / "a" / "gate.json");
  EXPECT_DOUBLE_EQ(j["config"]["threshold"].get<double>(), 0.2);
  EXPECT_EQ(j["config"]["k"], 2);
  r = oodgate({"gate", "--config", (dir_ / "cfg.json").string(), "--threshold", "0.9", "--gallery",
               corpus_.gallery.string(), "--manifest", corpus_.manifest.string(), "--out", out("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  j = load(dir_ / "b" / "gate.json");
  EXPECT_DOUBLE_EQ(j["config"]["threshold"].get<double>(), 0.9);
  EXPECT_EQ(j["config"]["k"], 2);
}

TEST_F(CliTest, CsvOutputAndSweep) {
  auto r = oodgate({"sweep-threshold", "--gallery", corpus_.gallery.string(), "--manifest",
                    corpus_.manifest.string(), "--format", "csv", "--out", out("sweep")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = formats::read_file(dir_ / "sweep" / "sweep-threshold_sweep.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "threshold,in_domain,out_of_domain,accuracy");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 51);
}

TEST_F(CliTest, FullReportRunsEveryStage) {
  const auto r = oodgate({"report", "--manifest", corpus_.manifest.string(), "--gallery",
                          corpus_.gallery.string(), "--ground-truth", corpus_.ground_truth.string(), "--table",
                          corpus_.backbone_table.string(), "--out", out("full")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load(dir_ / "full" / "report.json");
  for (const char* key : {"gate", "domain_accuracy", "detection", "xai", "ranking", "inputs"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["xai"]["exclusions"].size(), 1u);  // the empty-mask image
  EXPECT_EQ(j["ranking"]["order"].size(), 12u);
}

}  // namespace
}  // namespace oodgate::cli
