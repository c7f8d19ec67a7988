#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "support.hpp"

namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

std::string cli(const fs::path& config, const std::string& args) {
  return ts::quote(SUPPORTIVE_CLI) + " " + args + " -c " + ts::quote(config.string());
}

// Copies the bundled fixture into a scratch directory.
fs::path stage_fixture(const ts::TempDir& dir) {
  for (const auto& f : fs::directory_iterator(SUPPORTIVE_FIXTURE_DIR)) fs::copy_file(f.path(), dir / f.path().filename());
  return dir / "config.json";
}

// all -> simulated annotation of the eval sheet -> all again with the sheet,
// which adds kappa, the experiment and predicted engagement.
void full_pipeline(const fs::path& config, const fs::path& out, const std::string& extra = "") {
  const auto o = " -o " + ts::quote(out.string()) + " " + extra;
  auto r = ts::run(cli(config, "all" + o));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto sheet = config.parent_path() / "annotations.r1.tsv";
  r = ts::run(ts::quote(SUPPORTIVE_MAKE_FIXTURE) + " annotate --sheet " + ts::quote((out / "eval_sheet.r1.tsv").string()) +
              " --truth " + ts::quote((config.parent_path() / "truth.jsonl").string()) + " --out " +
              ts::quote(sheet.string()));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  r = ts::run(cli(config, "all" + o + " --sheet " + ts::quote(sheet.string())));
  ASSERT_EQ(r.exit_code, 0) << r.output;
}

std::map<std::string, std::string> manifest(const fs::path& out) {
  std::map<std::string, std::string> m;
  std::istringstream in(ts::slurp(out / "MANIFEST.tsv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string path, fp;
    row >> path >> fp;
    m[path] = fp;
  }
  return m;
}

class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ts::TempDir("cli");
    config_ = stage_fixture(*dir_);
    full_pipeline(config_, *dir_ / "out");
  }
  static void TearDownTestSuite() { delete dir_; }
  static ts::TempDir* dir_;
  static fs::path config_;
};
ts::TempDir* Pipeline::dir_ = nullptr;
fs::path Pipeline::config_;

}  // namespace

TEST_F(Pipeline, EveryReportWrittenAndVerified) {
  const auto out = *dir_ / "out";
  for (const char* f : {"ingest.jsonl", "partition.jsonl", "scores.jsonl", "eval_sample.jsonl", "informed.jsonl",
                        "hashtag.jsonl", "pair_rate.tsv", "kappa.tsv", "gold.jsonl", "eval_report.tsv",
                        "engagement.tsv", "engagement_predicted.tsv", "hashtag_counts.tsv", "jaccard.tsv",
                        "termfreq.tsv", "MANIFEST.tsv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto r = ts::run(cli(config_, "verify -o " + ts::quote(out.string())));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("verify: ok"), std::string::npos) << r.output;
}

TEST_F(Pipeline, ReportsCarryProvenance) {
  const auto out = *dir_ / "out";
  EXPECT_EQ(ts::slurp(out / "eval_report.tsv").rfind("# provenance ", 0), 0u);
  EXPECT_EQ(ts::slurp(out / "informed.jsonl").rfind("{\"provenance\"", 0), 0u);
  const auto report = ts::slurp(out / "eval_report.tsv");
  for (const char* set : {"supervised", "informed", "hashtag"}) EXPECT_NE(report.find(set), std::string::npos) << set;
}

TEST_F(Pipeline, TamperingIsDetected) {
  ts::TempDir copy("tamper");
  fs::copy(*dir_ / "out", copy / "out", fs::copy_options::recursive);
  const auto target = copy / "out" / "pair_rate.tsv";
  ts::spit(target, ts::slurp(target) + "extra\n");
  ts::spit(copy / "out" / "stray.txt", "x");
  const auto r = ts::run(cli(config_, "verify -o " + ts::quote((copy / "out").string())));
  EXPECT_EQ(r.exit_code, 4) << r.output;
  EXPECT_NE(r.output.find("modified\tpair_rate.tsv"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("untracked\tstray.txt"), std::string::npos) << r.output;
}

TEST_F(Pipeline, ConfigDriftIsDetected) {
  const auto r = ts::run(cli(config_, "verify --set informed.top_k=7 -o " + ts::quote((*dir_ / "out").string())));
  EXPECT_EQ(r.exit_code, 4) << r.output;
  EXPECT_NE(r.output.find("config-drift"), std::string::npos) << r.output;
}

TEST(Cli, SeededRunsAreFingerprintIdentical) {
  ts::TempDir dir("determinism");
  const auto config = stage_fixture(dir);
  full_pipeline(config, dir / "a", "--seed 7");
  full_pipeline(config, dir / "b", "--seed 7 -j 4");
  const auto a = manifest(dir / "a");
  const auto b = manifest(dir / "b");
  EXPECT_GT(a.size(), 20u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ts::slurp(dir / "a" / "MANIFEST.tsv"), ts::slurp(dir / "b" / "MANIFEST.tsv"));
}

TEST(Cli, MissingArtifactNamesProducer) {
  ts::TempDir dir("missing");
  const auto config = stage_fixture(dir);
  ASSERT_EQ(ts::run(cli(config, "ingest")).exit_code, 0);
  ASSERT_EQ(ts::run(cli(config, "partition")).exit_code, 0);
  const auto r = ts::run(cli(config, "build-informed"));
  EXPECT_EQ(r.exit_code, 3) << r.output;
  EXPECT_NE(r.output.find("scores.jsonl"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("score"), std::string::npos) << r.output;
}

TEST(Cli, ConfigErrorsExitTwo) {
  ts::TempDir dir("badcfg");
  const auto config = stage_fixture(dir);
  EXPECT_EQ(ts::run(cli(config, "ingest --set informed.top_k=0")).exit_code, 2);
  EXPECT_EQ(ts::run(cli(config, "ingest --set bogus=1")).exit_code, 2);
  EXPECT_EQ(ts::run(cli(dir / "absent.json", "ingest")).exit_code, 2);
}

TEST(Cli, EmptyCorpusIsDataError) {
  ts::TempDir dir("empty");
  const auto config = stage_fixture(dir);
  ts::spit(dir / "corpus.jsonl", "");
  EXPECT_EQ(ts::run(cli(config, "ingest")).exit_code, 4);
}

TEST(Cli, ExternalScorerThroughConfig) {
  ts::TempDir dir("external");
  const auto config = stage_fixture(dir);
  const std::string echo = SUPPORTIVE_ECHO_SCORER;
  const auto sets = " --set 'scorers.hope={\"type\":\"external\",\"command\":[\"" + echo +
                    "\",\"--keywords\",\"hope,pray,strength\"],\"timeout_ms\":20000,\"version\":\"echo-1\"}'";
  for (const char* stage : {"ingest", "partition", "train-scorer", "score", "pair-rate"}) {
    const auto r = ts::run(cli(config, std::string(stage) + sets));
    ASSERT_EQ(r.exit_code, 0) << stage << "\n" << r.output;
  }
  const auto rates = ts::slurp(dir / "out" / "pair_rate.tsv");
  EXPECT_NE(rates.find("hope"), std::string::npos) << rates;
  // A scorer that crashes surfaces as a scoring error.
  const auto crash = " --set 'scorers.hope={\"type\":\"external\",\"command\":[\"" + echo +
                     "\",\"--mode\",\"crash\",\"--after\",\"3\"]}'";
  EXPECT_EQ(ts::run(cli(config, std::string("score") + crash)).exit_code, 5);
}
