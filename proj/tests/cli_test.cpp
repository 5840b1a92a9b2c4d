#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "mmdec/cli/cli.hpp"
#include "mmdec/common/binary_io.hpp"
#include "mmdec/data/dataset.hpp"
#include "mmdec/data/manifest.hpp"
#include "mmdec/model/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace mmdec;

namespace {

int run_binary(const std::string& args) {
  const std::string cmd = std::string(MMDEC_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  static fs::path root() { return fs::temp_directory_path() / "mmdec_cli_test"; }

  static void SetUpTestSuite() {
    fs::remove_all(root());
    fs::create_directories(root());
    ASSERT_EQ(cli::run({"synth", "--out", (root() / "ds").string(), "--participants", "2", "--minutes", "2",
                        "--trial-minutes", "2", "--competing-minutes", "1", "--snr-db", "-12", "--seed", "5",
                        "--quiet"}),
              cli::kExitOk);
  }

  static std::string manifest() { return (root() / "ds" / "manifest.json").string(); }

  static int train(const fs::path& out, const std::string& seeds) {
    return cli::run({"train", "--manifest", manifest(), "--out", out.string(), "--seeds", seeds, "--set",
                     "max_epochs=1", "--set", "batch_size=16", "--seed", "11", "--quiet"});
  }
};

TEST_F(CliTest, EvaluateWithoutCheckpointExitsWithUsageError) {
  EXPECT_EQ(run_binary("evaluate --manifest " + manifest() + " --out " + (root() / "ev_none").string()), 1);
}

TEST_F(CliTest, UnknownSubcommandOrFlagExitsWithUsageError) {
  EXPECT_EQ(run_binary("frobnicate"), 1);
  EXPECT_EQ(run_binary("report --no-such-flag " + root().string()), 1);
  EXPECT_EQ(run_binary(""), 1);
  EXPECT_EQ(run_binary("--help"), 0);
}

TEST_F(CliTest, MissingDataExitsWithDataError) {
  EXPECT_EQ(run_binary("train --manifest " + (root() / "absent.json").string() + " --out " +
                       (root() / "never").string()),
            2);
  EXPECT_EQ(run_binary("evaluate --manifest " + manifest() + " --checkpoint " + (root() / "absent.ckpt").string() +
                       " --out " + (root() / "never").string()),
            2);
}

TEST_F(CliTest, BadConfigValueExitsWithUsageError) {
  EXPECT_EQ(run_binary("train --manifest " + manifest() + " --out " + (root() / "never").string() +
                       " --set batch_size=7"),
            1);
  EXPECT_EQ(run_binary("train --manifest " + manifest() + " --out " + (root() / "never").string() +
                       " --set no_such_key=1"),
            1);
}

TEST_F(CliTest, TrainSeedsThreeGivesDistinctCheckpoints) {
  const fs::path out = root() / "three";
  ASSERT_EQ(train(out, "3"), cli::kExitOk);
  std::vector<model::DecoderParams<float>> params;
  for (const char* name : {"instance_01", "instance_02", "instance_03"}) {
    ASSERT_TRUE(fs::exists(out / name / "best.ckpt")) << name;
    ASSERT_TRUE(fs::exists(out / name / "config.txt")) << name;
    params.push_back(model::load_checkpoint(out / name / "best.ckpt"));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = i + 1; j < params.size(); ++j) {
      EXPECT_NE(model::encode_checkpoint(params[i]), model::encode_checkpoint(params[j])) << i << " vs " << j;
    }
  }
}

TEST_F(CliTest, RunsAndReportsAreByteIdentical) {
  const fs::path a = root() / "det_a";
  const fs::path b = root() / "det_b";
  ASSERT_EQ(train(a / "train", "2"), cli::kExitOk);
  ASSERT_EQ(train(b / "train", "2"), cli::kExitOk);
  for (const fs::path& dir : {a, b}) {
    ASSERT_EQ(cli::run({"evaluate", "--manifest", manifest(), "--checkpoint", (dir / "train").string(), "--out",
                        (dir / "eval").string(), "--segments", "3,5", "--quiet"}),
              cli::kExitOk);
    ASSERT_EQ(cli::run({"ensemble", "--scores", (dir / "eval" / "scores.tsv").string(), "--out",
                        (dir / "ens").string(), "--draws", "5", "--quiet"}),
              cli::kExitOk);
    ASSERT_EQ(cli::run({"report", dir.string(), "--out", (dir.parent_path() / (dir.filename().string() + ".txt")).string()}),
              cli::kExitOk);
  }
  for (const char* rel : {"train/instance_01/best.ckpt", "train/instance_02/best.ckpt", "train/instance_01/metrics.tsv",
                          "eval/scores.tsv", "eval/report.txt", "ens/ensemble.txt"}) {
    EXPECT_EQ(read_file(a / rel), read_file(b / rel)) << rel;
  }
  const std::string report_a = read_file(root() / "det_a.txt");
  EXPECT_EQ(report_a, read_file(root() / "det_b.txt").replace(0, 8, "## det_a"));
  ASSERT_EQ(cli::run({"report", a.string(), "--out", (root() / "det_a_again.txt").string()}), cli::kExitOk);
  EXPECT_EQ(report_a, read_file(root() / "det_a_again.txt"));
}

TEST_F(CliTest, FinetuneWritesOneRunPerParticipant) {
  const fs::path pop = root() / "pop";
  ASSERT_EQ(train(pop, "1"), cli::kExitOk);
  ASSERT_EQ(cli::run({"finetune", "--manifest", manifest(), "--checkpoint", (pop / "instance_01" / "best.ckpt").string(),
                      "--out", (root() / "ft").string(), "--set", "max_epochs=1", "--set", "batch_size=4", "--quiet"}),
            cli::kExitOk);
  EXPECT_TRUE(fs::exists(root() / "ft" / "P01" / "best.ckpt"));
  EXPECT_TRUE(fs::exists(root() / "ft" / "P02" / "best.ckpt"));
}

TEST_F(CliTest, PreprocessTurnsRawRecordingsIntoAlignedFeatures) {
  const fs::path raw = root() / "raw";
  ASSERT_EQ(cli::run({"synth", "--out", raw.string(), "--participants", "1", "--minutes", "0.5", "--trial-minutes",
                      "0.5", "--competing-minutes", "0.5", "--raw", "--seed", "3", "--quiet"}),
            cli::kExitOk);
  const fs::path pre = root() / "pre";
  ASSERT_EQ(cli::run({"preprocess", "--manifest", (raw / "manifest.json").string(), "--out", pre.string(), "--quiet"}),
            cli::kExitOk);
  const auto manifest = data::read_manifest(pre / "manifest.json");
  for (const auto kind : {data::FeatureKind::Envelope, data::FeatureKind::EnvelopeModulations}) {
    const auto ds = data::load_dataset(manifest, kind);
    ASSERT_EQ(ds.trials.size(), 2u);
    for (const auto& t : ds.trials) {
      EXPECT_EQ(t.channels, 64u);
      EXPECT_EQ(t.rate, kind == data::FeatureKind::Envelope ? 64.0 : 512.0);
      EXPECT_NEAR(t.duration_seconds(), 30.0, 0.5);
    }
    EXPECT_FALSE(ds.trials[1].ignored.empty());
  }
}

}  // namespace
