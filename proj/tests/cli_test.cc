// Copyright 2026 The BiFormer3D Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "biformer3d/bundle.h"

namespace biformer3d {
namespace {

namespace fs = std::filesystem;

constexpr const char* kTinyConfig = R"({
  "synthetic": {"n_subjects": 4, "n_directions": 24, "K": 64},
  "split": {"train_subjects": 2, "val_subjects": 2},
  "sparsity": [3, 5],
  "eval_sparsity": [3, 5],
  "ablation_m": 5,
  "model": {"K": 64, "D": 16, "T": 1, "n_heads": 2, "d_ff": 16, "P": 2,
            "decoder_hidden": 16, "head_hidden": 8},
  "batch_size": 2,
  "epochs": 1,
  "eval_every": 1
})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bf3d_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    std::ofstream(dir_ / "config.json") << kTinyConfig;
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(const std::string& args) {
    const std::string cmd = std::string(BIFORMER3D_CLI_PATH) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Common() const {
    return "--config " + (dir_ / "config.json").string() + " --out-dir " + (dir_ / "out").string();
  }

  std::string ReadFile(const fs::path& p) const {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, GenDataWritesBundlesAndCueSidecars) {
  ASSERT_EQ(Run("gen-data " + Common()), 0) << ReadFile(dir_ / "stdout.txt");
  const fs::path corpus = dir_ / "out" / "corpus";
  EXPECT_TRUE(fs::exists(corpus / "S0000.hrirb"));
  EXPECT_TRUE(fs::exists(corpus / "S0003.cues.json"));
  EXPECT_TRUE(fs::exists(corpus / "labels.csv"));
  const SubjectField f = ReadBundle(corpus / "S0001.hrirb");
  EXPECT_EQ(f.size(), 24u);
  EXPECT_EQ(f.hrir_length(), 64u);
  EXPECT_NE(ReadFile(corpus / "S0003.cues.json").find("\"itd_us\""), std::string::npos);
}

TEST_F(CliTest, TrainEvalBaselineUpsampleHeatmap) {
  ASSERT_EQ(Run("train " + Common()), 0) << ReadFile(dir_ / "stdout.txt");
  const fs::path out = dir_ / "out";
  EXPECT_TRUE(fs::exists(out / "model.ckpt"));
  EXPECT_TRUE(fs::exists(out / "train_log.csv"));

  ASSERT_EQ(Run("eval " + Common()), 0) << ReadFile(dir_ / "stdout.txt");
  const std::string metrics = ReadFile(out / "metrics.csv");
  EXPECT_EQ(metrics.rfind("subject_id,M,nmse_db,cd,itd_e_us,ild_e_db\n", 0), 0u);
  EXPECT_NE(metrics.find("ALL,5,"), std::string::npos);

  ASSERT_EQ(Run("baseline " + Common()), 0);
  EXPECT_TRUE(fs::exists(out / "baseline_metrics.csv"));

  ASSERT_EQ(Run("gen-data " + Common()), 0);
  const fs::path bundle = out / "corpus" / "S0000.hrirb";
  std::ofstream(dir_ / "targets.json") << "[[12.5, 3.0, 1.0], [200, -20]]";
  ASSERT_EQ(Run("upsample " + Common() + " --bundle " + bundle.string() + " --targets " +
                (dir_ / "targets.json").string() + " --output " + (dir_ / "up.hrirb").string()),
            0)
      << ReadFile(dir_ / "stdout.txt");
  // A fully measured bundle plus two new directions.
  EXPECT_EQ(ReadBundle(dir_ / "up.hrirb").size(), 26u);

  ASSERT_EQ(Run("heatmap " + Common() + " --bundle " + bundle.string() + " --output " +
                (dir_ / "h.pgm").string()),
            0);
  EXPECT_EQ(ReadFile(dir_ / "h.pgm").rfind("P5\n24 128\n255\n", 0), 0u);
}

TEST_F(CliTest, ExitCodes) {
  std::ofstream(dir_ / "bad.json") << R"({"epochs": "many"})";
  EXPECT_EQ(Run("train --config " + (dir_ / "bad.json").string()), 2);
  std::ofstream(dir_ / "unknown.json") << R"({"colour": 1})";
  EXPECT_EQ(Run("train --config " + (dir_ / "unknown.json").string()), 2);
  EXPECT_EQ(Run("no-such-verb"), 2);
  // A huge step size overflows the parameters and the loss goes non-finite.
  std::string diverge = kTinyConfig;
  diverge.replace(diverge.find("\"epochs\": 1"), 11, "\"epochs\": 3, \"lr\": 1e30");
  std::ofstream(dir_ / "diverge.json") << diverge;
  EXPECT_EQ(Run("train --config " + (dir_ / "diverge.json").string() + " --out-dir " +
                (dir_ / "div").string()),
            4);
  EXPECT_EQ(Run("heatmap " + Common() + " --bundle " + (dir_ / "absent.hrirb").string()), 3);
  EXPECT_EQ(Run("eval " + Common() + " --checkpoint " + (dir_ / "absent.ckpt").string()), 3);
}

}  // namespace
}  // namespace biformer3d
