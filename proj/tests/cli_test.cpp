#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "asahi/detector.hpp"

namespace asahi {
namespace {

namespace fs = std::filesystem;

const char* cli_path() { return ASAHI_CLI_PATH; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "asahi_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CommandResult run(const std::string& args, double timeout = 120.0) {
    return run_command_capture("cd " + dir_.string() + " && " + cli_path() + " " + args, timeout);
  }

  fs::path dir_;
};

TEST_F(CliTest, PlanTwelveWindowReport) {
  const CommandResult result = run("plan --dims 1920x1080");
  ASSERT_EQ(result.exit_code, 0) << result.diagnostics;
  EXPECT_NE(result.output.find("grid 3x4 (12 windows)"), std::string::npos);
  // 12 window lines follow the header block.
  int window_lines = 0;
  std::istringstream lines(result.output);
  std::string line;
  while (std::getline(lines, line)) {
    int r, c, x1, y1, x2, y2;
    if (std::sscanf(line.c_str(), "%d %d %d %d %d %d", &r, &c, &x1, &y1, &x2, &y2) == 6) {
      ++window_lines;
    }
  }
  EXPECT_EQ(window_lines, 12);
}

TEST_F(CliTest, PlanSixWindowReport) {
  const CommandResult result = run("plan --dims 960x540");
  ASSERT_EQ(result.exit_code, 0);
  EXPECT_NE(result.output.find("grid 2x3 (6 windows)"), std::string::npos);
}

TEST_F(CliTest, MalformedDimsIsUsageError) {
  const CommandResult result = run("plan --dims bogus");
  EXPECT_EQ(result.exit_code, 1);
  EXPECT_FALSE(result.diagnostics.empty());
}

TEST_F(CliTest, MissingSubcommandIsUsageError) {
  const CommandResult result = run("");
  EXPECT_EQ(result.exit_code, 1);
}

TEST_F(CliTest, HelpDocumentsEveryCommand) {
  const CommandResult result = run("--help");
  ASSERT_EQ(result.exit_code, 0);
  for (const char* name :
       {"plan", "slice", "redundancy", "scenegen", "detect", "eval", "saf-build", "bench"}) {
    EXPECT_NE(result.output.find(name), std::string::npos) << name;
  }
  EXPECT_EQ(run("detect --help").exit_code, 0);
  EXPECT_EQ(run("bench --help").exit_code, 0);
}

TEST_F(CliTest, ScenegenDetectEvalRoundTrip) {
  ASSERT_EQ(run("scenegen --out gt.json --scenes 2 --objects 40 --seed 11").exit_code, 0);
  ASSERT_EQ(run("detect --gt gt.json --out dets.txt --summary sum.txt --seed 11").exit_code, 0);
  const CommandResult eval = run("eval --gt gt.json --detections dets.txt --format csv");
  ASSERT_EQ(eval.exit_code, 0) << eval.diagnostics;
  EXPECT_NE(eval.output.find("mAP,1.0000"), std::string::npos) << eval.output;
  EXPECT_NE(eval.output.find("mAP50_s,1.0000"), std::string::npos);
}

TEST_F(CliTest, DetectMissingInputFails) {
  const CommandResult result = run("detect --gt missing.json --out dets.txt");
  EXPECT_EQ(result.exit_code, 2);
  EXPECT_NE(result.diagnostics.find("missing.json"), std::string::npos);
}

TEST_F(CliTest, DeterministicDetections) {
  ASSERT_EQ(run("scenegen --out gt.json --scenes 4 --objects 80 --seed 21").exit_code, 0);
  const std::string flags =
      "detect --gt gt.json --seed 21 --jitter 0.3 --fp-rate 0.5 --parallelism 8 --out ";
  ASSERT_EQ(run(flags + "a.txt").exit_code, 0);
  ASSERT_EQ(run(flags + "b.txt").exit_code, 0);
  const std::string a = read_file(dir_ / "a.txt");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read_file(dir_ / "b.txt"));
}

TEST_F(CliTest, ExternalDetectorRoundTrip) {
  ASSERT_EQ(
      run("scenegen --out gt.json --scenes 1 --objects 5 --render-dir imgs --seed 31").exit_code,
      0);
  // Stub detector: validates its input file exists, emits one fixed line.
  const CommandResult result = run(
      "detect --gt gt.json --images imgs --out dets.txt "
      "--detector-cmd 'test -s {input} && echo \"1 0 0.500000 10 10 60 60\"'");
  ASSERT_EQ(result.exit_code, 0) << result.diagnostics;
  const std::string dets = read_file(dir_ / "dets.txt");
  EXPECT_NE(dets.find("1 0 0.5"), std::string::npos);
}

TEST_F(CliTest, ConfigFileProvidesDefaults) {
  {
    std::ofstream config(dir_ / "run.cfg");
    config << "mu=0.0\n";
  }
  const CommandResult result = run("plan --dims 300x200 --config run.cfg");
  ASSERT_EQ(result.exit_code, 0) << result.diagnostics;
  EXPECT_NE(result.output.find("window 101x101"), std::string::npos);
  // Command line overrides the file.
  const CommandResult overridden = run("plan --dims 300x200 --config run.cfg --mu 0.15");
  EXPECT_EQ(overridden.output.find("window 101x101"), std::string::npos);
}

TEST_F(CliTest, RedundancyCsvFile) {
  const CommandResult result = run("redundancy --resolutions 960x540 -o red.csv --format csv");
  ASSERT_EQ(result.exit_code, 0);
  const std::string csv = read_file(dir_ / "red.csv");
  EXPECT_NE(csv.find("960,540"), std::string::npos);
}

TEST_F(CliTest, SliceWritesPatches) {
  ASSERT_EQ(
      run("scenegen --out gt.json --scenes 1 --objects 3 --dims 960x540 --render-dir imgs")
          .exit_code,
      0);
  const CommandResult result = run("slice --image imgs/scene_1.ppm --out-dir patches");
  ASSERT_EQ(result.exit_code, 0) << result.diagnostics;
  EXPECT_TRUE(fs::exists(dir_ / "patches" / "patch_r0c0.ppm"));
  EXPECT_TRUE(fs::exists(dir_ / "patches" / "patch_r1c2.ppm"));
  EXPECT_TRUE(fs::exists(dir_ / "patches" / "windows.txt"));
}

TEST_F(CliTest, SafBuildReportsCleanStructure) {
  ASSERT_EQ(run("scenegen --out gt.json --scenes 2 --objects 30 --dims 960x540 "
                "--render-dir imgs --seed 41")
                .exit_code,
            0);
  const CommandResult result = run("saf-build --gt gt.json --images imgs --out-dir saf");
  ASSERT_EQ(result.exit_code, 0) << result.diagnostics;
  EXPECT_NE(result.output.find("records 14"), std::string::npos);  // 2 * (1 + 6)
  EXPECT_NE(result.output.find("violations 0"), std::string::npos);
}

TEST_F(CliTest, BenchSingleStrategySingleResolution) {
  const CommandResult result =
      run("bench --resolutions 960x540 --scenes-per 1 --objects 20 --strategies adaptive");
  ASSERT_EQ(result.exit_code, 0) << result.diagnostics;
  EXPECT_NE(result.output.find("adaptive"), std::string::npos);
  // Empty resolution list: header only, success.
  const CommandResult empty = run("bench --resolutions , --scenes-per 1 --strategies adaptive");
  EXPECT_EQ(empty.exit_code, 0);
}

}  // namespace
}  // namespace asahi
