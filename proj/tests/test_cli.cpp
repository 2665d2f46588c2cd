// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "mppcal/io.hpp"
#include "mppcal/keyvalue.hpp"

namespace fs = std::filesystem;
using namespace mppcal;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mppcal_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" MPPCAL_CLI_PATH "' " + args +
                            " >cli.log 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  KeyValueDocument report(const std::string& name) const {
    return KeyValueDocument::parse(io::read_file(dir_ / name), name);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SinglePointSimulation) {
  ASSERT_EQ(run("simulate --pixels 400 --p 0.16 --eta 0.38 --dark 0.008 --means 0.1 "
                "--triggers 1000 --seed 7 --out run"),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "run/signal_00.txt"));
  EXPECT_FALSE(fs::exists(dir_ / "run/signal_01.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "run/dark.txt"));
  const auto m = report("run/manifest.txt");
  EXPECT_EQ(m.require("format"), "mppcal-manifest");
  EXPECT_EQ(m.require_u64("sweep.count"), 1u);
  EXPECT_EQ(m.require_u64("run.seed"), 7u);
  EXPECT_EQ(m.require("detector.cascade_mode"), "paper-truncated");
}

TEST_F(Cli, SeedIsMandatory) {
  EXPECT_EQ(run("simulate --means 0.1 --triggers 10 --out run"), 2);
}

TEST_F(Cli, ManifestCannotBeMixedWithFlags) {
  ASSERT_EQ(run("simulate --means 0.1 --triggers 10 --seed 1 --out a"), 0);
  EXPECT_EQ(run("simulate --manifest a/manifest.txt --p 0.1 --out b"), 2);
}

TEST_F(Cli, ManifestRerunIsByteIdentical) {
  ASSERT_EQ(run("simulate --p 0.1 --eta 0.5 --dark 0.01 --means 0.1:0.9:3 --triggers 5000 "
                "--seed 3 --out a"),
            0);
  ASSERT_EQ(run("simulate --manifest a/manifest.txt --out b --threads 3"), 0);
  for (const char* f : {"signal_00.txt", "signal_01.txt", "signal_02.txt", "dark.txt", "manifest.txt"})
    EXPECT_EQ(io::read_file(dir_ / "a" / f), io::read_file(dir_ / "b" / f)) << f;
}

TEST_F(Cli, CalibrateG2AtZeroCrosstalk) {
  ASSERT_EQ(run("simulate --pixels 100000 --p 0 --dark 0.01 --means 0.2:1.0:5 --triggers 200000 "
                "--seed 5 --out run"),
            0);
  ASSERT_EQ(run("calibrate-g2 --manifest run/manifest.txt --bootstrap 50 --out g2.txt"), 0);
  const auto r = report("g2.txt");
  EXPECT_EQ(r.require("command"), "calibrate-g2");
  EXPECT_EQ(r.require_u64("fit.n_points"), 5u);
  EXPECT_EQ(r.require("fit.converged"), "true");
  EXPECT_LT(r.require_double("fit.p"), 0.01);
  EXPECT_EQ(r.require("config.subtract_mode"), "deconvolve");
  EXPECT_TRUE(fs::exists(dir_ / "g2.txt.points.tsv"));
  const auto points = io::read_file(dir_ / "g2.txt.points.tsv");
  EXPECT_EQ(points.rfind("# mu_ct\tg2\tsigma\n", 0), 0u);
}

TEST_F(Cli, CalibrateG2NeedsThreePoints) {
  ASSERT_EQ(run("simulate --means 0.2,0.4 --triggers 1000 --seed 1 --out run"), 0);
  EXPECT_EQ(run("calibrate-g2 --manifest run/manifest.txt --out g2.txt"), 2);
}

TEST_F(Cli, CalibrateDarkAllZeroIsDataError) {
  io::write_file(dir_ / "dark.txt", "0\n0\n0\n0\n");
  EXPECT_EQ(run("calibrate-dark --records dark.txt --out dark_report.txt"), 3);
}

TEST_F(Cli, CalibrateDarkReport) {
  ASSERT_EQ(run("simulate --p 0.1 --dark 0.05 --means 0.1 --triggers 10 --dark-triggers 200000 "
                "--seed 9 --out run"),
            0);
  ASSERT_EQ(run("calibrate-dark --manifest run/manifest.txt --out d.txt"), 0);
  const auto r = report("d.txt");
  EXPECT_EQ(r.require_u64("dark.triggers"), 200000u);
  EXPECT_GT(r.require_double("dark.p_dc"), 0.0);
  EXPECT_GT(r.require_double("dark.p_dc_stderr"), 0.0);
}

TEST_F(Cli, MissingFileIsIoError) {
  EXPECT_EQ(run("calibrate-dark --records nope.txt --out d.txt"), 5);
}

TEST_F(Cli, BadRecordIsDataError) {
  io::write_file(dir_ / "dark.txt", "0\n1\nbanana\n");
  EXPECT_EQ(run("calibrate-dark --records dark.txt --out d.txt"), 3);
}

TEST_F(Cli, CompareLiteralValues) {
  ASSERT_EQ(run("compare --g2-value 0.102 --g2-stderr 0.005 --pdc-value 0.108 --pdc-stderr 0.005 "
                "--g2-value 0.120 --g2-stderr 0.005 --pdc-value 0.13 --pdc-stderr 0.01 "
                "--g2-value 0.160 --g2-stderr 0.005 --pdc-value 0.17 --pdc-stderr 0.02 "
                "--g2-value 0.210 --g2-stderr 0.005 --pdc-value 0.23 --pdc-stderr 0.03 "
                "--g2-value 0.87 --g2-stderr 0.01 --pdc-value 0.610 --pdc-stderr 0.015 --out cmp.txt"),
            0);
  const auto r = report("cmp.txt");
  EXPECT_EQ(r.require_u64("comparison.count"), 5u);
  for (int i = 0; i < 4; ++i)
    EXPECT_EQ(r.require("comparison." + std::to_string(i) + ".verdict"), "consistent") << i;
  EXPECT_EQ(r.require("comparison.4.verdict"), "inconsistent");
  EXPECT_TRUE(fs::exists(dir_ / "cmp.txt.series.tsv"));
}

TEST_F(Cli, SelfComparisonIsZeroSigma) {
  ASSERT_EQ(run("simulate --p 0.1 --dark 0.05 --means 0.1 --triggers 10 --dark-triggers 100000 "
                "--seed 2 --out run"),
            0);
  ASSERT_EQ(run("calibrate-dark --manifest run/manifest.txt --out d.txt"), 0);
  ASSERT_EQ(run("compare --g2-report d.txt --dark-report d.txt --out cmp.txt"), 0);
  const auto r = report("cmp.txt");
  EXPECT_EQ(r.require_double("comparison.0.n_sigma"), 0.0);
  EXPECT_EQ(r.require("comparison.0.verdict"), "consistent");
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(run("simulate --frobnicate 3 --out x"), 2);
  EXPECT_EQ(run(""), 2);
}
