// Copyright (c) 2026 The xyzcycle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "xyzcycle/image_io.hpp"

namespace fs = std::filesystem;
using namespace xyzcycle;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "xyzcycle");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "xyzcycle_cli_test" /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  // Tiny dataset for the slower subcommands.
  void simulate_small(const std::string& name, int count) const {
    write(name + ".cfg", "height=32\nwidth=32\ntrain_fraction=0.5\nval_fraction=0.25\ntest_fraction=0.25\n");
    const Result r = run_cli({"simulate", "--count", std::to_string(count), "--seed", "3", "--out",
                              path(name), "--config", path(name + ".cfg")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateIsByteIdenticalAcrossRuns) {
  for (const char* d : {"a", "b"}) {
    const Result r = run_cli({"simulate", "--count", "4", "--out", path(d), "--seed", "7"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    const fs::path other = dir_ / "b" / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
    ++files;
  }
  EXPECT_EQ(files, 4 * 2 + 2);
  const Result c = run_cli({"simulate", "--count", "4", "--out", path("c"), "--seed", "8"});
  ASSERT_EQ(c.code, cli::kExitOk);
  EXPECT_NE(slurp(dir_ / "a" / "xyz_0000.pfm"), slurp(dir_ / "c" / "xyz_0000.pfm"));
}

TEST_F(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
  const Result r = run_cli({"simulate", "--bogus", "1"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run_cli({"simulate", "--seed", "notanumber", "--out", path("x")}).code, cli::kExitUsage);
}

TEST_F(Cli, UnknownConfigKeyIsAUsageError) {
  write("bad.cfg", "height=16\nhieght=16\n");
  const Result r = run_cli({"simulate", "--out", path("d"), "--config", path("bad.cfg")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("hieght"), std::string::npos);
}

TEST_F(Cli, RuntimeErrorsExitWithTwo) {
  const Result r = run_cli({"fit-global", "--manifest", path("missing.csv"), "--out", path("o")});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("missing.csv"), std::string::npos);
  const Result w = run_cli({"unprocess", "--weights", path("w.bin"), "--in", path("a.png"), "--out", path("b.pfm")});
  EXPECT_EQ(w.code, cli::kExitRuntime);
  EXPECT_NE(w.err.find("w.bin"), std::string::npos);
}

TEST_F(Cli, CalibrateWritesAMatrix) {
  write("chart.csv",
        "x,y,z,r,g,b\n1,0,0,2,0,0\n0,1,0,0,3,0\n0,0,1,0,0,4\n1,1,1,2,3,4\n");
  const Result r = run_cli({"calibrate", "--in", path("chart.csv"), "--out", path("m.txt")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("samples=4"), std::string::npos);
  std::istringstream in(slurp(dir_ / "m.txt"));
  double m[9];
  for (double& v : m) in >> v;
  EXPECT_NEAR(m[0], 2.0, 1e-9);
  EXPECT_NEAR(m[4], 3.0, 1e-9);
  EXPECT_NEAR(m[8], 4.0, 1e-9);
  EXPECT_NEAR(m[1], 0.0, 1e-9);

  write("flat.csv", "x,y,z,r,g,b\n1,0,0,1,0,0\n0,1,0,0,1,0\n");
  EXPECT_EQ(run_cli({"calibrate", "--in", path("flat.csv"), "--out", path("f.txt")}).code,
            cli::kExitRuntime);
}

TEST_F(Cli, FitGlobalWritesBothMatrices) {
  simulate_small("d", 4);
  const Result r = run_cli({"fit-global", "--manifest", path("d") + "/manifest.csv", "--out", path("fit")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "fit" / "m_inv.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "fit" / "m_fwd.txt"));
  EXPECT_NE(r.out.find("psnr_srgb_to_xyz="), std::string::npos);
}

TEST_F(Cli, TrainThenInferenceRoundTrip) {
  simulate_small("d", 4);
  write("train.cfg", "epochs=1\nbatch=1\npatch=16\npatches_per_pair=1\n");
  const std::string manifest = path("d") + "/manifest.csv";
  const Result t = run_cli({"train", "--manifest", manifest, "--config", path("train.cfg"), "--out", path("m"),
                            "--seed", "1"});
  ASSERT_EQ(t.code, cli::kExitOk) << t.err;
  EXPECT_NE(t.out.find("epoch=1 lr="), std::string::npos);
  EXPECT_NE(t.out.find("loss_srgb="), std::string::npos);
  const std::string weights = path("m") + "/weights.bin";
  EXPECT_EQ(slurp(path("m") + "/history.csv").substr(0, 5), "epoch");

  const std::string srgb = path("d") + "/srgb_0000.png";
  const Result u = run_cli({"unprocess", "--weights", weights, "--in", srgb, "--out", path("a.pfm")});
  ASSERT_EQ(u.code, cli::kExitOk) << u.err;
  EXPECT_NE(u.out.find("max_abs_res="), std::string::npos);
  const Result r = run_cli({"render", "--weights", weights, "--in", path("a.pfm"), "--out", path("a.png"),
                            "--ref", srgb});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("psnr="), std::string::npos);
  EXPECT_EQ(data::load_image(path("a.png")).width(), 32);

  const Result e = run_cli({"eval", "--manifest", manifest, "--weights", weights, "--out", path("eval")});
  ASSERT_EQ(e.code, cli::kExitOk) << e.err;
  EXPECT_NE(e.out.find("metric,Avg,Q1,Q2,Q3,n\n"), std::string::npos);
  EXPECT_NE(e.out.find("\nsrgb_to_xyz,"), std::string::npos);
  EXPECT_NE(e.out.find("\nxyz_to_srgb,"), std::string::npos);
  const std::string report = slurp(path("eval") + "/report.csv");
  for (const char* row : {"Avg,srgb_to_xyz,", "Q1,srgb_to_xyz,", "Q2,xyz_to_srgb,", "Q3,xyz_to_srgb,"}) {
    EXPECT_NE(report.find(row), std::string::npos) << row;
  }

  const Result en = run_cli({"enhance", "--weights", weights, "--in", srgb, "--out", path("en.png")});
  ASSERT_EQ(en.code, cli::kExitOk) << en.err;
}

TEST_F(Cli, EnhanceWithoutWeightsUsesTheStandardState) {
  simulate_small("d", 2);
  const Result r = run_cli({"enhance", "--in", path("d") + "/srgb_0001.png", "--gains", "1.0,2.0", "--out",
                            path("e.png")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "e.png"));
  EXPECT_EQ(run_cli({"enhance", "--in", path("d") + "/srgb_0001.png", "--gains", "1.0,x", "--out",
                     path("f.png")}).code,
            cli::kExitUsage);
}

TEST_F(Cli, HarnessesWriteCsvReports) {
  write("h.cfg", "size=32\n");
  for (const char* name : {"blur", "denoise", "haze"}) {
    const Result r = run_cli({std::string("harness-") + name, "--count", "2", "--config", path("h.cfg"),
                              "--out", path("h")});
    ASSERT_EQ(r.code, cli::kExitOk) << name << ": " << r.err;
    EXPECT_NE(r.out.find("mean_linear="), std::string::npos);
    const std::string csv = slurp(dir_ / "h" / (std::string("harness_") + name + ".csv"));
    EXPECT_EQ(csv.substr(0, 15), "seed,path,psnr\n");
    EXPECT_NE(csv.find("mean,linear,"), std::string::npos);
  }
}
