#include <gtest/gtest.h>

#include "json.hpp"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(NHTRAP_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nhtrap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  json read_json(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return json::parse(in);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, VerifySymbolsDefaults) {
  const auto r = run_cli("verify-symbols --out " + dir_.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  const json j = read_json("symbols.json");
  EXPECT_EQ(j["status"], "passed");
  EXPECT_LE(j["data"]["max_residual"].get<double>(), 1e-10);
  EXPECT_EQ(j["config_hash"].get<std::string>().size(), 64u);
  EXPECT_TRUE(fs::exists(dir_ / "residual.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "trapped.csv"));
}

TEST_F(CliTest, SinglePointScalingThenReportRefusesFits) {
  const auto s = run_cli("scaling --h-list 0.1 --out " + dir_.string());
  std::ifstream csv(dir_ / "records.csv");
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "h,n_x,norm_l2,norm_iso,norm_sandwich,wall_time_s");
  EXPECT_EQ(row.rfind("0.1", 0), 0u) << row;
  EXPECT_FALSE(std::getline(csv, extra) && !extra.empty());

  const auto r = run_cli("report --out " + dir_.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  const json rep = read_json("report.json");
  ASSERT_EQ(rep["records"].size(), 1u);
  EXPECT_EQ(rep["records"][0]["h"].get<double>(), 0.1);
  EXPECT_TRUE(rep["fits"].contains("error"));
  EXPECT_NE(rep["fits"]["error"].get<std::string>().find("4"), std::string::npos);
}

TEST_F(CliTest, UnknownConfigKeyFails) {
  const fs::path cfg = dir_ / "bad.cfg";
  std::ofstream(cfg) << "model.x_abs = 2\nmodel.not_a_key = 3\n";
  const auto r = run_cli("verify-symbols --config " + cfg.string() + " --out " + dir_.string());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("model.not_a_key"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find(":2"), std::string::npos) << r.output;
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const fs::path cfg = dir_ / "small.cfg";
  std::ofstream(cfg) << "bsymbols.nodes = 5\n";
  ASSERT_EQ(run_cli("verify-bsymbols --config " + cfg.string() + " --out " + dir_.string()).exit_code, 0);
  std::ifstream a(dir_ / "bsymbols.json");
  const std::string first((std::istreambuf_iterator<char>(a)), {});
  ASSERT_EQ(run_cli("verify-bsymbols --config " + cfg.string() + " --out " + dir_.string()).exit_code, 0);
  std::ifstream b(dir_ / "bsymbols.json");
  const std::string second((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(first, second);
}

TEST_F(CliTest, MissingSubcommandIsAnError) {
  EXPECT_NE(run_cli("").exit_code, 0);
  EXPECT_NE(run_cli("no-such-command").exit_code, 0);
}
