#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(FRACSURF_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fracsurf_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string scenario(const json& doc, const std::string& name = "scenario.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump();
    return p.string();
  }

  std::string slurp(const std::string& name) {
    std::ifstream in(dir_ / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

json circle_curvature() {
  return {{"surface", {{"type", "circle"}, {"center", {0, 0}}, {"radius", 1}}},
          {"points", {{1, 0}}},
          {"s", 0.25},
          {"forms", {"Volume", "Flux"}}};
}

json disk_perimeter() {
  return {{"solid", {{"type", "ball"}, {"center", {0, 0}}, {"radius", 1}}},
          {"s", {0.1, 0.25}},
          {"samples", 20000},
          {"seed", 3}};
}

}  // namespace

TEST_F(CliTest, CurvatureRecords) {
  const CliRun r = run("curvature --scenario " + scenario(circle_curvature()));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    EXPECT_EQ(j["command"], "curvature");
    EXPECT_TRUE(j.contains("config_hash"));
    EXPECT_TRUE(j.contains("version"));
    EXPECT_LT(j["value"].get<double>(), 0.0);
    ++count;
  }
  EXPECT_EQ(count, 2);
}

TEST_F(CliTest, SOutOfRangeIsInputError) {
  json doc = circle_curvature();
  doc["s"] = 0.6;
  const CliRun r = run("curvature --scenario " + scenario(doc));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("'s'"), std::string::npos) << r.out;
}

TEST_F(CliTest, InputErrors) {
  EXPECT_EQ(run("curvature --scenario " + (dir_ / "missing.json").string()).code, 2);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_EQ(run("curvature --scenario " + (dir_ / "broken.json").string()).code, 2);
  json doc = circle_curvature();
  doc["surface"]["type"] = "ellipse";
  const CliRun r = run("curvature --scenario " + scenario(doc));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("surface.type"), std::string::npos) << r.out;
  EXPECT_EQ(run("perimeter --scenario " + scenario(disk_perimeter()) + " --format xml").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(CliTest, PerimeterNeedsSeed) {
  json doc = disk_perimeter();
  doc.erase("seed");
  const CliRun r = run("perimeter --scenario " + scenario(doc));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("seed"), std::string::npos);
}

TEST_F(CliTest, BoundaryZoneRejected) {
  const json doc = {{"surface", {{"type", "arc"}, {"center", {0, 0}}, {"radius", 1}, {"angle_start", 0},
                                 {"angle_end", 3.141592653589793}}},
                    {"points", {{1, 0}}},
                    {"s", 0.25}};
  EXPECT_EQ(run("curvature --scenario " + scenario(doc)).code, 2);
}

TEST_F(CliTest, NonConvergenceExitCode) {
  json doc = circle_curvature();
  doc["config"] = {{"error_cap", 1e-300}};
  EXPECT_EQ(run("curvature --scenario " + scenario(doc)).code, 3);
}

TEST_F(CliTest, DeterministicAcrossWorkers) {
  const std::string sc = scenario(disk_perimeter());
  ASSERT_EQ(run("perimeter --scenario " + sc + " --workers 1 --out " + (dir_ / "w1.jsonl").string()).code, 0);
  ASSERT_EQ(run("perimeter --scenario " + sc + " --workers 4 --out " + (dir_ / "w4.jsonl").string()).code, 0);
  const std::string a = slurp("w1.jsonl"), b = slurp("w4.jsonl");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

TEST_F(CliTest, SeedOverride) {
  const std::string sc = scenario(disk_perimeter());
  const CliRun a = run("perimeter --scenario " + sc);
  const CliRun b = run("perimeter --scenario " + sc + " --seed 3");
  const CliRun c = run("perimeter --scenario " + sc + " --seed 4");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, CsvOutput) {
  const CliRun r = run("perimeter --scenario " + scenario(disk_perimeter()) + " --format csv");
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header.rfind("command,quantity,", 0), 0u) << header;
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 4);  // 2 s values x 2 methods
}

TEST_F(CliTest, ValidateDetectsCorruptedFixture) {
  const fs::path fx = dir_ / "fx";
  fs::create_directories(fx);
  const fs::path src = fs::path(FRACSURF_FIXTURE_DIR) / "disk_mean_curvature_s025.json";
  json doc = json::parse(std::ifstream(src));
  std::ofstream(fx / "good.json") << doc.dump();
  EXPECT_EQ(run("validate --fixtures " + fx.string()).code, 0);
  doc["oracle_value"] = doc["oracle_value"].get<double>() * 1.01;
  std::ofstream(fx / "bad.json") << doc.dump();
  const CliRun r = run("validate --fixtures " + fx.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("fixture failed"), std::string::npos);
}

TEST_F(CliTest, ValidateSignComparison) {
  const fs::path fx = dir_ / "fx";
  fs::create_directories(fx);
  json doc = json::parse(std::ifstream(fs::path(FRACSURF_FIXTURE_DIR) / "disk_mean_curvature_sign_s025.json"));
  doc["oracle_value"] = -doc["oracle_value"].get<double>();
  doc["oracle_params"]["tolerance"] = 100.0;
  std::ofstream(fx / "flipped.json") << doc.dump();
  EXPECT_EQ(run("validate --fixtures " + fx.string()).code, 1);
}

TEST_F(CliTest, SweepFinalRecord) {
  const json doc = {{"quantity", "mean_curvature"},
                    {"surface", {{"type", "circle"}, {"center", {0, 0}}, {"radius", 2}}},
                    {"point", {2, 0}},
                    {"s", {0.3, 0.4, 0.45, 0.49}}};
  const CliRun r = run("sweep --scenario " + scenario(doc));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream lines(r.out);
  std::string line, last;
  int count = 0;
  while (std::getline(lines, line)) last = line, ++count;
  EXPECT_EQ(count, 5);
  const json j = json::parse(last);
  EXPECT_NEAR(j["limit"].get<double>(), -0.5, 0.01);
  EXPECT_EQ(j["target"].get<double>(), -0.5);
}

TEST_F(CliTest, DiagnosticNormalSign) {
  const json doc = {{"quantity", "normal_sign"},
                    {"surface", {{"type", "polyline"}, {"vertices", {{-2, 0}, {2, 0}, {2, 0.5}, {-2, 0.5}}}}},
                    {"point", {0, 0}},
                    {"probes", {{0, 0.5}, {1, 0}}},
                    {"s", 0.25}};
  const CliRun r = run("diagnostic --scenario " + scenario(doc));
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) EXPECT_EQ(json::parse(line)["value"].get<int>(), 1);
}
