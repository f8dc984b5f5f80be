#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "scenario_file.hpp"

namespace potluck::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("potluck_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  fs::path scenario(const std::string& name, const json& doc) const { return write(name, doc.dump()); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  static json linear(const json& strategy, std::size_t horizon) {
    return {{"d", 1}, {"rewards", {"1*u1", "2*(1-u1)"}}, {"strategy", strategy}, {"horizon", horizon}, {"seed", 42}};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

// Last data row of a trajectory CSV, split on commas.
std::vector<std::string> last_row(const std::string& csv) {
  std::string body = csv.substr(0, csv.size() - 1);
  std::stringstream row(body.substr(body.rfind('\n') + 1));
  std::vector<std::string> cells;
  for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
  return cells;
}

TEST_F(Cli, RunLinearGreedy) {
  const auto sc = scenario("s.json", linear({{"kind", "greedy"}}, 20000));
  ASSERT_EQ(cmd_run({sc, dir_ / "out" / "t.csv", false}, out_, err_), kExitOk) << err_.str();
  const std::string csv = slurp(dir_ / "out" / "t.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,choice,reward,running_avg,S_n,bar_0,bar_1");
  const auto row = last_row(csv);
  ASSERT_EQ(row.size(), 7u);
  EXPECT_EQ(row[0], "20000");
  EXPECT_NEAR(std::stod(row[3]), 2.0 / 3.0, 1e-2);

  const json res = json::parse(out_.str());
  EXPECT_NEAR(res["A_final"].get<double>(), 2.0 / 3.0, 1e-2);
  const json meta = json::parse(slurp(dir_ / "out" / "t.csv.meta.json"));
  for (const char* key : {"tool", "version", "scenario_hash", "seed", "generator", "wall_time_s", "weight_validation"}) {
    EXPECT_TRUE(meta["metadata"].contains(key) || meta.contains(key)) << key;
  }
}

TEST_F(Cli, RunIsByteDeterministic) {
  const auto sc = scenario("s.json", linear({{"kind", "iid"}, {"p", {0.3, 0.7}}}, 5000));
  ASSERT_EQ(cmd_run({sc, dir_ / "a.csv", false}, out_, err_), kExitOk);
  ASSERT_EQ(cmd_run({sc, dir_ / "b.csv", false}, out_, err_), kExitOk);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
}

TEST_F(Cli, MalformedJsonIsRuntimeError) {
  const auto sc = write("bad.json", "{\"d\": 1, \"rewards\": [");
  EXPECT_EQ(cmd_run({sc, dir_ / "t.csv", false}, out_, err_), kExitError);
  EXPECT_NE(err_.str().find("json_parse"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(dir_ / "t.csv"));
}

TEST_F(Cli, MissingFileIsRuntimeError) {
  EXPECT_EQ(cmd_qstar({dir_ / "absent.json"}, out_, err_), kExitError);
}

TEST_F(Cli, SchemaViolationIsRejected) {
  json doc = linear({{"kind", "greedy"}}, 100);
  doc["rewards"] = {"u0"};
  EXPECT_EQ(cmd_run({scenario("s.json", doc), dir_ / "t.csv", false}, out_, err_), kExitRejected);
  doc = linear({{"kind", "teleport"}}, 100);
  EXPECT_EQ(cmd_run({scenario("s.json", doc), dir_ / "t.csv", false}, out_, err_), kExitRejected);
}

TEST_F(Cli, GeometricWeightsNeedForce) {
  json doc = linear({{"kind", "greedy"}}, 1000);
  doc["weights"] = {{"kind", "geometric"}, {"r", 2.0}};
  const auto sc = scenario("s.json", doc);
  EXPECT_EQ(cmd_run({sc, dir_ / "t.csv", false}, out_, err_), kExitRejected);
  const std::string e = err_.str();
  const json verdict = json::parse(e.substr(e.find('{'), e.rfind('}') - e.find('{') + 1));
  ASSERT_TRUE(verdict.contains("weight_validation"));
  EXPECT_EQ(verdict["weight_validation"]["verdict"], "fail");
  EXPECT_NEAR(verdict["weight_validation"]["tail_max_ratio"].get<double>(), 0.5, 0.05);
  EXPECT_FALSE(fs::exists(dir_ / "t.csv"));
}

TEST_F(Cli, QStarLinear) {
  const auto sc = scenario("s.json", linear({{"kind", "greedy"}}, 10));
  ASSERT_EQ(cmd_qstar({sc, 1.0 / 200.0, 3}, out_, err_), kExitOk) << err_.str();
  const json res = json::parse(out_.str());
  EXPECT_NEAR(res["q_star"].get<double>(), 0.75, 2e-5);
  EXPECT_NEAR(res["argmax"][1].get<double>(), 0.5, 1e-4);
  EXPECT_DOUBLE_EQ(res["resolution"].get<double>(), 1.0 / 200.0);
}

TEST_F(Cli, QStarConstantAndVertex) {
  json doc = linear({{"kind", "greedy"}}, 10);
  doc["rewards"] = {"3", "3"};
  ASSERT_EQ(cmd_qstar({scenario("c.json", doc)}, out_, err_), kExitOk);
  EXPECT_NEAR(json::parse(out_.str())["q_star"].get<double>(), 3.0, 1e-15);
  out_.str("");
  doc = {{"d", 2}, {"rewards", {"u0", "u1", "u2"}}, {"strategy", {{"kind", "greedy"}}}, {"horizon", 10}, {"seed", 0}};
  ASSERT_EQ(cmd_qstar({scenario("v.json", doc)}, out_, err_), kExitOk);
  const json res = json::parse(out_.str());
  EXPECT_NEAR(res["q_star"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(res["argmax"], json({0.0, 0.0, 1.0}));
}

TEST_F(Cli, QStarGridGuard) {
  json doc = {{"d", 6}, {"rewards", std::vector<std::string>(7, "1")}, {"strategy", {{"kind", "greedy"}}},
              {"horizon", 10}, {"seed", 0}};
  EXPECT_EQ(cmd_qstar({scenario("s.json", doc), 1e-3, 0}, out_, err_), kExitRejected);
}

TEST_F(Cli, CheckPotential) {
  const auto sc = scenario("s.json", linear({{"kind", "greedy"}}, 10));
  ASSERT_EQ(cmd_check_potential({sc}, out_, err_), kExitOk) << err_.str();
  EXPECT_LT(json::parse(out_.str())["max_residual"].get<double>(), 1e-6);
  out_.str("");
  const json curl = {{"d", 2}, {"rewards", {"0", "u2", "0"}}, {"strategy", {{"kind", "greedy"}}},
                     {"horizon", 10}, {"seed", 0}};
  EXPECT_EQ(cmd_check_potential({scenario("c.json", curl)}, out_, err_), kExitRejected);
  EXPECT_EQ(json::parse(out_.str())["mode"], "integrability");
}

TEST_F(Cli, KroneckerPresets) {
  ASSERT_EQ(cmd_kronecker({"alternating", {}, 100000, 1e-4}, out_, err_), kExitOk);
  json res = json::parse(out_.str());
  EXPECT_GE(res["C_tail_min"].get<double>(), 0.690);
  EXPECT_LE(res["C_tail_max"].get<double>(), 0.697);
  EXPECT_LT(res["abel_residual"].get<double>(), 1e-10);
  out_.str("");
  ASSERT_EQ(cmd_kronecker({"harmonic", {}, 100000, 1e-4}, out_, err_), kExitOk);
  res = json::parse(out_.str());
  EXPECT_FALSE(res["hypothesis_holds"].get<bool>());
  EXPECT_EQ(res["verdict"], "consistent");
  EXPECT_EQ(cmd_kronecker({"fibonacci", {}, 1000, 1e-4}, out_, err_), kExitRejected);
}

TEST_F(Cli, KroneckerCustomFile) {
  std::string csv = "a,b\n";
  for (int k = 1; k <= 500; ++k) csv += (k % 2 ? "1," : "-1,") + std::to_string(k) + "\n";
  ASSERT_EQ(cmd_kronecker({"custom", write("s.csv", csv), 0, 1e-4}, out_, err_), kExitOk) << err_.str();
  EXPECT_EQ(json::parse(out_.str())["n"], 500);
}

TEST_F(Cli, SweepLinearIidPeaksAtHalf) {
  const auto sc = scenario("s.json", linear({{"kind", "iid"}, {"p", {0.5, 0.5}}}, 100000));
  ASSERT_EQ(cmd_sweep({sc, "strategy.p", "0:1:21", dir_ / "sweep", false}, out_, err_), kExitOk) << err_.str();
  const json res = json::parse(out_.str());
  EXPECT_EQ(res["runs"], 21);
  EXPECT_NEAR(res["best_value"].get<double>(), 0.5, 0.05 + 1e-12);
  EXPECT_NEAR(res["best_A_final"].get<double>(), 0.75, 1e-2);
  const std::string csv = slurp(dir_ / "sweep" / "summary.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "p,A_final,q(p)");
  EXPECT_TRUE(fs::exists(dir_ / "sweep" / "summary.csv.meta.json"));
}

TEST_F(Cli, SweepIsThreadCountIndependent) {
  const auto sc = scenario("s.json", linear({{"kind", "iid"}, {"p", {0.5, 0.5}}}, 2000));
  ::setenv("POTLUCK_THREADS", "1", 1);
  ASSERT_EQ(cmd_sweep({sc, "strategy.p", "0:1:9", dir_ / "one", false}, out_, err_), kExitOk);
  ::setenv("POTLUCK_THREADS", "4", 1);
  ASSERT_EQ(cmd_sweep({sc, "strategy.p", "0:1:9", dir_ / "four", false}, out_, err_), kExitOk);
  ::unsetenv("POTLUCK_THREADS");
  EXPECT_EQ(slurp(dir_ / "one" / "summary.csv"), slurp(dir_ / "four" / "summary.csv"));
}

TEST_F(Cli, SinglePointSweepMatchesRun) {
  const auto sc = scenario("s.json", linear({{"kind", "iid"}, {"p", {0.4, 0.6}}}, 3000));
  ASSERT_EQ(cmd_sweep({sc, "strategy.p", "0.6", dir_ / "sweep", false}, out_, err_), kExitOk);
  const double swept = json::parse(out_.str())["best_A_final"].get<double>();
  out_.str("");
  ASSERT_EQ(cmd_run({sc, dir_ / "t.csv", false}, out_, err_), kExitOk);
  EXPECT_EQ(swept, json::parse(out_.str())["A_final"].get<double>());
}

TEST_F(Cli, SweepWeightedLimitsAgree) {
  const auto sc = scenario("s.json", linear({{"kind", "greedy"}}, 100000));
  ASSERT_EQ(cmd_sweep({sc, "weights.theta", "0:0.5:2", dir_ / "sweep", false}, out_, err_), kExitOk) << err_.str();
  std::stringstream csv(slurp(dir_ / "sweep" / "summary.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "value,A_final,q(bar_final)");
  std::vector<double> a;
  while (std::getline(csv, line)) a.push_back(std::stod(line.substr(line.find(',') + 1)));
  ASSERT_EQ(a.size(), 2u);
  EXPECT_NEAR(a[0], a[1], 1e-2);
}

TEST_F(Cli, SweepRejectsUnknownParameter) {
  const auto sc = scenario("s.json", linear({{"kind", "greedy"}}, 100));
  EXPECT_EQ(cmd_sweep({sc, "strategy.q", "0:1:3", dir_ / "sweep", false}, out_, err_), kExitRejected);
  EXPECT_NE(err_.str().find("strategy.q"), std::string::npos);
}

TEST(ParseGrid, Forms) {
  EXPECT_EQ(parse_grid("0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(parse_grid("0.25"), (std::vector<double>{0.25}));
  EXPECT_EQ(parse_grid("2:2:1"), (std::vector<double>{2.0}));
}

TEST(ScenarioHash, ChangesIffSemanticFieldChanges) {
  json doc = {{"d", 1}, {"rewards", {"1*u1", "2*(1-u1)"}}, {"strategy", {{"kind", "greedy"}}},
              {"horizon", 100}, {"seed", 1}};
  const std::string h = load_scenario_json(doc, ".").hash;
  json spaced = doc;
  spaced["rewards"] = {"1 * u1", "2*( 1 - u1 )"};
  EXPECT_EQ(load_scenario_json(spaced, ".").hash, h);
  json stride = doc;
  stride["record_stride"] = 1;
  EXPECT_EQ(load_scenario_json(stride, ".").hash, h);
  for (auto [key, value] : {std::pair<std::string, json>{"seed", 2}, {"horizon", 101}, {"x0", {0.25, 0.75}}}) {
    json other = doc;
    other[key] = value;
    EXPECT_NE(load_scenario_json(other, ".").hash, h) << key;
  }
  json other = doc;
  other["rewards"][0] = "1*u0";
  EXPECT_NE(load_scenario_json(other, ".").hash, h);
}

}  // namespace
}  // namespace potluck::cli
