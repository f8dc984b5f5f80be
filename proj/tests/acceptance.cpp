// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "potluck/analysis.hpp"
#include "potluck/engine.hpp"
#include "potluck/potential.hpp"
#include "potluck/reward.hpp"
#include "support.hpp"

namespace {

using namespace potluck;
namespace fs = std::filesystem;
using nlohmann::json;

// a = 1, b = 2 unless stated otherwise.
const RewardSystem kLinear = RewardSystem::from_strings(1, {"1*u1", "2*(1-u1)"});

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records one inequality into the outcome and its detail line.
void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [violated]");
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Scenario scenario(const RewardSystem& f, Strategy s, std::size_t horizon, std::uint64_t seed = 0) {
  return Scenario{f, std::move(s), horizon, std::nullopt, seed, std::nullopt, std::nullopt};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "potluck_acceptance";
  fs::create_directories(dir);
  return dir;
}

fs::path write_linear_scenario(const std::string& name, const json& strategy, std::size_t horizon) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << json{{"d", 1},
                           {"rewards", {"1*u1", "2*(1-u1)"}},
                           {"strategy", strategy},
                           {"horizon", horizon},
                           {"seed", 42}}
                          .dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome ac1() {
  Outcome o;
  const Trajectory t = run(scenario(kLinear, strategy::Greedy{}, 200000));
  const double bar1 = t.bar_final[1];
  require(o, std::abs(bar1 - 2.0 / 3.0) < 5e-3, "|bar_1 - 2/3| = " + num(std::abs(bar1 - 2.0 / 3.0)) + " < 5e-3");
  require(o, std::abs(t.avg_final - 2.0 / 3.0) < 1e-2,
          "|A - 2/3| = " + num(std::abs(t.avg_final - 2.0 / 3.0)) + " < 1e-2");
  return o;
}

Outcome ac2() {
  Outcome o;
  const Trajectory t = run(scenario(kLinear, strategy::Iid{DistPoint({0.5, 0.5})}, 200000, 42));
  require(o, std::abs(t.avg_final - 0.75) < 1e-2, "|A - 0.75| = " + num(std::abs(t.avg_final - 0.75)) + " < 1e-2");
  return o;
}

Outcome ac3() {
  Outcome o;
  const auto f = RewardSystem::from_strings(1, {"1*u1", "1*(1-u1)"});
  const double qstar = q_star(f).value;
  const Trajectory t = run(scenario(f, strategy::Greedy{}, 200000));
  require(o, std::abs(qstar - 0.5) < 2e-5, "Q* = " + num(qstar));
  require(o, std::abs(t.avg_final - 0.5) < 1e-2, "|A - 0.5| = " + num(std::abs(t.avg_final - 0.5)) + " < 1e-2");
  return o;
}

Outcome ac4() {
  Outcome o;
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::cmd_qstar({write_linear_scenario("ac4.json", {{"kind", "greedy"}}, 10), 1.0 / 200.0, 3},
                                  out, err);
  require(o, code == cli::kExitOk, "exit " + std::to_string(code));
  if (code != cli::kExitOk) return o;
  const json res = json::parse(out.str());
  const double value = res["q_star"].get<double>();
  const double hat_u = res["argmax"][1].get<double>();
  require(o, std::abs(value - 0.75) <= 2e-5, "|Q* - 3/4| = " + num(std::abs(value - 0.75)) + " <= 2e-5");
  require(o, std::abs(hat_u - 0.5) <= 1e-4, "|argmax - 1/2| = " + num(std::abs(hat_u - 0.5)) + " <= 1e-4");
  return o;
}

Outcome ac5() {
  Outcome o;
  const double a = 1.0;
  const double b = 2.0;
  const Potential phi = build_potential_1d(kLinear, 1001);
  double node_err = 0.0;
  for (std::size_t k = 0; k < phi.node_values().size(); ++k) {
    const double v = static_cast<double>(k) / 1000.0;
    node_err = std::max(node_err, std::abs(phi.node_values()[k] - (b * v - (a + b) * v * v / 2.0)));
  }
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double residual = 0.0;
  for (int s = 0; s < 50; ++s) {
    residual = std::max(residual, std::abs(grad_condition_residual(kLinear, phi, SimplexPoint({unif(gen)}), 1e-5)[0]));
  }
  require(o, node_err <= 1e-10, "node error " + num(node_err) + " <= 1e-10");
  require(o, residual <= 1e-6, "residual " + num(residual) + " <= 1e-6");
  return o;
}

// Random strategy of the given kind for dimension d.
Strategy random_strategy(int kind, std::size_t d, std::size_t horizon, std::mt19937_64& gen) {
  switch (kind) {
    case 0:
      return strategy::Greedy{};
    case 1:
      return strategy::RoundRobin{};
    case 2:
      return strategy::Iid{testing::random_dist(d, gen)};
    case 3:
      return strategy::Constant{std::uniform_int_distribution<std::size_t>(0, d)(gen)};
    default: {
      std::uniform_int_distribution<std::size_t> pick(0, d);
      strategy::Sequence s;
      s.choices.resize(horizon);
      for (auto& c : s.choices) c = pick(gen);
      return s;
    }
  }
}

Outcome ac6() {
  Outcome o;
  std::mt19937_64 gen(6);
  const std::size_t horizon = 50000;
  double worst = -INFINITY;
  int failures = 0;
  for (int s = 0; s < 50; ++s) {
    const std::size_t d = 1 + s % 3;
    const auto f = testing::random_polynomial_system(d, 3, gen);
    const Trajectory t = run(scenario(f, random_strategy(s % 5, d, horizon, gen), horizon, s));
    std::vector<double> avg;
    for (const auto& r : t.records)
      if (r.n >= horizon / 2) avg.push_back(r.running_avg);
    const double excess = liminf_estimate(avg, 1.0) - q_star(f).value;
    worst = std::max(worst, excess);
    if (!(excess <= 0.05)) ++failures;
  }
  require(o, failures == 0, "max(tail min A - Q*) = " + num(worst) + " <= 0.05 over 50 scenarios");
  return o;
}

Outcome ac7() {
  Outcome o;
  std::mt19937_64 gen(7);
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const std::size_t d = 1 + s % 3;
    const auto f = testing::random_polynomial_system(d, 3, gen);
    const PlayerIndex i = std::uniform_int_distribution<std::size_t>(0, d)(gen);
    for (const Strategy& st : {Strategy{strategy::Constant{i}}, Strategy{strategy::RoundRobin{}}}) {
      const Trajectory t = run(scenario(f, st, 100000));
      worst = std::max(worst, std::abs(t.avg_final - q_value(f, t.bar_final)));
    }
  }
  require(o, worst < 2e-3, "max |A - q(bar_final)| = " + num(worst) + " < 2e-3");
  return o;
}

Outcome ac8() {
  Outcome o;
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> a(-1.0, 1.0);
  std::uniform_real_distribution<double> step(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(1, 10000);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const std::size_t n = len(gen);
    std::vector<double> av(n);
    std::vector<double> bv(n);
    double b = 1e-2;
    for (std::size_t k = 0; k < n; ++k) {
      av[k] = a(gen);
      bv[k] = b += step(gen);
    }
    worst = std::max(worst, abel_identity_residual(SeriesPair(std::move(av), std::move(bv))));
  }
  require(o, worst < 1e-10, "max residual " + num(worst) + " < 1e-10");
  return o;
}

Outcome ac9() {
  Outcome o;
  std::ostringstream out;
  std::ostringstream err;
  const int alt_code = cli::cmd_kronecker({"alternating", {}, 100000, 1e-4}, out, err);
  const json alt = json::parse(out.str());
  out.str("");
  const int harm_code = cli::cmd_kronecker({"harmonic", {}, 100000, 1e-4}, out, err);
  const json harm = json::parse(out.str());
  const double lo = alt["C_tail_min"].get<double>();
  const double hi = alt["C_tail_max"].get<double>();
  const double tail_min = alt["tail_min_avg"].get<double>();
  require(o, alt_code == cli::kExitOk && harm_code == cli::kExitOk, "exit codes 0");
  require(o, lo >= 0.690 && hi <= 0.697, "C_tail in [" + num(lo) + ", " + num(hi) + "]");
  require(o, tail_min <= 1e-4, "tail_min " + num(tail_min) + " <= 1e-4");
  require(o, !harm["hypothesis_holds"].get<bool>(), "harmonic hypothesis violation reported");
  return o;
}

Outcome ac10() {
  Outcome o;
  const Trajectory t = run(scenario(kLinear, strategy::Greedy{}, 10000));
  const Potential phi = Potential::from_expr(parse("2*u1 - 1.5*u1^2", 1));
  const DecompositionReport r = decompose_payoff_gap(t, kLinear, phi, 3.0);
  // Independent recheck of the envelope against the report's own remainder.
  double worst_ratio = 0.0;
  for (std::size_t k = kEnvelopeFrom - 1; k < r.remainder.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    worst_ratio = std::max(worst_ratio, std::abs(r.remainder[k]) / (6.0 * std::log(n + 1.0) / n));
  }
  require(o, r.envelope_holds && worst_ratio <= 1.0, "max |R_n| / envelope = " + num(worst_ratio) + " <= 1");
  require(o, r.telescoping_holds, "telescoping error " + num(r.telescoping_max_error) + " <= 1e-10");
  return o;
}

Outcome ac11() {
  Outcome o;
  Scenario sc = scenario(kLinear, strategy::Greedy{}, 200000);
  const double uniform = run(sc).avg_final;
  sc.weights = WeightSequence(weights::Power{0.5});
  const double weighted = run_weighted(sc).avg_final;
  require(o, std::abs(weighted - uniform) < 1e-2 && std::abs(weighted - 2.0 / 3.0) < 1e-2,
          "sqrt weights A = " + num(weighted) + " vs uniform " + num(uniform));
  const WeightReport rep = validate_weights(WeightSequence(weights::Geometric{2.0}), 200000);
  require(o, !rep.passed(), "geometric r = 2 rejected");
  require(o, rep.tail_max_ratio >= 0.45 && rep.tail_max_ratio <= 0.55,
          "tail ratio " + num(rep.tail_max_ratio) + " in [0.45, 0.55]");
  return o;
}

Outcome ac12() {
  Outcome o;
  const fs::path dir = scratch_dir();
  for (const json& strat : {json{{"kind", "greedy"}}, json{{"kind", "iid"}, {"p", {0.3, 0.7}}}}) {
    const fs::path sc = write_linear_scenario("ac12.json", strat, 50000);
    std::ostringstream out;
    std::ostringstream err;
    const int c1 = cli::cmd_run({sc, dir / "first.csv", false}, out, err);
    const int c2 = cli::cmd_run({sc, dir / "second.csv", false}, out, err);
    const bool same = c1 == cli::kExitOk && c2 == cli::kExitOk && slurp(dir / "first.csv") == slurp(dir / "second.csv");
    require(o, same, strat["kind"].get<std::string>() + " CSVs byte-identical");
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 greedy sub-optimality", ac1},        {"AC2 optimal iid payoff", ac2},
      {"AC3 symmetric greedy optimal", ac3},     {"AC4 Q* grid", ac4},
      {"AC5 potential construction", ac5},       {"AC6 payoff bound property", ac6},
      {"AC7 convergent-strategy limit", ac7},    {"AC8 Abel identity", ac8},
      {"AC9 Kronecker presets", ac9},            {"AC10 remainder envelope", ac10},
      {"AC11 weighted equivalence", ac11},       {"AC12 determinism", ac12},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    failed += !o.pass;
  }
  std::error_code ec;
  fs::remove_all(fs::temp_directory_path() / "potluck_acceptance", ec);
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
