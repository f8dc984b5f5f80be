#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "potluck/analysis.hpp"
#include "potluck/csv.hpp"
#include "potluck/engine.hpp"
#include "potluck/error.hpp"
#include "potluck/potential.hpp"
#include "potluck/reward.hpp"
#include "potluck/rng.hpp"
#include "scenario_file.hpp"

#ifndef POTLUCK_VERSION
#define POTLUCK_VERSION "dev"
#endif

namespace potluck::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void report_error(std::ostream& err, const std::string& code, const std::string& msg) {
  err << "potluck: error[" << code << "]: " << msg << '\n';
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const WeightRejected& e) {
    report_error(err, e.code(), e.what());
    err << json{{"weight_validation", to_json(e.report())}}.dump() << '\n';
    return kExitRejected;
  } catch (const ValidationError& e) {
    report_error(err, e.code(), e.what());
    return kExitRejected;
  } catch (const ConfigError& e) {
    report_error(err, e.code(), e.what());
    return kExitRejected;
  } catch (const Error& e) {
    report_error(err, e.code(), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    report_error(err, "runtime", e.what());
    return kExitError;
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json metadata(const std::string& hash, std::uint64_t seed, double wall_time,
              const std::optional<WeightReport>& weights) {
  return json{
      {"tool", "potluck"},
      {"version", POTLUCK_VERSION},
      {"scenario_hash", hash},
      {"seed", seed},
      {"generator", std::string(Rng::kName)},
      {"wall_time_s", wall_time},
      {"weight_validation", weights ? to_json(*weights) : json(nullptr)},
  };
}

std::vector<double> weights_of(const DistPoint& u) { return {u.weights().begin(), u.weights().end()}; }

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

Trajectory simulate(const Scenario& sc, bool force) {
  return sc.weights ? run_weighted(sc, force) : run(sc);
}

SeriesPair read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open series file " + path.string());
  std::vector<double> a;
  std::vector<double> b;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string sa;
    std::string sb;
    std::getline(row, sa, ',');
    std::getline(row, sb);
    try {
      std::size_t ua = 0;
      std::size_t ub = 0;
      const double va = std::stod(sa, &ua);
      const double vb = std::stod(sb, &ub);
      a.push_back(va);
      b.push_back(vb);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 'a,b' numbers");
    }
  }
  return SeriesPair(std::move(a), std::move(b));
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("grid: cannot parse '" + s + "' in '" + spec + "'");
    return v;
  };
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) return {number(spec)};
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ValidationError("grid: expected lo:hi:count, got '" + spec + "'");
  const double lo = number(spec.substr(0, c1));
  const double hi = number(spec.substr(c1 + 1, c2 - c1 - 1));
  const double count_d = number(spec.substr(c2 + 1));
  if (count_d < 1 || count_d != std::floor(count_d)) throw ValidationError("grid: count must be a positive integer");
  const auto count = static_cast<std::size_t>(count_d);
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    out[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  out.back() = hi;
  return out;
}

std::size_t sweep_threads() {
  if (const char* env = std::getenv("POTLUCK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const LoadedScenario ls = load_scenario(opt.scenario);
    const Trajectory t = simulate(ls.scenario, opt.force);

    ensure_parent(opt.out);
    write_file_atomic(opt.out, trajectory_csv(t));
    json meta = metadata(ls.hash, ls.scenario.seed, seconds_since(start), t.weight_report);
    meta["forced"] = opt.force;
    meta["horizon"] = t.horizon;
    meta["record_stride"] = t.stride;
    meta["bar_final"] = weights_of(t.bar_final);
    meta["A_final"] = t.avg_final;
    meta["S_final"] = t.s_final;
    meta["scenario"] = ls.canonical;
    auto sidecar = opt.out;
    sidecar += ".meta.json";
    write_file_atomic(sidecar, meta.dump(2) + "\n");

    out << json{{"A_final", t.avg_final},
                {"bar_final", weights_of(t.bar_final)},
                {"horizon", t.horizon},
                {"trajectory", opt.out.string()},
                {"metadata", sidecar.string()}}
               .dump()
        << '\n';
    if (t.weight_report && !t.weight_report->passed()) {
      err << "potluck: warning: weight sequence failed validation, ran with --force\n";
    }
    return kExitOk;
  });
}

int cmd_qstar(const QStarOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const LoadedScenario ls = load_scenario(opt.scenario);
    const QStarResult r = q_star(ls.scenario.rewards, opt.resolution, opt.refine);
    out << json{{"q_star", r.value},
                {"argmax", weights_of(r.argmax)},
                {"resolution", opt.resolution},
                {"grid_resolution", r.grid_resolution},
                {"refined", r.refined},
                {"metadata", metadata(ls.hash, ls.scenario.seed, seconds_since(start), std::nullopt)}}
               .dump()
        << '\n';
    return kExitOk;
  });
}

int cmd_check_potential(const CheckPotentialOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const LoadedScenario ls = load_scenario(opt.scenario);
    const RewardSystem& f = ls.scenario.rewards;
    json result;
    bool pass = false;
    if (f.dim() == 0) throw ConfigError("check-potential: a single player has no gradient condition");
    if (f.dim() == 1) {
      const Potential phi = build_potential_1d(f, opt.nodes);
      Rng rng(ls.scenario.seed);
      double worst = 0.0;
      double worst_v = 0.0;
      for (std::size_t s = 0; s < opt.samples; ++s) {
        const double v = rng.uniform();
        const double r = std::abs(grad_condition_residual(f, phi, SimplexPoint({v}), opt.h)[0]);
        if (r >= worst) {
          worst = r;
          worst_v = v;
        }
      }
      pass = worst < opt.threshold;
      result = json{{"mode", "potential_1d"},
                    {"nodes", opt.nodes},
                    {"h", opt.h},
                    {"samples", opt.samples},
                    {"max_residual", worst},
                    {"worst_v", worst_v},
                    {"phi_at_1", phi(SimplexPoint({1.0}))}};
    } else {
      const IntegrabilityReport rep = check_integrability(f, opt.samples, opt.h);
      pass = rep.max_asymmetry < opt.threshold;
      result = json{{"mode", "integrability"},
                    {"h", rep.h},
                    {"samples", rep.samples},
                    {"max_asymmetry", rep.max_asymmetry},
                    {"worst_pair", {rep.worst_i, rep.worst_j}},
                    {"worst_point", rep.worst_point}};
    }
    result["threshold"] = opt.threshold;
    result["pass"] = pass;
    result["metadata"] = metadata(ls.hash, ls.scenario.seed, seconds_since(start), std::nullopt);
    out << result.dump() << '\n';
    return pass ? kExitOk : kExitRejected;
  });
}

int cmd_kronecker(const KroneckerOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    std::vector<double> a;
    std::vector<double> b;
    std::string source = opt.preset;
    auto build = [&](auto term) {
      a.resize(opt.length);
      b.resize(opt.length);
      for (std::size_t k = 1; k <= opt.length; ++k) {
        a[k - 1] = term(k);
        b[k - 1] = static_cast<double>(k);
      }
      return SeriesPair(std::move(a), std::move(b));
    };
    const SeriesPair series = [&] {
      if (opt.preset == "alternating") return build([](std::size_t k) { return k % 2 == 1 ? 1.0 : -1.0; });
      if (opt.preset == "harmonic") return build([](std::size_t) { return 1.0; });
      if (opt.preset == "custom") {
        if (opt.path.empty()) throw ValidationError("kronecker: --preset custom needs --path");
        source = opt.path.string();
        return read_series_csv(opt.path);
      }
      throw ValidationError("kronecker: unknown preset '" + opt.preset + "'");
    }();

    const double residual = abel_identity_residual(series);
    const KroneckerDiagnostic diag = kronecker_check(series, opt.eps);
    const bool ok = diag.consistent && residual < 1e-10;
    json meta = metadata(fnv1a_hex(source + ":" + std::to_string(series.size())), 0,
                         seconds_since(start), std::nullopt);
    out << json{{"preset", opt.preset},
                {"n", series.size()},
                {"eps", opt.eps},
                {"abel_residual", residual},
                {"C_tail_min", diag.c_tail_min},
                {"C_tail_max", diag.c_tail_max},
                {"C_drift", diag.c_drift},
                {"tail_min_avg", diag.tail_min_avg},
                {"hypothesis_holds", diag.hypothesis_holds},
                {"verdict", diag.consistent ? "consistent" : "inconsistent"},
                {"metadata", meta}}
               .dump()
        << '\n';
    return ok ? kExitOk : kExitRejected;
  });
}

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const std::vector<double> values = parse_grid(opt.grid);
    const LoadedScenario base = load_scenario(opt.scenario);
    const std::size_t d = base.scenario.rewards.dim();

    static const std::vector<std::string> kParams{"strategy.p", "weights.theta", "weights.r", "horizon"};
    if (std::find(kParams.begin(), kParams.end(), opt.param) == kParams.end()) {
      throw ValidationError("sweep: unknown parameter path '" + opt.param +
                            "' (known: strategy.p, weights.theta, weights.r, horizon)");
    }
    if (opt.param == "strategy.p" && d != 1) {
      throw ValidationError("sweep: strategy.p sets iid weights (1-p, p) and needs d = 1");
    }

    auto configure = [&](std::size_t j) {
      Scenario sc = base.scenario;
      const double v = values[j];
      if (opt.param == "strategy.p") {
        sc.strategy = strategy::Iid{DistPoint({1.0 - v, v})};
      } else if (opt.param == "weights.theta") {
        sc.weights = WeightSequence(weights::Power{v});
      } else if (opt.param == "weights.r") {
        sc.weights = WeightSequence(weights::Geometric{v});
      } else {
        if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError("sweep: horizon values must be positive integers");
        sc.horizon = static_cast<std::size_t>(v);
      }
      sc.seed = base.scenario.seed + j;
      sc.record_stride = sc.horizon;
      return sc;
    };

    struct Row {
      double a_final = 0.0;
      double q = 0.0;
    };
    std::vector<Row> rows(values.size());
    std::vector<std::exception_ptr> failures(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t j = next++; j < values.size(); j = next++) {
        try {
          const Scenario sc = configure(j);
          const Trajectory t = simulate(sc, opt.force);
          const double q = opt.param == "strategy.p"
                               ? q_value(sc.rewards, std::get<strategy::Iid>(sc.strategy).p)
                               : q_value(sc.rewards, t.bar_final);
          rows[j] = Row{t.avg_final, q};
        } catch (...) {
          failures[j] = std::current_exception();
        }
      }
    };
    {
      const std::size_t n_threads = std::min(sweep_threads(), values.size());
      std::vector<std::jthread> pool;
      for (std::size_t w = 1; w < n_threads; ++w) pool.emplace_back(worker);
      worker();
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);

    const bool is_p = opt.param == "strategy.p";
    std::string csv = is_p ? "p,A_final,q(p)\n" : "value,A_final,q(bar_final)\n";
    std::size_t best = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      csv += format_real(values[j]) + "," + format_real(rows[j].a_final) + "," + format_real(rows[j].q) + "\n";
      if (rows[j].a_final > rows[best].a_final) best = j;
    }
    std::filesystem::create_directories(opt.out_dir);
    const auto summary = opt.out_dir / "summary.csv";
    write_file_atomic(summary, csv);
    json meta = metadata(base.hash, base.scenario.seed, seconds_since(start), std::nullopt);
    meta["param"] = opt.param;
    meta["grid"] = opt.grid;
    meta["seed_rule"] = "seed + index";
    meta["forced"] = opt.force;
    meta["scenario"] = base.canonical;
    auto sidecar = summary;
    sidecar += ".meta.json";
    write_file_atomic(sidecar, meta.dump(2) + "\n");

    out << json{{"param", opt.param},
                {"runs", values.size()},
                {"best_value", values[best]},
                {"best_A_final", rows[best].a_final},
                {"summary", summary.string()}}
               .dump()
        << '\n';
    return kExitOk;
  });
}

}  // namespace potluck::cli
