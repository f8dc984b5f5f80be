#include "scenario_file.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "potluck/csv.hpp"
#include "potluck/error.hpp"

namespace potluck::cli {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void schema_error(const std::string& msg) { throw ValidationError("scenario: " + msg); }

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing field \"") + key + "\"");
  return *it;
}

std::uint64_t as_count(const json& v, const char* what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    schema_error(std::string("\"") + what + "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double as_real(const json& v, const char* what) {
  if (!v.is_number()) schema_error(std::string("\"") + what + "\" must be a number");
  return v.get<double>();
}

std::vector<double> as_reals(const json& v, const char* what) {
  if (!v.is_array()) schema_error(std::string("\"") + what + "\" must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_real(x, what));
  return out;
}

std::vector<PlayerIndex> read_choices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open sequence file " + path.string());
  std::vector<PlayerIndex> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(first, last - first + 1);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok[0] == '-') {
      throw ValidationError("sequence file " + path.string() + ":" + std::to_string(lineno) +
                            ": expected a player index, got '" + tok + "'");
    }
    out.push_back(static_cast<PlayerIndex>(v));
  }
  return out;
}

Strategy parse_strategy(const json& spec, std::size_t d, const std::filesystem::path& base_dir) {
  if (!spec.is_object()) schema_error("\"strategy\" must be an object");
  const json& kind_v = require(spec, "kind");
  if (!kind_v.is_string()) schema_error("\"strategy.kind\" must be a string");
  const auto kind = kind_v.get<std::string>();
  if (kind == "greedy") return strategy::Greedy{};
  if (kind == "round_robin") return strategy::RoundRobin{};
  if (kind == "iid") return strategy::Iid{DistPoint(as_reals(require(spec, "p"), "strategy.p"))};
  if (kind == "constant") return strategy::Constant{as_count(require(spec, "i"), "strategy.i")};
  if (kind == "sequence") {
    const json& p = require(spec, "path");
    if (!p.is_string()) schema_error("\"strategy.path\" must be a string");
    std::filesystem::path path = p.get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    return strategy::Sequence{read_choices(path)};
  }
  (void)d;
  schema_error("unknown strategy kind \"" + kind + "\"");
}

WeightSequence parse_weights(const json& spec) {
  if (!spec.is_object()) schema_error("\"weights\" must be an object");
  const json& kind_v = require(spec, "kind");
  if (!kind_v.is_string()) schema_error("\"weights.kind\" must be a string");
  const auto kind = kind_v.get<std::string>();
  if (kind == "constant") {
    const double value = spec.contains("value") ? as_real(spec["value"], "weights.value") : 1.0;
    return WeightSequence(weights::Constant{value});
  }
  if (kind == "power") return WeightSequence(weights::Power{as_real(require(spec, "theta"), "weights.theta")});
  if (kind == "geometric") return WeightSequence(weights::Geometric{as_real(require(spec, "r"), "weights.r")});
  if (kind == "custom") return WeightSequence(weights::Custom{as_reals(require(spec, "values"), "weights.values")});
  schema_error("unknown weights kind \"" + kind + "\"");
}

json strategy_json(const Strategy& s) {
  return std::visit(overloaded{
                        [](const strategy::Greedy&) { return json{{"kind", "greedy"}}; },
                        [](const strategy::RoundRobin&) { return json{{"kind", "round_robin"}}; },
                        [](const strategy::Iid& k) {
                          return json{{"kind", "iid"},
                                      {"p", std::vector<double>(k.p.weights().begin(), k.p.weights().end())}};
                        },
                        [](const strategy::Constant& k) { return json{{"kind", "constant"}, {"i", k.player}}; },
                        [](const strategy::Sequence& k) { return json{{"kind", "sequence"}, {"choices", k.choices}}; },
                    },
                    s);
}

json weights_json(const WeightSequence& w) {
  return std::visit(overloaded{
                        [](const weights::Constant& k) { return json{{"kind", "constant"}, {"value", k.value}}; },
                        [](const weights::Power& k) { return json{{"kind", "power"}, {"theta", k.theta}}; },
                        [](const weights::Geometric& k) { return json{{"kind", "geometric"}, {"r", k.ratio}}; },
                        [](const weights::Custom& k) { return json{{"kind", "custom"}, {"values", k.values}}; },
                    },
                    w.kind());
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const WeightReport& r) {
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return json{
      {"horizon", r.horizon},
      {"min_delta", finite_or_null(r.min_delta)},
      {"S_half", finite_or_null(r.s_half)},
      {"S_horizon", finite_or_null(r.s_horizon)},
      {"log_S_half", finite_or_null(r.log_s_half)},
      {"log_S_horizon", finite_or_null(r.log_s_horizon)},
      {"tail_max_ratio", finite_or_null(r.tail_max_ratio)},
      {"tail_trend", to_string(r.tail_trend)},
      {"nonnegative", r.nonnegative},
      {"diverges", r.diverges},
      {"vanishing_ratio", r.vanishing_ratio},
      {"verdict", r.passed() ? "pass" : "fail"},
  };
}

void refresh_canonical(LoadedScenario& ls) {
  const Scenario& sc = ls.scenario;
  json rewards = json::array();
  for (const auto& e : sc.rewards.exprs()) rewards.push_back(to_string(e));
  const DistPoint x0 = sc.x0.value_or(DistPoint::uniform(sc.rewards.dim()));
  json c{
      {"d", sc.rewards.dim()},
      {"rewards", std::move(rewards)},
      {"strategy", strategy_json(sc.strategy)},
      {"horizon", sc.horizon},
      {"x0", std::vector<double>(x0.weights().begin(), x0.weights().end())},
      {"x0_explicit", sc.x0.has_value()},
      {"seed", sc.seed},
      {"weights", sc.weights ? weights_json(*sc.weights) : json(nullptr)},
      {"record_stride", effective_stride(sc)},
  };
  ls.hash = fnv1a_hex(c.dump());
  ls.canonical = std::move(c);
}

LoadedScenario load_scenario_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) schema_error("top level must be an object");
  const std::size_t d = as_count(require(doc, "d"), "d");
  if (d > 9) schema_error("\"d\" must be at most 9 (variables u0..u9)");

  const json& rewards_v = require(doc, "rewards");
  if (!rewards_v.is_array()) schema_error("\"rewards\" must be an array of expression strings");
  std::vector<std::string> sources;
  for (const auto& r : rewards_v) {
    if (!r.is_string()) schema_error("\"rewards\" entries must be strings");
    sources.push_back(r.get<std::string>());
  }
  if (sources.size() != d + 1) {
    schema_error("\"rewards\" has " + std::to_string(sources.size()) + " entries, expected d+1 = " +
                 std::to_string(d + 1));
  }

  Scenario sc{
      RewardSystem::from_strings(d, sources),
      parse_strategy(require(doc, "strategy"), d, base_dir),
      as_count(require(doc, "horizon"), "horizon"),
      std::nullopt,
      doc.contains("seed") ? as_count(doc["seed"], "seed") : 0,
      std::nullopt,
      std::nullopt,
  };
  if (sc.horizon < 1) schema_error("\"horizon\" must be >= 1");
  validate_strategy(sc.strategy, d);
  if (doc.contains("x0") && !doc["x0"].is_null()) {
    DistPoint x0(as_reals(doc["x0"], "x0"));
    if (x0.dim() != d) schema_error("\"x0\" must have d+1 = " + std::to_string(d + 1) + " entries");
    sc.x0 = std::move(x0);
  }
  if (doc.contains("weights") && !doc["weights"].is_null()) sc.weights = parse_weights(doc["weights"]);
  if (doc.contains("record_stride") && !doc["record_stride"].is_null()) {
    const auto stride = as_count(doc["record_stride"], "record_stride");
    if (stride < 1) schema_error("\"record_stride\" must be >= 1");
    sc.record_stride = stride;
  }

  LoadedScenario ls{std::move(sc), {}, {}};
  refresh_canonical(ls);
  return ls;
}

LoadedScenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error("json_parse", path.string() + ": " + e.what());
  }
  return load_scenario_json(doc, path.parent_path());
}

}  // namespace potluck::cli
