#include "potluck/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "compensated_sum.hpp"
#include "potluck/csv.hpp"

namespace potluck {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using detail::CompensatedSum;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

void check_scenario(const Scenario& sc) {
  const std::size_t d = sc.rewards.dim();
  if (sc.horizon < 1) throw ConfigError("scenario: horizon must be >= 1");
  if (sc.record_stride && *sc.record_stride < 1) throw ConfigError("scenario: record_stride must be >= 1");
  if (sc.x0 && sc.x0->dim() != d) {
    throw ValidationError("scenario: x0 has " + std::to_string(sc.x0->size()) +
                          " weights, expected " + std::to_string(d + 1));
  }
  validate_strategy(sc.strategy, d);
}

double step_reward(const RewardSystem& f, PlayerIndex i, const DistPoint& bar, std::size_t n) {
  try {
    return reward(f, i, bar);
  } catch (const EvalError& e) {
    throw EvalError("step " + std::to_string(n) + ": " + e.what());
  }
}

PlayerIndex step_choice(const Scenario& sc, std::size_t n, const DistPoint& bar, Rng& rng) {
  try {
    return choose(sc.strategy, n, bar, sc.rewards, rng);
  } catch (const EvalError& e) {
    throw EvalError("step " + std::to_string(n) + ": " + e.what());
  }
}

void check_running_average(double avg, double recomputed, std::size_t n) {
  if (std::abs(avg - recomputed) > 1e-10 * std::max(1.0, std::abs(recomputed))) {
    std::ostringstream os;
    os.precision(17);
    os << "running average drifted at step " << n << ": incremental " << avg << " vs recomputed "
       << recomputed;
    throw Error("internal", os.str());
  }
}

}  // namespace

WeightSequence::WeightSequence(Kind kind) : kind_(std::move(kind)) {
  std::visit(overloaded{
                 [](const weights::Constant& c) {
                   if (!std::isfinite(c.value)) throw ConfigError("constant weights: value must be finite");
                 },
                 [](const weights::Power& p) {
                   if (!std::isfinite(p.theta)) throw ConfigError("power weights: theta must be finite");
                 },
                 [](const weights::Geometric& g) {
                   if (!(g.ratio > 0.0) || !std::isfinite(g.ratio)) {
                     throw ConfigError("geometric weights: ratio must be positive and finite");
                   }
                 },
                 [](const weights::Custom& c) {
                   if (c.values.empty()) throw ConfigError("custom weights: list is empty");
                 },
             },
             kind_);
}

double WeightSequence::delta(std::size_t n) const {
  if (n == 0) throw ValidationError("weights are indexed from n = 1");
  const double dn = static_cast<double>(n);
  return std::visit(overloaded{
                        [](const weights::Constant& c) { return c.value; },
                        [&](const weights::Power& p) { return std::pow(dn, p.theta); },
                        [&](const weights::Geometric& g) { return std::pow(g.ratio, dn); },
                        [&](const weights::Custom& c) {
                          if (n > c.values.size()) {
                            throw ConfigError("custom weights cover " + std::to_string(c.values.size()) +
                                              " steps, step " + std::to_string(n) + " requested");
                          }
                          return c.values[n - 1];
                        },
                    },
                    kind_);
}

double WeightSequence::log_delta(std::size_t n) const {
  const double dn = static_cast<double>(n);
  auto log_of = [](double x) {
    if (x == 0.0) return kNegInf;
    if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::log(x);
  };
  return std::visit(overloaded{
                        [&](const weights::Constant& c) { return log_of(c.value); },
                        [&](const weights::Power& p) { return p.theta * std::log(dn); },
                        [&](const weights::Geometric& g) { return dn * std::log(g.ratio); },
                        [&](const weights::Custom&) { return log_of(delta(n)); },
                    },
                    kind_);
}

std::string WeightSequence::name() const {
  return std::visit(overloaded{
                        [](const weights::Constant&) { return std::string("constant"); },
                        [](const weights::Power&) { return std::string("power"); },
                        [](const weights::Geometric&) { return std::string("geometric"); },
                        [](const weights::Custom&) { return std::string("custom"); },
                    },
                    kind_);
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::Decreasing: return "decreasing";
    case Trend::Increasing: return "increasing";
    default: return "flat";
  }
}

WeightReport validate_weights(const WeightSequence& w, std::size_t horizon) {
  if (horizon < 100) throw ConfigError("validate_weights: horizon must be >= 100");
  WeightReport rep;
  rep.horizon = horizon;
  rep.min_delta = std::numeric_limits<double>::infinity();

  const std::size_t half = horizon / 2;
  const std::size_t tail_len = (horizon + 9) / 10;
  const std::size_t tail_first = horizon - tail_len + 1;

  double s = 0.0;
  double log_s = kNegInf;
  bool any_negative = false;
  rep.tail_max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= horizon; ++n) {
    const double delta = w.delta(n);
    rep.min_delta = std::min(rep.min_delta, delta);
    s += delta;
    double ratio = 0.0;
    if (delta < 0.0 || any_negative) {
      any_negative = true;
      ratio = s != 0.0 ? delta / s : std::numeric_limits<double>::quiet_NaN();
    } else {
      const double log_delta = w.log_delta(n);
      log_s = log_add(log_s, log_delta);
      ratio = log_s == kNegInf ? std::numeric_limits<double>::quiet_NaN()
                               : std::exp(log_delta - log_s);
    }
    if (n == half) {
      rep.s_half = s;
      rep.log_s_half = log_s;
    }
    if (n >= tail_first) {
      if (n == tail_first) rep.tail_start_ratio = ratio;
      rep.tail_end_ratio = ratio;
      if (!(ratio <= rep.tail_max_ratio)) rep.tail_max_ratio = ratio;  // NaN-sticky
    }
  }
  rep.s_horizon = s;
  rep.log_s_horizon = log_s;

  rep.nonnegative = !any_negative && rep.min_delta >= 0.0;
  rep.diverges = rep.nonnegative && rep.log_s_horizon > kNegInf &&
                 rep.log_s_horizon - rep.log_s_half > std::log1p(kWeightGrowthRelTol);

  const double scale = std::max(std::abs(rep.tail_start_ratio), std::numeric_limits<double>::min());
  const double change = (rep.tail_end_ratio - rep.tail_start_ratio) / scale;
  if (change < -kWeightTrendRelTol) {
    rep.tail_trend = Trend::Decreasing;
  } else if (change > kWeightTrendRelTol) {
    rep.tail_trend = Trend::Increasing;
  } else {
    rep.tail_trend = Trend::Flat;
  }
  rep.vanishing_ratio = rep.nonnegative && std::isfinite(rep.tail_max_ratio) &&
                        rep.tail_trend == Trend::Decreasing &&
                        rep.tail_max_ratio <= kWeightTailRatioMax;
  return rep;
}

WeightRejected::WeightRejected(WeightReport report)
    : Error("weights_rejected",
            [&] {
              std::ostringstream os;
              os << "weight sequence rejected:";
              if (!report.nonnegative) os << " negative weight (min " << report.min_delta << ");";
              if (!report.diverges) os << " S_n does not grow;";
              if (!report.vanishing_ratio) {
                os << " Delta_n/S_n does not vanish (tail max " << report.tail_max_ratio << ", "
                   << to_string(report.tail_trend) << ");";
              }
              os << " pass --force to run anyway";
              return os.str();
            }()),
      report_(std::move(report)) {}

std::size_t effective_stride(const Scenario& sc) {
  if (sc.record_stride) return *sc.record_stride;
  if (sc.horizon <= kFullRecordLimit) return 1;
  return (sc.horizon + kFullRecordLimit - 1) / kFullRecordLimit;
}

Trajectory run(const Scenario& sc) {
  if (sc.weights) throw ConfigError("run: scenario has weights; use run_weighted");
  check_scenario(sc);
  const RewardSystem& f = sc.rewards;
  const std::size_t stride = effective_stride(sc);

  Trajectory t;
  t.d = f.dim();
  t.stride = stride;
  t.horizon = sc.horizon;
  t.x0 = sc.x0.value_or(DistPoint::uniform(f.dim()));
  t.records.reserve(sc.horizon / stride + 1);

  Rng rng(sc.seed);
  DistPoint bar = t.x0;
  double avg = 0.0;
  CompensatedSum total;
  for (std::size_t n = 1; n <= sc.horizon; ++n) {
    const PlayerIndex i = step_choice(sc, n, bar, rng);
    const double r = step_reward(f, i, bar, n);
    DistPoint next = update_empirical(bar, i, n);
    avg += (r - avg) / static_cast<double>(n);
    total.add(r);
    if (n % stride == 0 || n == sc.horizon) {
      check_running_average(avg, total.value() / static_cast<double>(n), n);
      t.records.push_back(StepRecord{n, i, std::move(bar), r, avg, static_cast<double>(n)});
    }
    bar = std::move(next);
  }
  t.bar_final = std::move(bar);
  t.avg_final = avg;
  t.s_final = static_cast<double>(sc.horizon);
  return t;
}

Trajectory run_weighted(const Scenario& sc, bool force) {
  if (!sc.weights) throw ConfigError("run_weighted: scenario has no weights");
  check_scenario(sc);
  const RewardSystem& f = sc.rewards;
  const WeightSequence& w = *sc.weights;

  WeightReport report = validate_weights(w, std::max<std::size_t>(sc.horizon, 100));
  if (!report.passed() && !force) throw WeightRejected(report);
  if (w.delta(1) == 0.0 && !sc.x0) {
    throw ConfigError("run_weighted: Delta_1 = 0 leaves the weighted state undefined at the first "
                      "step; supply x0");
  }

  const std::size_t stride = effective_stride(sc);
  Trajectory t;
  t.d = f.dim();
  t.stride = stride;
  t.horizon = sc.horizon;
  t.x0 = sc.x0.value_or(DistPoint::uniform(f.dim()));
  t.weight_report = std::move(report);
  t.records.reserve(sc.horizon / stride + 1);

  Rng rng(sc.seed);
  DistPoint bar = t.x0;
  double avg = 0.0;
  double s = 0.0;
  CompensatedSum total;
  for (std::size_t n = 1; n <= sc.horizon; ++n) {
    const PlayerIndex i = step_choice(sc, n, bar, rng);
    const double r = step_reward(f, i, bar, n);
    const double delta = w.delta(n);
    if (!(delta >= 0.0) || !std::isfinite(delta)) {
      throw Error("weights", "weight Delta_" + std::to_string(n) + " = " + format_real(delta) +
                                 " is negative or not finite");
    }
    s += delta;
    if (!std::isfinite(s)) {
      throw Error("weights", "cumulative weight overflowed at step " + std::to_string(n));
    }
    DistPoint next = bar;
    if (s > 0.0) {
      next = weighted_update_empirical(bar, i, delta, s);
      avg += ((r - avg) * delta) / s;
    }
    total.add(delta * r);
    if (n % stride == 0 || n == sc.horizon) {
      if (s > 0.0) check_running_average(avg, total.value() / s, n);
      t.records.push_back(StepRecord{n, i, std::move(bar), r, avg, s});
    }
    bar = std::move(next);
  }
  t.bar_final = std::move(bar);
  t.avg_final = avg;
  t.s_final = s;
  return t;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "n,choice,reward,running_avg,S_n";
  for (std::size_t j = 0; j <= t.d; ++j) out += ",bar_" + std::to_string(j);
  out += '\n';
  for (const auto& rec : t.records) {
    out += std::to_string(rec.n);
    out += ',';
    out += std::to_string(rec.choice);
    out += ',';
    out += format_real(rec.reward);
    out += ',';
    out += format_real(rec.running_avg);
    out += ',';
    out += format_real(rec.s_n);
    for (double x : rec.bar_before.weights()) {
      out += ',';
      out += format_real(x);
    }
    out += '\n';
  }
  return out;
}

}  // namespace potluck
