#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "potluck/error.hpp"
#include "potluck/reward.hpp"
#include "potluck/simplex.hpp"
#include "potluck/strategy.hpp"

namespace potluck {

namespace weights {

struct Constant {
  double value = 1.0;
};

// Delta_n = n^theta.
struct Power {
  double theta = 0.0;
};

// Delta_n = r^n.
struct Geometric {
  double ratio = 1.0;
};

// Delta_n = values[n-1]; the sequence must cover the horizon.
struct Custom {
  std::vector<double> values;
};

}  // namespace weights

/// Weight sequence (Delta_n)_{n >= 1} for the weighted game.
class WeightSequence {
 public:
  using Kind = std::variant<weights::Constant, weights::Power, weights::Geometric, weights::Custom>;

  explicit WeightSequence(Kind kind);

  double delta(std::size_t n) const;
  // log(Delta_n); -inf when Delta_n == 0. Finite for geometric weights far
  // past the point where Delta_n itself overflows.
  double log_delta(std::size_t n) const;

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;

 private:
  Kind kind_;
};

enum class Trend { Decreasing, Flat, Increasing };
std::string to_string(Trend t);

/// Finite-horizon evidence for the three conditions on a weight sequence:
/// Delta_n >= 0, S_n -> infinity, Delta_n / S_n -> 0.
struct WeightReport {
  std::size_t horizon = 0;
  double min_delta = 0.0;
  double s_half = 0.0;      // S at horizon/2
  double s_horizon = 0.0;   // S at horizon (may be +inf on overflow)
  double log_s_half = 0.0;
  double log_s_horizon = 0.0;
  double tail_max_ratio = 0.0;  // max Delta_n / S_n over the last 10% of steps
  double tail_start_ratio = 0.0;
  double tail_end_ratio = 0.0;
  Trend tail_trend = Trend::Flat;
  bool nonnegative = false;
  bool diverges = false;
  bool vanishing_ratio = false;

  bool passed() const noexcept { return nonnegative && diverges && vanishing_ratio; }
};

// Thresholds applied by validate_weights.
inline constexpr double kWeightGrowthRelTol = 1e-3;
inline constexpr double kWeightTailRatioMax = 0.1;
inline constexpr double kWeightTrendRelTol = 1e-6;

WeightReport validate_weights(const WeightSequence& w, std::size_t horizon);

struct Scenario {
  RewardSystem rewards;
  Strategy strategy;
  std::size_t horizon = 1;
  std::optional<DistPoint> x0;  // uniform when absent
  std::uint64_t seed = 0;
  std::optional<WeightSequence> weights;
  std::optional<std::size_t> record_stride;
};

inline constexpr std::size_t kFullRecordLimit = 100000;

// Stride used when the scenario leaves it unset: 1 up to kFullRecordLimit
// steps, otherwise ceil(horizon / kFullRecordLimit).
std::size_t effective_stride(const Scenario& sc);

struct StepRecord {
  std::size_t n = 0;
  PlayerIndex choice = 0;
  DistPoint bar_before = DistPoint({1.0});
  double reward = 0.0;
  double running_avg = 0.0;
  double s_n = 0.0;
};

struct Trajectory {
  std::size_t d = 0;
  std::size_t stride = 1;
  std::vector<StepRecord> records;
  DistPoint x0 = DistPoint({1.0});
  DistPoint bar_final = DistPoint({1.0});
  double avg_final = 0.0;
  double s_final = 0.0;
  std::size_t horizon = 0;
  std::optional<WeightReport> weight_report;  // weighted runs only
};

/// Uniform-weight simulation. For n = 1..horizon: choose from the state
/// before the play, collect f_i(bar_{n-1}), then update the state and the
/// running average. Throws if the scenario carries weights.
Trajectory run(const Scenario& sc);

/// Weighted simulation. Rejects weights that fail validate_weights unless
/// `force` is set; the report is attached to the trajectory either way.
Trajectory run_weighted(const Scenario& sc, bool force = false);

// CSV with header `n,choice,reward,running_avg,S_n,bar_0,...,bar_d`, one row
// per record. The bar columns hold the state before the play at step n.
std::string trajectory_csv(const Trajectory& t);

// Rejected weight sequence; carries the report.
class WeightRejected : public Error {
 public:
  explicit WeightRejected(WeightReport report);
  const WeightReport& report() const noexcept { return report_; }

 private:
  WeightReport report_;
};

}  // namespace potluck
