#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "potluck/expr.hpp"
#include "potluck/simplex.hpp"

namespace potluck {

/// The reward functions f_0..f_d, one expression per player, all defined
/// over the same (d+1)-point probability simplex.
class RewardSystem {
 public:
  // Takes ownership of d+1 parsed expressions and smoke-evaluates each at the
  // uniform distribution.
  RewardSystem(std::size_t d, std::vector<Expr> exprs);

  // Parses every source string under dimension d.
  static RewardSystem from_strings(std::size_t d, const std::vector<std::string>& sources);

  std::size_t dim() const noexcept { return d_; }
  std::size_t players() const noexcept { return exprs_.size(); }
  const std::vector<Expr>& exprs() const noexcept { return exprs_; }

 private:
  std::size_t d_;
  std::vector<Expr> exprs_;
};

// f_i(u). Evaluation errors are rethrown with the player index attached.
double reward(const RewardSystem& f, PlayerIndex i, const DistPoint& u);

// q(u) = sum_{i=0..d} u_i f_i(u).
double q_value(const RewardSystem& f, const DistPoint& u);

// Asymptotic payoff rate of the i.i.d.(p) strategy, which is q(p).
double iid_payoff(const RewardSystem& f, const DistPoint& p);

struct QStarResult {
  double value = 0.0;
  DistPoint argmax = DistPoint({1.0});
  double grid_resolution = 0.0;  // spacing of the finest grid probed
  bool refined = false;
};

inline constexpr double kDefaultQStarResolution = 1.0 / 200.0;
inline constexpr int kDefaultQStarRefine = 3;
inline constexpr double kQStarGridGuard = 1e8;

/// Maximizes q over the simplex: exhaustive sweep of the regular grid with
/// spacing 1/round(1/resolution), then `refine_iters` rounds of a local grid
/// ten times finer spanning one coarse cell around the incumbent.
///
/// Ties go to the lexicographically smallest point. Throws ConfigError when
/// a single sweep would exceed kQStarGridGuard points.
QStarResult q_star(const RewardSystem& f, double resolution = kDefaultQStarResolution,
                   int refine_iters = kDefaultQStarRefine);

// Number of points in the regular grid of spacing 1/steps over the
// d-dimensional solid simplex: C(steps + d, d). Returned as double since it
// may exceed 64 bits for absurd inputs.
double simplex_grid_size(std::size_t d, std::size_t steps);

}  // namespace potluck
