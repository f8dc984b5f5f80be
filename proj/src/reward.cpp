#include "potluck/reward.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "potluck/error.hpp"

namespace potluck {

namespace {

double q_raw(const RewardSystem& f, std::span<const double> u) {
  double q = 0.0;
  for (std::size_t i = 0; i < f.players(); ++i) {
    try {
      q += u[i] * f.exprs()[i].eval(u);
    } catch (const EvalError& e) {
      throw EvalError("reward f_" + std::to_string(i) + ": " + e.what());
    }
  }
  return q;
}

// Strictly better value, or equal value at a lexicographically smaller point.
bool improves(double value, std::span<const double> u, double best,
              std::span<const double> best_u) {
  if (value > best) return true;
  if (value < best) return false;
  return std::lexicographical_compare(u.begin(), u.end(), best_u.begin(), best_u.end());
}

struct Incumbent {
  double value;
  std::vector<double> u;

  void offer(double v, std::span<const double> point) {
    if (improves(v, point, value, u)) {
      value = v;
      u.assign(point.begin(), point.end());
    }
  }
};

// Visits every integer vector k of length d with k_j >= 0 and sum k <= steps.
void for_each_composition(std::size_t d, std::size_t steps,
                          const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> k(d, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t left) {
    if (j == d) {
      visit(k);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      k[j] = c;
      rec(j + 1, left - c);
    }
    k[j] = 0;
  };
  rec(0, steps);
}

}  // namespace

RewardSystem::RewardSystem(std::size_t d, std::vector<Expr> exprs) : d_(d), exprs_(std::move(exprs)) {
  if (exprs_.size() != d_ + 1) {
    std::ostringstream os;
    os << "reward system of dimension " << d_ << " needs " << d_ + 1 << " expressions, got "
       << exprs_.size();
    throw ValidationError(os.str());
  }
  const DistPoint center = DistPoint::uniform(d_);
  for (std::size_t i = 0; i < exprs_.size(); ++i) {
    if (exprs_[i].dim() != d_) {
      throw ValidationError("reward f_" + std::to_string(i) + " was parsed for dimension " +
                            std::to_string(exprs_[i].dim()) + ", expected " + std::to_string(d_));
    }
    (void)reward(*this, i, center);
  }
}

RewardSystem RewardSystem::from_strings(std::size_t d, const std::vector<std::string>& sources) {
  std::vector<Expr> exprs;
  exprs.reserve(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    try {
      exprs.push_back(parse(sources[i], d));
    } catch (const ParseError& e) {
      throw ParseError("reward f_" + std::to_string(i) + ": " + e.what(), e.offset());
    }
  }
  return RewardSystem(d, std::move(exprs));
}

double reward(const RewardSystem& f, PlayerIndex i, const DistPoint& u) {
  if (i > f.dim()) {
    throw ValidationError("player index " + std::to_string(i) + " out of range 0.." +
                          std::to_string(f.dim()));
  }
  try {
    return f.exprs()[i].eval(u);
  } catch (const EvalError& e) {
    throw EvalError("reward f_" + std::to_string(i) + ": " + e.what());
  }
}

double q_value(const RewardSystem& f, const DistPoint& u) {
  double q = 0.0;
  for (std::size_t i = 0; i < f.players(); ++i) q += u[i] * reward(f, i, u);
  return q;
}

double iid_payoff(const RewardSystem& f, const DistPoint& p) { return q_value(f, p); }

double simplex_grid_size(std::size_t d, std::size_t steps) {
  // C(steps + d, d) accumulated in floating point.
  double c = 1.0;
  for (std::size_t j = 1; j <= d; ++j) {
    c *= static_cast<double>(steps + j) / static_cast<double>(j);
  }
  return std::round(c);
}

QStarResult q_star(const RewardSystem& f, double resolution, int refine_iters) {
  if (!(resolution > 0.0 && resolution < 1.0)) {
    throw ConfigError("q_star: resolution must lie in (0, 1)");
  }
  if (refine_iters < 0) throw ConfigError("q_star: refine_iters must be >= 0");
  const std::size_t d = f.dim();
  if (d > 6) throw ConfigError("q_star: grid search supports d <= 6, got d = " + std::to_string(d));

  const auto steps = static_cast<std::size_t>(std::llround(1.0 / resolution));
  const double points = simplex_grid_size(d, steps);
  if (points > kQStarGridGuard) {
    std::ostringstream os;
    os << "q_star: grid of " << points << " points exceeds the limit of " << kQStarGridGuard
       << "; use a coarser resolution";
    throw ConfigError(os.str());
  }

  const double dn = static_cast<double>(steps);
  std::vector<double> u(d + 1);
  Incumbent best{-std::numeric_limits<double>::infinity(), {}};
  for_each_composition(d, steps, [&](const std::vector<std::size_t>& k) {
    std::size_t used = 0;
    for (std::size_t j = 0; j < d; ++j) {
      u[j + 1] = static_cast<double>(k[j]) / dn;
      used += k[j];
    }
    u[0] = static_cast<double>(steps - used) / dn;
    best.offer(q_raw(f, u), u);
  });

  double h = 1.0 / dn;
  if (d > 0 && refine_iters > 0) {
    constexpr int kHalfWidth = 10;
    const double local_points = std::pow(2.0 * kHalfWidth + 1.0, static_cast<double>(d));
    if (local_points > kQStarGridGuard) {
      throw ConfigError("q_star: local refinement grid exceeds the point limit; use refine = 0");
    }
    for (int round = 0; round < refine_iters; ++round) {
      const double fine = h / 10.0;
      const std::vector<double> center(best.u.begin() + 1, best.u.end());
      std::vector<int> offset(d, -kHalfWidth);
      for (;;) {
        double sum = 0.0;
        bool inside = true;
        for (std::size_t j = 0; j < d && inside; ++j) {
          const double v = center[j] + offset[j] * fine;
          if (v < 0.0 || v > 1.0) inside = false;
          u[j + 1] = v;
          sum += v;
        }
        if (inside && sum <= 1.0) {
          u[0] = 1.0 - sum;
          best.offer(q_raw(f, u), u);
        }
        std::size_t j = 0;
        while (j < d && offset[j] == kHalfWidth) offset[j++] = -kHalfWidth;
        if (j == d) break;
        ++offset[j];
      }
      h = fine;
    }
  }

  return QStarResult{best.value, DistPoint(best.u), h, d > 0 && refine_iters > 0};
}

}  // namespace potluck
