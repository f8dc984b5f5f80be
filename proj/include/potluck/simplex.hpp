#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace potluck {

// Absolute slack applied to the simplex constraints (coordinate bounds and
// the sum-to-one condition). Points are validated, never re-normalized.
inline constexpr double kSimplexTol = 1e-12;

using PlayerIndex = std::size_t;

/// A probability vector (u_0, ..., u_d) over the d+1 players.
///
/// Construction validates: every weight lies in [0, 1] and the weights sum
/// to one, both within kSimplexTol. An invalid vector throws ValidationError
/// naming the offending coordinate.
class DistPoint {
 public:
  explicit DistPoint(std::vector<double> weights);

  static DistPoint uniform(std::size_t d);

  // Number of free coordinates; the point has d+1 weights.
  std::size_t dim() const noexcept { return weights_.size() - 1; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const DistPoint&, const DistPoint&) = default;

 private:
  std::vector<double> weights_;
};

/// A point (v_1, ..., v_d) of the solid simplex {v in [0,1]^d : sum v <= 1}.
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  std::vector<double> coords_;
};

// v -> (1 - sum v, v_1, ..., v_d).
DistPoint tilde(const SimplexPoint& v);

// u -> (u_1, ..., u_d).
SimplexPoint hat(const DistPoint& u);

// Point mass on player i in dimension d.
DistPoint vertex(PlayerIndex i, std::size_t d);

/// Streaming empirical-frequency update for the n-th observation (n >= 1):
/// bar + (e_i - bar) / n. At n = 1 the previous state is erased entirely.
DistPoint update_empirical(const DistPoint& bar, PlayerIndex i, std::size_t n);

/// Weighted update: bar + (e_i - bar) * delta_n / s_n, where s_n already
/// includes delta_n. With delta_n == 1 and s_n == n this is bit-identical to
/// update_empirical.
DistPoint weighted_update_empirical(const DistPoint& bar, PlayerIndex i, double delta_n,
                                    double s_n);

std::string to_string(const DistPoint& u);

}  // namespace potluck
