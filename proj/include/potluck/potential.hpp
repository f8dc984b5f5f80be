#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "potluck/expr.hpp"
#include "potluck/reward.hpp"
#include "potluck/simplex.hpp"

namespace potluck {

/// A scalar function on the solid simplex whose gradient is meant to match
/// the reward-difference field (f_i - f_0) at tilde(v).
///
/// Three backings: a tabulated antiderivative for d = 1 (built by
/// build_potential_1d), a user expression over u0..ud evaluated at tilde(v),
/// or an arbitrary callable. Immutable and cheap to copy.
class Potential {
 public:
  using Callable = std::function<double(const SimplexPoint&)>;

  static Potential from_expr(Expr e);
  static Potential from_callable(std::size_t d, Callable fn);
  // Tabulated 1-d potential: `values[k]` and `slopes[k]` at node k/(n-1).
  static Potential tabulated(std::vector<double> values, std::vector<double> slopes);

  double operator()(const SimplexPoint& v) const;

  std::size_t dim() const noexcept { return d_; }
  bool is_tabulated() const noexcept { return !values_.empty(); }
  // Node spacing of a tabulated potential, 0 otherwise.
  double node_spacing() const noexcept { return spacing_; }
  const std::vector<double>& node_values() const noexcept { return values_; }

  // Same potential shifted by a constant.
  Potential shifted(double c) const;

 private:
  Potential() = default;

  double eval_table(double x) const;

  std::size_t d_ = 0;
  Callable fn_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  double spacing_ = 0.0;
  double shift_ = 0.0;
};

// (f_i(tilde v) - f_0(tilde v)) for i = 1..d.
std::vector<double> gradient_field(const RewardSystem& f, const SimplexPoint& v);

inline constexpr std::size_t kDefaultPotentialNodes = 1001;
inline constexpr std::size_t kMinPotentialNodes = 101;

/// Phi(v) = integral_0^v (f_1 - f_0)(tilde t) dt for a two-player system,
/// normalized to Phi(0) = 0. Each cell is integrated with Simpson's rule on
/// its endpoints and midpoint (exact for cubic integrands); evaluation between
/// nodes is cubic Hermite on node values and the exact node derivatives.
Potential build_potential_1d(const RewardSystem& f, std::size_t nodes = kDefaultPotentialNodes);

/// Finite-difference gradient of phi minus gradient_field, per coordinate.
/// Central differences in the interior; second-order one-sided stencils
/// where a central stencil would leave the simplex. Throws ValidationError
/// if even a one-sided stencil of width 2h does not fit.
std::vector<double> grad_condition_residual(const RewardSystem& f, const Potential& phi,
                                            const SimplexPoint& v, double h);

struct IntegrabilityReport {
  std::size_t samples = 0;
  double h = 0.0;
  double max_asymmetry = 0.0;  // max |J_ij - J_ji| over i < j and sample points
  std::size_t worst_i = 0;     // 1-based coordinates of the worst pair
  std::size_t worst_j = 0;
  std::vector<double> worst_point;
};

/// Necessary condition for the field to be a gradient: estimates the
/// Jacobian of gradient_field at `samples` pseudo-random interior points
/// (fixed seed) by central differences and reports the largest asymmetry.
/// Requires d >= 2.
IntegrabilityReport check_integrability(const RewardSystem& f, std::size_t samples, double h);

}  // namespace potluck
