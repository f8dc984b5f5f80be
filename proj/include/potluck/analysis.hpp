#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "potluck/engine.hpp"
#include "potluck/potential.hpp"
#include "potluck/reward.hpp"

namespace potluck {

/// Paired sequences (a_k) and (b_k), k = 1..n, with b positive and
/// nondecreasing. Validated at construction.
class SeriesPair {
 public:
  SeriesPair(std::vector<double> a, std::vector<double> b);

  std::size_t size() const noexcept { return a_.size(); }
  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<double>& b() const noexcept { return b_; }

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Max over n of |LHS_n - RHS_n| for the summation-by-parts identity
///
///   (1/b_n) sum_{k<=n} a_k = C_n - (1/b_n) sum_{k<=n} C_{k-1} (b_k - b_{k-1}),
///
/// where C_n = sum_{k<=n} a_k / b_k, C_0 = 0 and b_0 = 0. Both sides are
/// accumulated with compensated summation.
double abel_identity_residual(const SeriesPair& s);

struct KroneckerDiagnostic {
  double c_tail_min = 0.0;  // range of C_n over the tail
  double c_tail_max = 0.0;
  double c_drift = 0.0;     // min C over the last half of the tail minus min over the first half
  double tail_min_avg = 0.0;  // tail minimum of (1/b_n) sum a_k
  bool hypothesis_holds = false;  // finite liminf of C_n, as far as the tail can tell
  bool consistent = false;
};

inline constexpr double kKroneckerTailFraction = 0.2;

/// Checks the conclusion "liminf (1/b_n) sum a_k <= 0" against the hypothesis
/// "liminf C_n is finite" on the last 20% of the series. The hypothesis is
/// taken to hold when the minimum of C_n moves by at most `eps` between the
/// two halves of the tail. Verdict: consistent iff the hypothesis fails or
/// the tail minimum is <= eps. Requires at least 100 terms.
KroneckerDiagnostic kronecker_check(const SeriesPair& s, double eps);

struct DecompositionReport {
  // Index k holds step n = k + 1.
  std::vector<double> gap_avg;        // G_n = (1/n) sum_{k<n} (f_{x_{k+1}}(bar_k) - q(bar_k))
  std::vector<double> telescope_avg;  // T_n = (1/n) sum_{k<n} (k+1)(Phi(hat_{k+1}) - Phi(hat_k))
  std::vector<double> remainder;      // R_n = T_n - G_n
  std::vector<double> envelope;       // 2 L ln(n+1) / n
  double lipschitz = 0.0;
  bool envelope_holds = false;        // |R_n| <= envelope for all n >= 10
  std::size_t first_violation = 0;    // 0 if none
  double telescoping_max_error = 0.0;
  bool telescoping_holds = false;     // within kTelescopeTol
};

inline constexpr double kTelescopeTol = 1e-10;
inline constexpr std::size_t kEnvelopeFrom = 10;

/// Splits the payoff gap of a fully recorded trajectory into the telescoping
/// potential term and the remainder, and checks the remainder against the
/// envelope 2 L ln(n+1) / n implied by a Lipschitz gradient with constant L.
/// Throws ConfigError unless the trajectory was recorded with stride 1.
DecompositionReport decompose_payoff_gap(const Trajectory& t, const RewardSystem& f,
                                         const Potential& phi, double lipschitz);

// CSV `n,G_n,T_n,R_n,envelope`.
std::string decomposition_csv(const DecompositionReport& r);

// max_i f_i(u) - q(u). Nonnegative up to rounding.
double greedy_gap(const RewardSystem& f, const DistPoint& u);

inline constexpr double kDefaultTailFraction = 0.5;

// Minimum over the final ceil(tail_fraction * size) entries.
double liminf_estimate(std::span<const double> series, double tail_fraction = kDefaultTailFraction);

}  // namespace potluck
