#include "potluck/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "compensated_sum.hpp"
#include "potluck/csv.hpp"
#include "potluck/error.hpp"

namespace potluck {

namespace {

using detail::CompensatedSum;

double min_of(std::span<const double> xs) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::min(m, x);
  return m;
}

}  // namespace

SeriesPair::SeriesPair(std::vector<double> a, std::vector<double> b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty()) throw ValidationError("SeriesPair: series must be nonempty");
  if (a_.size() != b_.size()) throw ValidationError("SeriesPair: a and b differ in length");
  for (std::size_t k = 0; k < b_.size(); ++k) {
    if (!std::isfinite(a_[k]) || !std::isfinite(b_[k])) {
      throw ValidationError("SeriesPair: non-finite entry at k = " + std::to_string(k + 1));
    }
    if (!(b_[k] > 0.0)) {
      throw ValidationError("SeriesPair: b_" + std::to_string(k + 1) + " = " + format_real(b_[k]) +
                            " is not positive");
    }
    if (k > 0 && b_[k] < b_[k - 1]) {
      throw ValidationError("SeriesPair: b decreases at k = " + std::to_string(k + 1));
    }
  }
}

double abel_identity_residual(const SeriesPair& s) {
  const auto& a = s.a();
  const auto& b = s.b();
  CompensatedSum sum_a;
  CompensatedSum c;
  CompensatedSum weighted;  // sum C_{k-1} (b_k - b_{k-1})
  double prev_b = 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    weighted.add(c.value() * (b[k] - prev_b));
    c.add(a[k] / b[k]);
    sum_a.add(a[k]);
    const double lhs = sum_a.value() / b[k];
    const double rhs = c.value() - weighted.value() / b[k];
    worst = std::max(worst, std::abs(lhs - rhs));
    prev_b = b[k];
  }
  return worst;
}

KroneckerDiagnostic kronecker_check(const SeriesPair& s, double eps) {
  const std::size_t n = s.size();
  if (n < 100) throw ValidationError("kronecker_check: needs at least 100 terms");
  std::vector<double> c(n);
  std::vector<double> avg(n);
  CompensatedSum c_sum;
  CompensatedSum a_sum;
  for (std::size_t k = 0; k < n; ++k) {
    c_sum.add(s.a()[k] / s.b()[k]);
    a_sum.add(s.a()[k]);
    c[k] = c_sum.value();
    avg[k] = a_sum.value() / s.b()[k];
  }

  const auto tail = static_cast<std::size_t>(std::ceil(kKroneckerTailFraction * static_cast<double>(n)));
  const std::size_t first = n - tail;
  const std::size_t mid = first + tail / 2;
  std::span<const double> c_view(c);
  std::span<const double> avg_view(avg);

  KroneckerDiagnostic out;
  const auto c_tail = c_view.subspan(first);
  const auto [lo, hi] = std::minmax_element(c_tail.begin(), c_tail.end());
  out.c_tail_min = *lo;
  out.c_tail_max = *hi;
  out.c_drift = min_of(c_view.subspan(mid)) - min_of(c_view.subspan(first, mid - first));
  out.tail_min_avg = min_of(avg_view.subspan(first));
  out.hypothesis_holds = std::isfinite(out.c_drift) && std::abs(out.c_drift) <= eps;
  out.consistent = !out.hypothesis_holds || out.tail_min_avg <= eps;
  return out;
}

DecompositionReport decompose_payoff_gap(const Trajectory& t, const RewardSystem& f,
                                         const Potential& phi, double lipschitz) {
  if (t.stride != 1 || t.records.size() != t.horizon) {
    throw ConfigError("decompose_payoff_gap: needs a full trajectory recorded with stride 1");
  }
  if (t.weight_report) throw ConfigError("decompose_payoff_gap: weighted trajectories are not supported");
  if (phi.dim() != f.dim() || t.d != f.dim()) {
    throw ValidationError("decompose_payoff_gap: trajectory, rewards and potential dimensions differ");
  }
  if (!(lipschitz >= 0.0)) throw ValidationError("decompose_payoff_gap: Lipschitz constant must be >= 0");

  const std::size_t horizon = t.horizon;
  std::vector<double> phi_at(horizon + 1);
  for (std::size_t k = 0; k < horizon; ++k) phi_at[k] = phi(hat(t.records[k].bar_before));
  phi_at[horizon] = phi(hat(t.bar_final));

  DecompositionReport rep;
  rep.lipschitz = lipschitz;
  rep.gap_avg.resize(horizon);
  rep.telescope_avg.resize(horizon);
  rep.remainder.resize(horizon);
  rep.envelope.resize(horizon);
  rep.envelope_holds = true;

  CompensatedSum gap;
  CompensatedSum tele;
  double partial = 0.0;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const StepRecord& rec = t.records[n - 1];
    const double dn = static_cast<double>(n);
    gap.add(rec.reward - q_value(f, rec.bar_before));
    const double increment = phi_at[n] - phi_at[n - 1];
    tele.add(dn * increment);
    partial += increment;
    rep.telescoping_max_error =
        std::max(rep.telescoping_max_error, std::abs(partial - (phi_at[n] - phi_at[0])));

    const double g = gap.value() / dn;
    const double tv = tele.value() / dn;
    rep.gap_avg[n - 1] = g;
    rep.telescope_avg[n - 1] = tv;
    rep.remainder[n - 1] = tv - g;
    rep.envelope[n - 1] = 2.0 * lipschitz * std::log(dn + 1.0) / dn;
    if (n >= kEnvelopeFrom && std::abs(rep.remainder[n - 1]) > rep.envelope[n - 1] &&
        rep.envelope_holds) {
      rep.envelope_holds = false;
      rep.first_violation = n;
    }
  }
  rep.telescoping_holds = rep.telescoping_max_error <= kTelescopeTol;
  return rep;
}

std::string decomposition_csv(const DecompositionReport& r) {
  std::string out = "n,G_n,T_n,R_n,envelope\n";
  for (std::size_t k = 0; k < r.gap_avg.size(); ++k) {
    out += std::to_string(k + 1);
    for (double x : {r.gap_avg[k], r.telescope_avg[k], r.remainder[k], r.envelope[k]}) {
      out += ',';
      out += format_real(x);
    }
    out += '\n';
  }
  return out;
}

double greedy_gap(const RewardSystem& f, const DistPoint& u) {
  double best = -std::numeric_limits<double>::infinity();
  double q = 0.0;
  for (PlayerIndex i = 0; i < f.players(); ++i) {
    const double r = reward(f, i, u);
    best = std::max(best, r);
    q += u[i] * r;
  }
  return best - q;
}

double liminf_estimate(std::span<const double> series, double tail_fraction) {
  if (series.size() < 10) throw ValidationError("liminf_estimate: series needs at least 10 entries");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ValidationError("liminf_estimate: tail_fraction must lie in (0, 1]");
  }
  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(series.size())));
  if (tail == 0) throw ValidationError("liminf_estimate: empty tail");
  return min_of(series.subspan(series.size() - std::min(tail, series.size())));
}

}  // namespace potluck
