#include "potluck/potential.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "potluck/error.hpp"
#include "potluck/rng.hpp"

namespace potluck {

namespace {

SimplexPoint step(const SimplexPoint& v, std::size_t i, double delta) {
  std::vector<double> c(v.coords().begin(), v.coords().end());
  c[i] += delta;
  return SimplexPoint(std::move(c));
}

}  // namespace

Potential Potential::from_expr(Expr e) {
  Potential p;
  p.d_ = e.dim();
  p.fn_ = [e = std::move(e)](const SimplexPoint& v) { return e.eval(tilde(v)); };
  return p;
}

Potential Potential::from_callable(std::size_t d, Callable fn) {
  Potential p;
  p.d_ = d;
  p.fn_ = std::move(fn);
  return p;
}

Potential Potential::tabulated(std::vector<double> values, std::vector<double> slopes) {
  if (values.size() < 2 || values.size() != slopes.size()) {
    throw ValidationError("tabulated potential needs >= 2 nodes with one slope per node");
  }
  Potential p;
  p.d_ = 1;
  p.spacing_ = 1.0 / static_cast<double>(values.size() - 1);
  p.values_ = std::move(values);
  p.slopes_ = std::move(slopes);
  return p;
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  p.shift_ += c;
  return p;
}

double Potential::operator()(const SimplexPoint& v) const {
  if (v.dim() != d_) {
    throw ValidationError("potential of dimension " + std::to_string(d_) +
                          " evaluated at a point of dimension " + std::to_string(v.dim()));
  }
  if (is_tabulated()) return eval_table(v[0]) + shift_;
  return fn_(v) + shift_;
}

double Potential::eval_table(double x) const {
  const std::size_t cells = values_.size() - 1;
  const auto raw = static_cast<long long>(std::floor(x / spacing_));
  const auto k = static_cast<std::size_t>(std::clamp<long long>(raw, 0, static_cast<long long>(cells) - 1));
  const double x0 = static_cast<double>(k) / static_cast<double>(cells);
  const double t = (x - x0) / spacing_;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[k] + h10 * spacing_ * slopes_[k] + h01 * values_[k + 1] +
         h11 * spacing_ * slopes_[k + 1];
}

std::vector<double> gradient_field(const RewardSystem& f, const SimplexPoint& v) {
  if (v.dim() != f.dim()) {
    throw ValidationError("gradient_field: point dimension " + std::to_string(v.dim()) +
                          " does not match reward dimension " + std::to_string(f.dim()));
  }
  const DistPoint u = tilde(v);
  const double base = reward(f, 0, u);
  std::vector<double> field(f.dim());
  for (std::size_t i = 1; i <= f.dim(); ++i) field[i - 1] = reward(f, i, u) - base;
  return field;
}

Potential build_potential_1d(const RewardSystem& f, std::size_t nodes) {
  if (f.dim() != 1) {
    throw ConfigError("build_potential_1d: unsupported dimension d = " + std::to_string(f.dim()) +
                      "; the potential is only constructed for two players, use "
                      "check_integrability for d >= 2");
  }
  if (nodes < kMinPotentialNodes) {
    throw ConfigError("build_potential_1d: need at least " + std::to_string(kMinPotentialNodes) +
                      " nodes, got " + std::to_string(nodes));
  }
  const double cells = static_cast<double>(nodes - 1);
  const double h = 1.0 / cells;
  auto g = [&](double x) {
    const DistPoint u({1.0 - x, x});
    return reward(f, 1, u) - reward(f, 0, u);
  };

  std::vector<double> values(nodes, 0.0);
  std::vector<double> slopes(nodes, 0.0);
  slopes[0] = g(0.0);
  for (std::size_t k = 0; k + 1 < nodes; ++k) {
    const double a = static_cast<double>(k) / cells;
    const double b = static_cast<double>(k + 1) / cells;
    const double gb = g(b);
    values[k + 1] = values[k] + (h / 6.0) * (slopes[k] + 4.0 * g(0.5 * (a + b)) + gb);
    slopes[k + 1] = gb;
  }
  return Potential::tabulated(std::move(values), std::move(slopes));
}

std::vector<double> grad_condition_residual(const RewardSystem& f, const Potential& phi,
                                            const SimplexPoint& v, double h) {
  if (!(h > 0.0)) throw ValidationError("grad_condition_residual: step h must be > 0");
  if (phi.dim() != f.dim()) {
    throw ValidationError("grad_condition_residual: potential and reward dimensions differ");
  }
  const std::vector<double> field = gradient_field(f, v);
  double sum = 0.0;
  for (double c : v.coords()) sum += c;

  // Second-order stencils: central when both neighbours fit, else one-sided.
  auto partial = [&](std::size_t i) -> std::optional<double> {
    const bool room_below = v[i] - h >= 0.0;
    const bool room_above = sum + h <= 1.0;
    if (room_below && room_above) return (phi(step(v, i, h)) - phi(step(v, i, -h))) / (2.0 * h);
    if (!room_below && sum + 2.0 * h <= 1.0) {
      return (-3.0 * phi(v) + 4.0 * phi(step(v, i, h)) - phi(step(v, i, 2.0 * h))) / (2.0 * h);
    }
    if (!room_above && v[i] - 2.0 * h >= 0.0) {
      return (3.0 * phi(v) - 4.0 * phi(step(v, i, -h)) + phi(step(v, i, -2.0 * h))) / (2.0 * h);
    }
    return std::nullopt;
  };

  std::vector<double> residual(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    std::optional<double> derivative = partial(i);
    if (!derivative) {
      // On the face sum = 1 with v_i = 0: d_i = D_{e_i - e_j} + d_j, moving along the face.
      std::size_t j = i;
      for (std::size_t k = 0; k < v.dim(); ++k)
        if (k != i && (j == i || v[k] > v[j])) j = k;
      if (j != i && v[j] - 2.0 * h >= 0.0) {
        auto along = [&](double t) {
          std::vector<double> c(v.coords().begin(), v.coords().end());
          c[i] += t;
          c[j] -= t;
          return SimplexPoint(std::move(c));
        };
        const double directional = (-3.0 * phi(v) + 4.0 * phi(along(h)) - phi(along(2.0 * h))) / (2.0 * h);
        if (const auto dj = partial(j)) derivative = directional + *dj;
      }
    }
    if (!derivative) {
      throw ValidationError("grad_condition_residual: step h = " + std::to_string(h) +
                            " does not fit inside the simplex along coordinate " +
                            std::to_string(i + 1));
    }
    residual[i] = *derivative - field[i];
  }
  return residual;
}

IntegrabilityReport check_integrability(const RewardSystem& f, std::size_t samples, double h) {
  const std::size_t d = f.dim();
  if (d < 2) throw ConfigError("check_integrability: needs d >= 2, got d = " + std::to_string(d));
  if (samples == 0) throw ConfigError("check_integrability: samples must be >= 1");
  if (!(h > 0.0)) throw ConfigError("check_integrability: step h must be > 0");
  const double margin = 2.0 * h;
  const double free = 1.0 - static_cast<double>(d + 1) * margin;
  if (!(free > 0.0)) throw ConfigError("check_integrability: step h too large for the simplex");

  IntegrabilityReport report;
  report.samples = samples;
  report.h = h;
  Rng rng(0x5eedULL);
  std::vector<double> e(d + 1);
  std::vector<std::vector<double>> jac(d, std::vector<double>(d));
  for (std::size_t s = 0; s < samples; ++s) {
    // Flat Dirichlet draw, shrunk so every barycentric coordinate is >= margin.
    double total = 0.0;
    for (auto& x : e) {
      x = -std::log1p(-rng.uniform());
      total += x;
    }
    std::vector<double> coords(d);
    for (std::size_t j = 0; j < d; ++j) coords[j] = margin + free * e[j + 1] / total;
    const SimplexPoint v(coords);

    for (std::size_t j = 0; j < d; ++j) {
      const auto up = gradient_field(f, step(v, j, h));
      const auto down = gradient_field(f, step(v, j, -h));
      for (std::size_t i = 0; i < d; ++i) jac[i][j] = (up[i] - down[i]) / (2.0 * h);
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        const double asym = std::abs(jac[i][j] - jac[j][i]);
        if (asym > report.max_asymmetry || report.worst_point.empty()) {
          report.max_asymmetry = std::max(report.max_asymmetry, asym);
          report.worst_i = i + 1;
          report.worst_j = j + 1;
          report.worst_point = coords;
        }
      }
    }
  }
  return report;
}

}  // namespace potluck
