#include "potluck/simplex.hpp"

#include <cmath>
#include <sstream>

#include "potluck/error.hpp"

namespace potluck {

namespace {

void check_coordinate(double x, std::size_t i, const char* what) {
  if (!std::isfinite(x) || x < -kSimplexTol || x > 1.0 + kSimplexTol) {
    std::ostringstream os;
    os << what << ": coordinate " << i << " = " << x << " is outside [0, 1]";
    throw ValidationError(os.str());
  }
}

}  // namespace

DistPoint::DistPoint(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("DistPoint: needs at least one weight");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    check_coordinate(weights_[i], i, "DistPoint");
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    std::ostringstream os;
    os.precision(17);
    os << "DistPoint: weights sum to " << sum << ", not 1";
    throw ValidationError(os.str());
  }
}

DistPoint DistPoint::uniform(std::size_t d) {
  return DistPoint(std::vector<double>(d + 1, 1.0 / static_cast<double>(d + 1)));
}

SimplexPoint::SimplexPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  double sum = 0.0;
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    check_coordinate(coords_[i], i + 1, "SimplexPoint");
    sum += coords_[i];
  }
  if (sum > 1.0 + kSimplexTol) {
    std::ostringstream os;
    os.precision(17);
    os << "SimplexPoint: coordinates sum to " << sum << " > 1";
    throw ValidationError(os.str());
  }
}

DistPoint tilde(const SimplexPoint& v) {
  std::vector<double> u(v.dim() + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    u[i + 1] = v[i];
    sum += v[i];
  }
  u[0] = 1.0 - sum;
  return DistPoint(std::move(u));
}

SimplexPoint hat(const DistPoint& u) {
  auto w = u.weights();
  return SimplexPoint(std::vector<double>(w.begin() + 1, w.end()));
}

DistPoint vertex(PlayerIndex i, std::size_t d) {
  if (i > d) {
    std::ostringstream os;
    os << "player index " << i << " out of range 0.." << d;
    throw ValidationError(os.str());
  }
  std::vector<double> u(d + 1, 0.0);
  u[i] = 1.0;
  return DistPoint(std::move(u));
}

DistPoint update_empirical(const DistPoint& bar, PlayerIndex i, std::size_t n) {
  if (n == 0) throw ValidationError("update_empirical: step index must be >= 1");
  if (i > bar.dim()) {
    std::ostringstream os;
    os << "player index " << i << " out of range 0.." << bar.dim();
    throw ValidationError(os.str());
  }
  const double dn = static_cast<double>(n);
  std::vector<double> next(bar.size());
  for (std::size_t j = 0; j < bar.size(); ++j) {
    const double target = (j == i) ? 1.0 : 0.0;
    next[j] = bar[j] + (target - bar[j]) / dn;
  }
  return DistPoint(std::move(next));
}

DistPoint weighted_update_empirical(const DistPoint& bar, PlayerIndex i, double delta_n,
                                    double s_n) {
  if (!(s_n > 0.0)) throw ValidationError("weighted_update_empirical: cumulative weight must be > 0");
  if (!(delta_n >= 0.0) || delta_n > s_n) {
    throw ValidationError("weighted_update_empirical: weight must lie in [0, S_n]");
  }
  if (i > bar.dim()) {
    std::ostringstream os;
    os << "player index " << i << " out of range 0.." << bar.dim();
    throw ValidationError(os.str());
  }
  std::vector<double> next(bar.size());
  for (std::size_t j = 0; j < bar.size(); ++j) {
    const double target = (j == i) ? 1.0 : 0.0;
    next[j] = bar[j] + ((target - bar[j]) * delta_n) / s_n;
  }
  return DistPoint(std::move(next));
}

std::string to_string(const DistPoint& u) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) os << ", ";
    os << u[i];
  }
  os << ')';
  return os.str();
}

}  // namespace potluck
