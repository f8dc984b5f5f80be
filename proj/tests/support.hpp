#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "potluck/reward.hpp"
#include "potluck/simplex.hpp"

namespace potluck::testing {

// f_0(u) = a*u1, f_1(u) = b*(1 - u1).
inline RewardSystem linear_family(double a, double b) {
  auto num = [](double x) {
    std::string s = std::to_string(x);
    return s;
  };
  return RewardSystem::from_strings(1, {num(a) + "*u1", num(b) + "*(1-u1)"});
}

inline DistPoint random_dist(std::size_t d, std::mt19937_64& gen) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(d + 1);
  double s = 0.0;
  for (auto& x : w) s += (x = e(gen));
  for (auto& x : w) x /= s;
  // Push rounding residue into the largest weight so the sum is within tolerance.
  double t = 0.0;
  for (double x : w) t += x;
  *std::max_element(w.begin(), w.end()) += 1.0 - t;
  return DistPoint(std::move(w));
}

inline SimplexPoint random_simplex_point(std::size_t d, std::mt19937_64& gen) {
  const DistPoint u = random_dist(d, gen);
  return hat(u);
}

// Random polynomial of total degree <= deg in u0..ud, coefficients in [-2, 2].
inline std::string random_polynomial(std::size_t d, int deg, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> var(0, d);
  std::uniform_int_distribution<int> terms(1, 4);
  std::uniform_int_distribution<int> degree(0, deg);
  std::string out;
  const int n = terms(gen);
  for (int t = 0; t < n; ++t) {
    if (t) out += " + ";
    out += "(" + std::to_string(coef(gen)) + ")";
    const int k = degree(gen);
    for (int j = 0; j < k; ++j) out += "*u" + std::to_string(var(gen));
  }
  return out;
}

inline RewardSystem random_polynomial_system(std::size_t d, int deg, std::mt19937_64& gen) {
  std::vector<std::string> src;
  for (std::size_t i = 0; i <= d; ++i) src.push_back(random_polynomial(d, deg, gen));
  return RewardSystem::from_strings(d, src);
}

}  // namespace potluck::testing
