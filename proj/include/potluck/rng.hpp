#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace potluck {

/// Seedable random source with a portable output stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniform variates are built from the top 53 bits of one draw
/// instead of std::uniform_real_distribution, whose algorithm is
/// implementation-defined. Each simulation run owns one Rng seeded with the
/// run seed; batch runs use seed + run index.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace potluck
