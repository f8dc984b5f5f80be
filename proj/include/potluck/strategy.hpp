#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "potluck/reward.hpp"
#include "potluck/rng.hpp"
#include "potluck/simplex.hpp"

namespace potluck {

namespace strategy {

// Nominate the player with the largest current reward.
struct Greedy {};

// Draw each player independently from p.
struct Iid {
  DistPoint p;
};

// Players 0, 1, ..., d, 0, 1, ...
struct RoundRobin {};

struct Constant {
  PlayerIndex player = 0;
};

// Replay a fixed, finite choice sequence.
struct Sequence {
  std::vector<PlayerIndex> choices;
};

}  // namespace strategy

using Strategy = std::variant<strategy::Greedy, strategy::Iid, strategy::RoundRobin,
                              strategy::Constant, strategy::Sequence>;

std::string strategy_kind(const Strategy& s);

/// Greedy choice at state `bar` (the state before the play). For two players
/// this returns 1 iff f_1(bar) >= f_0(bar); in general it returns the largest
/// index among the maximizers.
PlayerIndex greedy_choose(const RewardSystem& f, const DistPoint& bar);

// Inverse CDF on one uniform draw: the first i with draw < p_0 + ... + p_i.
PlayerIndex iid_choose(const DistPoint& p, Rng& rng);

/// Next player for step n >= 1 given the state before the play. Deterministic
/// kinds do not touch `rng`.
PlayerIndex choose(const Strategy& s, std::size_t n, const DistPoint& bar, const RewardSystem& f,
                   Rng& rng);

// Checks the strategy's player indices against dimension d.
void validate_strategy(const Strategy& s, std::size_t d);

}  // namespace potluck
