#include "potluck/strategy.hpp"

#include "potluck/error.hpp"

namespace potluck {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_index(PlayerIndex i, std::size_t d, const char* what) {
  if (i > d) {
    throw ValidationError(std::string(what) + ": player index " + std::to_string(i) +
                          " out of range 0.." + std::to_string(d));
  }
}

}  // namespace

std::string strategy_kind(const Strategy& s) {
  return std::visit(overloaded{
                        [](const strategy::Greedy&) { return std::string("greedy"); },
                        [](const strategy::Iid&) { return std::string("iid"); },
                        [](const strategy::RoundRobin&) { return std::string("round_robin"); },
                        [](const strategy::Constant&) { return std::string("constant"); },
                        [](const strategy::Sequence&) { return std::string("sequence"); },
                    },
                    s);
}

PlayerIndex greedy_choose(const RewardSystem& f, const DistPoint& bar) {
  PlayerIndex best = 0;
  double best_reward = reward(f, 0, bar);
  for (PlayerIndex i = 1; i < f.players(); ++i) {
    const double r = reward(f, i, bar);
    if (r >= best_reward) {
      best = i;
      best_reward = r;
    }
  }
  return best;
}

PlayerIndex iid_choose(const DistPoint& p, Rng& rng) {
  const double draw = rng.uniform();
  double cumulative = 0.0;
  PlayerIndex last_positive = 0;
  for (PlayerIndex i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = i;
    cumulative += p[i];
    if (draw < cumulative) return i;
  }
  // Rounding left the CDF a hair below one and the draw landed above it.
  return last_positive;
}

PlayerIndex choose(const Strategy& s, std::size_t n, const DistPoint& bar, const RewardSystem& f,
                   Rng& rng) {
  if (n == 0) throw ValidationError("choose: step index must be >= 1");
  return std::visit(
      overloaded{
          [&](const strategy::Greedy&) { return greedy_choose(f, bar); },
          [&](const strategy::Iid& k) { return iid_choose(k.p, rng); },
          [&](const strategy::RoundRobin&) { return (n - 1) % f.players(); },
          [&](const strategy::Constant& k) {
            check_index(k.player, f.dim(), "constant strategy");
            return k.player;
          },
          [&](const strategy::Sequence& k) {
            if (n > k.choices.size()) {
              throw ConfigError("sequence strategy exhausted: step " + std::to_string(n) +
                                " requested but only " + std::to_string(k.choices.size()) +
                                " choices were supplied");
            }
            const PlayerIndex i = k.choices[n - 1];
            check_index(i, f.dim(), "sequence strategy");
            return i;
          },
      },
      s);
}

void validate_strategy(const Strategy& s, std::size_t d) {
  std::visit(overloaded{
                 [](const strategy::Greedy&) {},
                 [](const strategy::RoundRobin&) {},
                 [&](const strategy::Iid& k) {
                   if (k.p.dim() != d) {
                     throw ValidationError("iid strategy: p has " + std::to_string(k.p.size()) +
                                           " weights, expected " + std::to_string(d + 1));
                   }
                 },
                 [&](const strategy::Constant& k) { check_index(k.player, d, "constant strategy"); },
                 [&](const strategy::Sequence& k) {
                   for (auto i : k.choices) check_index(i, d, "sequence strategy");
                 },
             },
             s);
}

}  // namespace potluck
