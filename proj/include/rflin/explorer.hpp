#pragma once

#include <span>
#include <vector>

#include "rflin/lsvi.hpp"
#include "rflin/mdp.hpp"

namespace rflin {

// Default multiplier inside the bonus scale beta.
constexpr double kDefaultBonusCoeff = 0.1;
// Default multiplier inside the episode budget; sized so default budgets stay
// in the hundreds-to-thousands range for small instances.
constexpr double kDefaultBudgetCoeff = 2e-6;

// c * d * H * sqrt(log(d H / (delta * epsilon))).
double default_bonus_scale(int dim, int horizon, double epsilon, double delta,
                           double c = kDefaultBonusCoeff);

// max(1, ceil(c * d^3 H^6 log(d H / (delta * epsilon)) / epsilon^2)).
long default_episode_budget(int dim, int horizon, double epsilon, double delta,
                            double c = kDefaultBudgetCoeff);

struct ExplorationConfig {
  int episodes = 0;  // K
  double beta = 0.0;
  double epsilon = 0.1;
  double delta = 0.1;
  // Fast path: per-level design inverses advanced in place across episodes.
  // Off: rebuilt from scratch each episode (reference path).
  bool incremental = true;
  // Also materialize each episode's internal reward u/H as a full table.
  bool record_episode_rewards = false;
};

struct ExplorationResult {
  ExplorationDataset dataset;
  // V_1^k at that episode's initial state, recorded before the rollout.
  std::vector<double> value_log;
  std::vector<StateId> initial_states;
  // The internal reward u_h^k/H at each visited (h, s_h^k, a_h^k).
  std::vector<std::vector<double>> visited_rewards;
  // Full per-episode reward tables; filled when record_episode_rewards is on.
  std::vector<RewardFunctionSet> episode_rewards;
};

// One backward sweep against an explicit episode history, with every design
// matrix assembled and factorized from scratch. This is the reference
// implementation the incremental path is tested against.
ValueBackup backward_pass(const FeatureMap& features,
                          std::span<const Trajectory> history, double beta);

// Reward-free exploration: each episode plans greedily against the bonus
// reward u/H and rolls out through `env`. Nothing here can observe rewards;
// the feature map and environment carry none.
ExplorationResult run_exploration(const FeatureMap& features, EpisodicEnv& env,
                                  const ExplorationConfig& config,
                                  RngStream& rng);

// Convenience overload running against the spec's own dynamics.
ExplorationResult run_exploration(const LinearMdpSpec& spec,
                                  const ExplorationConfig& config,
                                  RngStream& rng);

}  // namespace rflin
