#pragma once

#include <functional>

#include "rflin/mdp.hpp"
#include "rflin/oracle.hpp"

namespace rflin {

// Unit sign vectors with all pairwise inner products below `tolerance`.
struct SignFamily {
  int dim = 0;
  std::vector<Eigen::VectorXd> vectors;
  // Dimensions tried before the verification passed (doubling schedule).
  int attempts = 0;
};

// Samples sign vectors at increasing dimension (doubling, starting at 1),
// verifies every pairwise inner product, and returns the first dimension
// where verification passes. Dimension is capped at 2^20.
SignFamily build_near_orthogonal_features(int count, double tolerance,
                                          RngStream& rng);

// Binary-tree instance whose optimal Q is linear in the features while the
// transitions are not: levels 1..H-2 form a complete binary tree over integer
// states [2^{h-1}, 2^h), level H-1 and H each hold a good and a bad state,
// and a single planted (state, action) pair at level H-2 leads to the good
// branch. One planted final action at the good level-(H-1) state earns the
// only substantial reward.
class HardInstance {
 public:
  int horizon = 0;
  int dim = 0;
  StateId planted_state = 0;    // at level H-2
  int planted_action = 0;       // at level H-2
  int planted_last_action = 0;  // at the good level-(H-1) state
  FeatureMap feature_map;
  std::vector<Eigen::VectorXd> theta;  // [h-1]: Q*_h(s,a) = <phi, theta_h>
  RewardFunctionSet rewards;
  bool shifted = false;  // all rewards moved up by kRewardShift

  static constexpr double kRewardShift = 0.02;

  const FeatureMap& features() const { return feature_map; }
  const StateLayout& states() const { return feature_map.layout(); }

  // The good / bad states at levels H-1 and H.
  StateId good_state(int h) const;
  StateId bad_state(int h) const;

  // Deterministic successor, h in [1..H-1].
  StateId next_state(int h, StateId s, int a) const;

  // <phi(h,s,a), theta_h>: the linear optimal action-value (unshifted).
  double linear_qstar(int h, StateId s, int a) const;

  // The planted trajectory (s*_h, a*_h) for h in [1..H].
  std::pair<StateId, int> planted_pair(int h) const;
};

HardInstance build_hard_instance(int horizon, RngStream& rng,
                                 bool shift_rewards = false);

// Same features for the same stream, with the plant pinned explicitly; used
// to compare paired instances that differ only in the planted choices.
HardInstance build_hard_instance_planted(int horizon, const RngStream& rng,
                                         StateId planted_state,
                                         int planted_action,
                                         int planted_last_action,
                                         bool shift_rewards = false);

// Explicit one-hot transition tables for the instance.
TabularMdp materialize_transitions(const HardInstance& instance);

class HardInstanceEnv : public EpisodicEnv {
 public:
  explicit HardInstanceEnv(const HardInstance& instance)
      : instance_(&instance) {}
  int horizon() const override { return instance_->horizon; }
  StateId sample_initial(RngStream&) override { return 1; }
  StateId sample_next(int h, StateId s, int a, RngStream&) override {
    return instance_->next_state(h, s, a);
  }

 private:
  const HardInstance* instance_;
};

// Counts episodes and refuses to start one past the budget.
class BudgetedEnv : public EpisodicEnv {
 public:
  BudgetedEnv(EpisodicEnv& inner, long budget)
      : inner_(&inner), budget_(budget) {}
  int horizon() const override { return inner_->horizon(); }
  StateId sample_initial(RngStream& rng) override;
  StateId sample_next(int h, StateId s, int a, RngStream& rng) override {
    return inner_->sample_next(h, s, a, rng);
  }
  long budget() const { return budget_; }
  long episodes_used() const { return used_; }

 private:
  EpisodicEnv* inner_;
  long budget_ = 0;
  long used_ = 0;
};

// An exploration procedure under test: may look only at the instance's
// features and states, and must gather data through the budgeted
// environment. Test doubles are allowed to cheat; that is what they are for.
using ExplorerFn = std::function<ExplorationDataset(
    const HardInstance&, BudgetedEnv&, RngStream&)>;

// A planning procedure under test: dataset plus the instance's rewards in,
// complete policy out.
using PlannerFn = std::function<PolicyTable(
    const HardInstance&, const ExplorationDataset&, RngStream&)>;

struct TrialRecord {
  bool success = false;        // policy within 0.1 of optimal
  bool missed_goal = true;     // no trajectory reached the good H-1 state
  bool guessed_last = false;   // policy picks the planted final action there
  double suboptimality = 0.0;
  long episodes_used = 0;
};

struct AdversaryReport {
  int horizon = 0;
  long budget = 0;
  int trials = 0;
  double success_rate = 0.0;
  double missed_goal_rate = 0.0;  // rate of trials that never saw the goal
  double guess_rate = 0.0;
  // min(1, N/P) + (1 - min(1, N/P)) / 2 with P the level-(H-2) pair count.
  double bound = 0.0;
  std::vector<TrialRecord> records;
};

// Repeated fresh-instance trials of explore-then-plan against the planted
// construction. Success and the missed-goal flag are recomputed here from
// the transcript and the exact solver, never trusted from the procedures.
AdversaryReport run_adversary_game(const ExplorerFn& explorer,
                                   const PlannerFn& planner, int horizon,
                                   long budget, int trials, RngStream& rng);

// The bonus-driven explorer and planner under their default scales.
ExplorerFn lsvi_explorer();
PlannerFn lsvi_planner();
// Cheating doubles for calibrating the game's extremes.
ExplorerFn omniscient_explorer();  // walks the planted path
ExplorerFn sweep_explorer();       // enumerates level-(H-2) pairs, then
                                   // resolves both final actions at the goal
PlannerFn model_planner();         // rebuilds transitions from data, exact VI

}  // namespace rflin
