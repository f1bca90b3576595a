#pragma once

#include "rflin/lsvi.hpp"
#include "rflin/mdp.hpp"

namespace rflin {

// Output of reward-directed planning on a fixed dataset.
struct PlanningResult {
  ValueBackup backup;
  RewardFunctionSet rewards;  // the set that was planned against

  const PolicyTable& policy() const { return backup.policy; }
  double value(int h, int state_index) const { return backup.value(h, state_index); }
  double bonus_at(const FeatureMap& features, int h, StateId s, int a) const {
    return backup.bonus_at(features, h, s, a);
  }
  // min{ w_h . phi + r_h(s,a) + u_h(s,a), H }.
  double q(const FeatureMap& features, int h, StateId s, int a) const;
};

// Least-squares backward planning over the full dataset for one reward set.
// Pure: identical inputs give identical results, and the dataset can be
// reused across any number of reward sets. The reward set must cover every
// (h, s, a) of the feature map's layout.
PlanningResult plan(const ExplorationDataset& dataset,
                    const RewardFunctionSet& rewards, double beta,
                    const FeatureMap& features);

// The planner's bonus u_h(s, a) tabulated for every (h, s, a).
struct BonusTable {
  int horizon = 0;
  double beta = 0.0;
  StateLayout layout;
  std::vector<Eigen::MatrixXd> values;  // [h-1]: |S_h| x A

  double at(int h, StateId s, int a) const;
};

BonusTable planning_bonus_table(const ExplorationDataset& dataset, double beta,
                                const FeatureMap& features);

}  // namespace rflin
