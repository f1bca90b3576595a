#include "rflin/planner.hpp"

namespace rflin {
namespace {

// Per-level design accumulators and data columns for a full dataset, with
// updates applied in (episode, level) order: the same ridge path exploration
// itself uses.
struct DatasetDesign {
  std::vector<CovarianceAccumulator> covs;
  std::vector<std::vector<StateId>> states, successors;
  std::vector<std::vector<int>> actions;
};

DatasetDesign build_design(const ExplorationDataset& dataset,
                           const FeatureMap& features) {
  const int H = features.horizon();
  if (dataset.horizon != H) {
    throw InvalidInput("dataset horizon " + std::to_string(dataset.horizon) +
                       " does not match features with horizon " +
                       std::to_string(H));
  }
  check_dataset(dataset);
  DatasetDesign design;
  design.covs.assign(H, CovarianceAccumulator(features.dim()));
  design.states.resize(H);
  design.actions.resize(H);
  design.successors.resize(H);
  for (const Trajectory& tau : dataset.trajectories) {
    for (const TransitionStep& step : tau.steps) {
      design.covs[step.h - 1].update(
          features.phi(step.h, step.state, step.action));
      design.states[step.h - 1].push_back(step.state);
      design.actions[step.h - 1].push_back(step.action);
      design.successors[step.h - 1].push_back(step.next);
    }
  }
  return design;
}

}  // namespace

double PlanningResult::q(const FeatureMap& features, int h, StateId s,
                         int a) const {
  const double u = backup.bonus_at(features, h, s, a);
  const double raw =
      backup.weight_dot(features, h, s, a) + rewards.at(h, s, a) + u;
  return std::min(raw, static_cast<double>(backup.horizon));
}

PlanningResult plan(const ExplorationDataset& dataset,
                    const RewardFunctionSet& rewards, double beta,
                    const FeatureMap& features) {
  if (beta <= 0.0) throw InvalidParameter("bonus scale must be positive");
  if (rewards.horizon() != features.horizon()) {
    throw InvalidInput("reward horizon " + std::to_string(rewards.horizon()) +
                       " does not match features with horizon " +
                       std::to_string(features.horizon()));
  }
  DatasetDesign design = build_design(dataset, features);

  const int H = features.horizon();
  std::vector<LsviLevelInput> inputs(H);
  for (int h = 1; h <= H; ++h) {
    inputs[h - 1] = {&design.covs[h - 1].inverse(), design.states[h - 1],
                     design.actions[h - 1], design.successors[h - 1]};
  }
  PlanningResult out;
  out.backup = lsvi_backward(
      features, inputs, beta,
      [&rewards](int h, StateId s, int a, double) {
        return rewards.at(h, s, a);
      });
  out.rewards = rewards;
  return out;
}

double BonusTable::at(int h, StateId s, int a) const {
  if (h < 1 || h > horizon) {
    throw InvalidInput("bonus level " + std::to_string(h) + " outside 1.." +
                       std::to_string(horizon));
  }
  const int idx = layout.level(h).index_of(s);
  if (idx < 0) {
    throw InvalidInput("state " + std::to_string(s) + " is not at level " +
                       std::to_string(h));
  }
  return values[h - 1](idx, a);
}

BonusTable planning_bonus_table(const ExplorationDataset& dataset, double beta,
                                const FeatureMap& features) {
  if (beta <= 0.0) throw InvalidParameter("bonus scale must be positive");
  DatasetDesign design = build_design(dataset, features);

  const int H = features.horizon();
  BonusTable table;
  table.horizon = H;
  table.beta = beta;
  table.layout = features.layout();
  table.values.resize(H);
  for (int h = 1; h <= H; ++h) {
    const LevelStates& level = features.layout().level(h);
    table.values[h - 1].resize(level.size(), features.num_actions());
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < features.num_actions(); ++a) {
        const double quad =
            design.covs[h - 1].quadratic_form(features.phi_by_index(h, i, a));
        table.values[h - 1](i, a) = bonus(beta, quad, H);
      }
    }
  }
  return table;
}

}  // namespace rflin
