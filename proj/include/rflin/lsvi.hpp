#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "rflin/linalg.hpp"
#include "rflin/mdp.hpp"

namespace rflin {

// min(beta * sqrt(q), H): the optimism width for one (s, a).
double bonus(double beta, double quadratic, int horizon);

// Bonus scaled into a per-step reward in [0, 1]. The bonus must already be
// clipped into [0, H].
double exploration_reward(double bonus_value, int horizon);

// Data for one level of a backward sweep: the inverse of the level's design
// matrix plus the visited (state, action, successor) triples behind it, in
// insertion order.
struct LsviLevelInput {
  const Eigen::MatrixXd* cov_inverse = nullptr;
  std::span<const StateId> states;
  std::span<const int> actions;
  std::span<const StateId> successors;
};

struct LsviLevel {
  Eigen::VectorXd weights;
  Eigen::MatrixXd cov_inverse;  // frozen copy for later bonus queries
  Eigen::VectorXd values;       // by state index
};

// Reward term entering Q at (h, s, a); receives the bonus u so exploration
// can charge u/H while planning charges a table lookup.
using RewardTerm = std::function<double(int h, StateId s, int a, double u)>;

// Value functions produced by one least-squares backward sweep:
// Q_h(s,a) = min{ w_h . phi(s,a) + r(h,s,a) + u_h(s,a), H } with
// u_h(s,a) = min{ beta sqrt(phi^T Lambda_h^{-1} phi), H }, V_{H+1} = 0.
struct ValueBackup {
  int horizon = 0;
  double beta = 0.0;
  std::vector<LsviLevel> levels;  // [h-1]
  PolicyTable policy;

  double value(int h, int state_index) const;
  double weight_dot(const FeatureMap& features, int h, StateId s, int a) const;
  double bonus_at(const FeatureMap& features, int h, StateId s, int a) const;
};

// Runs the recursion strictly backward: the regression targets at level h are
// the freshly computed values at level h+1 evaluated at recorded successors.
ValueBackup lsvi_backward(const FeatureMap& features,
                          std::span<const LsviLevelInput> inputs, double beta,
                          const RewardTerm& reward);

}  // namespace rflin
