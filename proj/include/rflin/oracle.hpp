#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rflin/mdp.hpp"

namespace rflin {

// Exact optimal value functions from backward induction on explicit tables.
struct ExactSolution {
  // q[h-1] is |S_h| x A; v[h-1] is |S_h|.
  std::vector<Eigen::MatrixXd> q;
  std::vector<Eigen::VectorXd> v;
  PolicyTable policy;
  // E_{s ~ initial} V*_1(s).
  double initial_value = 0.0;
};

// Optimal values, greedy policy (lowest action id on ties), and the initial
// value, computed exactly. Rewards must cover every (h, s, a).
ExactSolution solve_exact(const TabularMdp& mdp,
                          const RewardFunctionSet& rewards);

// E_{s ~ initial} V^pi_1(s) by exact expectation; no sampling involved.
double evaluate_policy(const TabularMdp& mdp, const RewardFunctionSet& rewards,
                       const PolicyTable& policy);

// E[V*_1] - E[V^pi_1]. Nonnegative up to roundoff.
double suboptimality(const TabularMdp& mdp, const RewardFunctionSet& rewards,
                     const PolicyTable& policy);

}  // namespace rflin
