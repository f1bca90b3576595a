#include "rflin/oracle.hpp"

namespace rflin {

ExactSolution solve_exact(const TabularMdp& mdp,
                          const RewardFunctionSet& rewards) {
  const int H = mdp.horizon;
  const int A = mdp.num_actions;
  if (rewards.horizon() != H) {
    throw InvalidInput("reward horizon " + std::to_string(rewards.horizon()) +
                       " does not match tables with horizon " +
                       std::to_string(H));
  }
  ExactSolution out;
  out.q.resize(H);
  out.v.resize(H);
  out.policy = PolicyTable(H);
  for (int h = H; h >= 1; --h) {
    const auto& level = mdp.states.level(h);
    out.q[h - 1].resize(level.size(), A);
    out.v[h - 1].resize(level.size());
    for (int i = 0; i < level.size(); ++i) {
      double best = 0.0;
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        double q = rewards.at(h, level.id(i), a);
        if (h < H) {
          q += mdp.row(h, level.id(i), a).dot(out.v[h]);
        }
        out.q[h - 1](i, a) = q;
        if (a == 0 || q > best) {
          best = q;
          best_a = a;
        }
      }
      out.v[h - 1][i] = best;
      out.policy.set(h, level.id(i), best_a);
    }
  }
  out.initial_value = mdp.initial.dot(out.v[0]);
  return out;
}

double evaluate_policy(const TabularMdp& mdp, const RewardFunctionSet& rewards,
                       const PolicyTable& policy) {
  const int H = mdp.horizon;
  if (rewards.horizon() != H) {
    throw InvalidInput("reward horizon " + std::to_string(rewards.horizon()) +
                       " does not match tables with horizon " +
                       std::to_string(H));
  }
  if (policy.horizon() != H) {
    throw IncompletePolicy("policy horizon " +
                           std::to_string(policy.horizon()) +
                           " does not match tables with horizon " +
                           std::to_string(H));
  }
  Eigen::VectorXd value;
  for (int h = H; h >= 1; --h) {
    const auto& level = mdp.states.level(h);
    Eigen::VectorXd next(level.size());
    for (int i = 0; i < level.size(); ++i) {
      const int a = policy.action(h, level.id(i));
      double q = rewards.at(h, level.id(i), a);
      if (h < H) q += mdp.row(h, level.id(i), a).dot(value);
      next[i] = q;
    }
    value = std::move(next);
  }
  return mdp.initial.dot(value);
}

double suboptimality(const TabularMdp& mdp, const RewardFunctionSet& rewards,
                     const PolicyTable& policy) {
  return solve_exact(mdp, rewards).initial_value -
         evaluate_policy(mdp, rewards, policy);
}

}  // namespace rflin
