#include "rflin/explorer.hpp"

#include <cmath>

namespace rflin {
namespace {

double budget_log(int dim, int horizon, double epsilon, double delta) {
  if (dim < 1 || horizon < 1) {
    throw InvalidParameter("dimension and horizon must be >= 1");
  }
  if (epsilon <= 0.0 || delta <= 0.0) {
    throw InvalidParameter("epsilon and delta must be positive");
  }
  return std::log(static_cast<double>(dim) * horizon / (delta * epsilon));
}

// Reward term used during exploration: the scaled bonus alone.
double bonus_reward(int horizon, double u) {
  return exploration_reward(u, horizon);
}

}  // namespace

double default_bonus_scale(int dim, int horizon, double epsilon, double delta,
                           double c) {
  if (c <= 0.0) throw InvalidParameter("bonus coefficient must be positive");
  return c * dim * horizon * std::sqrt(budget_log(dim, horizon, epsilon, delta));
}

long default_episode_budget(int dim, int horizon, double epsilon, double delta,
                            double c) {
  if (c <= 0.0) throw InvalidParameter("budget coefficient must be positive");
  const double d3 = std::pow(static_cast<double>(dim), 3);
  const double h6 = std::pow(static_cast<double>(horizon), 6);
  const double k =
      c * d3 * h6 * budget_log(dim, horizon, epsilon, delta) / (epsilon * epsilon);
  return std::max(1L, static_cast<long>(std::ceil(k)));
}

ValueBackup backward_pass(const FeatureMap& features,
                          std::span<const Trajectory> history, double beta) {
  const int H = features.horizon();
  const int d = features.dim();

  std::vector<std::vector<StateId>> states(H), successors(H);
  std::vector<std::vector<int>> actions(H);
  std::vector<Eigen::MatrixXd> inverses(H);
  for (int h = 1; h <= H; ++h) {
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Identity(d, d);
    for (const Trajectory& tau : history) {
      const TransitionStep& step = tau.steps.at(h - 1);
      if (step.h != h) {
        throw InvalidModel("history step out of order at level " +
                           std::to_string(h));
      }
      const auto phi = features.phi(h, step.state, step.action);
      lambda.noalias() += phi * phi.transpose();
      states[h - 1].push_back(step.state);
      actions[h - 1].push_back(step.action);
      successors[h - 1].push_back(step.next);
    }
    inverses[h - 1] = lambda.llt().solve(Eigen::MatrixXd::Identity(d, d));
  }

  std::vector<LsviLevelInput> inputs(H);
  for (int h = 1; h <= H; ++h) {
    inputs[h - 1] = {&inverses[h - 1], states[h - 1], actions[h - 1],
                     successors[h - 1]};
  }
  return lsvi_backward(features, inputs, beta,
                       [H](int, StateId, int, double u) {
                         return bonus_reward(H, u);
                       });
}

ExplorationResult run_exploration(const FeatureMap& features, EpisodicEnv& env,
                                  const ExplorationConfig& config,
                                  RngStream& rng) {
  const int H = features.horizon();
  if (env.horizon() != H) {
    throw InvalidInput("environment horizon " + std::to_string(env.horizon()) +
                       " does not match features with horizon " +
                       std::to_string(H));
  }
  if (config.episodes < 1) {
    throw InvalidParameter("episode budget must be >= 1, got " +
                           std::to_string(config.episodes));
  }
  if (config.beta <= 0.0) {
    throw InvalidParameter("bonus scale must be positive");
  }
  const int d = features.dim();
  const int A = features.num_actions();

  ExplorationResult out;
  out.dataset.horizon = H;

  std::vector<CovarianceAccumulator> covs(H, CovarianceAccumulator(d));
  std::vector<std::vector<StateId>> states(H), successors(H);
  std::vector<std::vector<int>> actions(H);

  for (int k = 1; k <= config.episodes; ++k) {
    RngStream episode_rng = rng.spawn(static_cast<std::uint64_t>(k));

    ValueBackup backup;
    if (config.incremental) {
      std::vector<LsviLevelInput> inputs(H);
      for (int h = 1; h <= H; ++h) {
        inputs[h - 1] = {&covs[h - 1].inverse(), states[h - 1],
                         actions[h - 1], successors[h - 1]};
      }
      backup = lsvi_backward(features, inputs, config.beta,
                             [H](int, StateId, int, double u) {
                               return bonus_reward(H, u);
                             });
    } else {
      backup = backward_pass(
          features,
          std::span<const Trajectory>(out.dataset.trajectories),
          config.beta);
    }

    if (config.record_episode_rewards) {
      RewardFunctionSet table(H);
      for (int h = 1; h <= H; ++h) {
        const LevelStates& level = features.layout().level(h);
        for (int i = 0; i < level.size(); ++i) {
          for (int a = 0; a < A; ++a) {
            const double u = backup.bonus_at(features, h, level.id(i), a);
            table.set(h, level.id(i), a, exploration_reward(u, H));
          }
        }
      }
      out.episode_rewards.push_back(std::move(table));
    }

    // Greedy rollout against this episode's value estimate.
    Trajectory tau;
    std::vector<double> step_rewards;
    StateId s = env.sample_initial(episode_rng);
    out.initial_states.push_back(s);
    out.value_log.push_back(
        backup.value(1, features.layout().level(1).index_of(s)));
    for (int h = 1; h <= H; ++h) {
      const int a = backup.policy.action(h, s);
      const StateId next =
          h < H ? env.sample_next(h, s, a, episode_rng) : kTerminalState;
      tau.steps.push_back({h, s, a, next});
      step_rewards.push_back(
          exploration_reward(backup.bonus_at(features, h, s, a), H));
      s = next;
    }
    out.visited_rewards.push_back(std::move(step_rewards));

    for (const TransitionStep& step : tau.steps) {
      covs[step.h - 1].update(features.phi(step.h, step.state, step.action));
      states[step.h - 1].push_back(step.state);
      actions[step.h - 1].push_back(step.action);
      successors[step.h - 1].push_back(step.next);
    }
    out.dataset.trajectories.push_back(std::move(tau));
  }
  return out;
}

ExplorationResult run_exploration(const LinearMdpSpec& spec,
                                  const ExplorationConfig& config,
                                  RngStream& rng) {
  LinearMdpEnv env(spec);
  return run_exploration(spec.features(), env, config, rng);
}

}  // namespace rflin
