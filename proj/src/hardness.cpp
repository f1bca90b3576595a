#include "rflin/hardness.hpp"

#include <bit>
#include <cmath>
#include <optional>

#include "rflin/explorer.hpp"
#include "rflin/planner.hpp"

namespace rflin {
namespace {

constexpr int kMaxSignDim = 1 << 20;

// Entry (r, c) of the order-d Sylvester matrix, in {-1, +1}.
double sylvester(std::uint64_t r, std::uint64_t c) {
  return (std::popcount(r & c) & 1) ? -1.0 : 1.0;
}

std::vector<int> shuffled_indices(int n, RngStream& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = n - 1; i > 0; --i) {
    std::swap(idx[i], idx[rng.below(i + 1)]);
  }
  return idx;
}

}  // namespace

SignFamily build_near_orthogonal_features(int count, double tolerance,
                                          RngStream& rng) {
  if (count < 1) throw InvalidParameter("need at least one vector");
  if (tolerance <= 0.0) throw InvalidParameter("tolerance must be positive");

  SignFamily family;
  for (int dim = 1; dim <= kMaxSignDim; dim *= 2) {
    ++family.attempts;
    RngStream attempt_rng = rng.spawn(static_cast<std::uint64_t>(dim));

    // Candidate sign vectors: rows of the order-dim Sylvester matrix under a
    // random row order and random per-column sign flips, scaled to unit
    // norm. Row indices wrap when count exceeds dim, which the verification
    // below then rejects.
    const std::vector<int> rows = shuffled_indices(dim, attempt_rng);
    Eigen::VectorXd signs(dim);
    for (int j = 0; j < dim; ++j) {
      signs[j] = attempt_rng.below(2) == 0 ? 1.0 : -1.0;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<Eigen::VectorXd> vectors(count);
    for (int i = 0; i < count; ++i) {
      const std::uint64_t r = static_cast<std::uint64_t>(rows[i % dim]);
      Eigen::VectorXd v(dim);
      for (int j = 0; j < dim; ++j) {
        v[j] = signs[j] * sylvester(r, static_cast<std::uint64_t>(j)) * scale;
      }
      vectors[i] = std::move(v);
    }

    bool ok = true;
    for (int i = 0; i < count && ok; ++i) {
      for (int j = i + 1; j < count && ok; ++j) {
        if (std::abs(vectors[i].dot(vectors[j])) > tolerance) ok = false;
      }
    }
    if (ok) {
      family.dim = dim;
      family.vectors = std::move(vectors);
      return family;
    }
  }
  throw ConstructionFailure(
      "no admissible sign family for " + std::to_string(count) +
      " vectors within the dimension cap");
}

StateId HardInstance::good_state(int h) const {
  if (h == horizon - 1) return StateId{1} << (horizon - 2);
  if (h == horizon) return StateId{1} << (horizon - 1);
  throw InvalidInput("good/bad states exist only at the last two levels");
}

StateId HardInstance::bad_state(int h) const { return good_state(h) + 1; }

StateId HardInstance::next_state(int h, StateId s, int a) const {
  if (h < 1 || h >= horizon) {
    throw InvalidInput("transition level " + std::to_string(h) +
                       " outside 1.." + std::to_string(horizon - 1));
  }
  if (states().level(h).index_of(s) < 0) {
    throw InvalidInput("state " + std::to_string(s) + " is not at level " +
                       std::to_string(h));
  }
  if (a < 0 || a > 1) {
    throw InvalidInput("action " + std::to_string(a) + " outside {0, 1}");
  }
  if (h <= horizon - 3) return 2 * s + a;
  if (h == horizon - 2) {
    return (s == planted_state && a == planted_action) ? good_state(h + 1)
                                                       : bad_state(h + 1);
  }
  return (s == good_state(h) && a == planted_last_action) ? good_state(h + 1)
                                                          : bad_state(h + 1);
}

double HardInstance::linear_qstar(int h, StateId s, int a) const {
  return feature_map.phi(h, s, a).dot(theta.at(h - 1));
}

std::pair<StateId, int> HardInstance::planted_pair(int h) const {
  const int H = horizon;
  if (h < 1 || h > H) {
    throw InvalidInput("level " + std::to_string(h) + " outside 1.." +
                       std::to_string(H));
  }
  if (h <= H - 2) {
    const StateId s = planted_state >> (H - 2 - h);
    const int a = h == H - 2
                      ? planted_action
                      : static_cast<int>((planted_state >> (H - 3 - h)) & 1);
    return {s, a};
  }
  if (h == H - 1) return {good_state(h), planted_last_action};
  return {good_state(h), 0};
}

namespace {

HardInstance build_hard(int horizon, const RngStream& rng,
                        std::optional<std::tuple<StateId, int, int>> plant,
                        bool shift_rewards) {
  if (horizon < 4) {
    throw InvalidParameter("the planted construction needs horizon >= 4");
  }
  const int H = horizon;
  const int d = 1 << (H - 2);

  std::vector<LevelStates> levels;
  for (int h = 1; h <= H - 2; ++h) {
    std::vector<StateId> ids;
    for (StateId s = StateId{1} << (h - 1); s < StateId{1} << h; ++s) {
      ids.push_back(s);
    }
    levels.emplace_back(std::move(ids));
  }
  levels.emplace_back(
      std::vector<StateId>{StateId{1} << (H - 2), (StateId{1} << (H - 2)) + 1});
  levels.emplace_back(
      std::vector<StateId>{StateId{1} << (H - 1), (StateId{1} << (H - 1)) + 1});
  StateLayout layout(std::move(levels));

  std::vector<Eigen::MatrixXd> columns(H);
  for (int h = 1; h <= H - 2; ++h) {
    const int pairs = layout.level(h).size() * 2;
    RngStream family_rng = rng.spawn(static_cast<std::uint64_t>(h));
    SignFamily family =
        build_near_orthogonal_features(pairs, 0.01, family_rng);
    columns[h - 1] = Eigen::MatrixXd::Zero(d, pairs);
    for (int p = 0; p < pairs; ++p) {
      columns[h - 1].col(p).head(family.dim) = family.vectors[p];
    }
  }
  // Level H-1: the good state's two actions get the first two basis vectors;
  // the bad state is featureless. Level H: only (good, 0) is visible.
  columns[H - 2] = Eigen::MatrixXd::Zero(d, 4);
  columns[H - 2](0, 0) = 1.0;
  columns[H - 2](1, 1) = 1.0;
  columns[H - 1] = Eigen::MatrixXd::Zero(d, 4);
  columns[H - 1](0, 0) = 1.0;

  HardInstance inst;
  inst.horizon = H;
  inst.dim = d;
  inst.feature_map = FeatureMap(d, layout, 2, std::move(columns));

  if (plant) {
    std::tie(inst.planted_state, inst.planted_action,
             inst.planted_last_action) = *plant;
    if (inst.feature_map.layout().level(H - 2).index_of(inst.planted_state) <
            0 ||
        inst.planted_action < 0 || inst.planted_action > 1 ||
        inst.planted_last_action < 0 || inst.planted_last_action > 1) {
      throw InvalidParameter("pinned plant is not a level-(H-2) pair");
    }
  } else {
    RngStream plant_rng = rng.spawn(1000);
    const LevelStates& leaves = inst.feature_map.layout().level(H - 2);
    inst.planted_state = leaves.id(static_cast<int>(plant_rng.below(leaves.size())));
    inst.planted_action = static_cast<int>(plant_rng.below(2));
    inst.planted_last_action = static_cast<int>(plant_rng.below(2));
  }

  inst.theta.resize(H);
  for (int h = 1; h <= H; ++h) {
    const auto [s, a] = inst.planted_pair(h);
    inst.theta[h - 1] = 0.5 * inst.feature_map.phi(h, s, a);
  }

  // Rewards are the Bellman differences of the linear optimal values, so the
  // optimal Q of the finished instance is exactly <phi, theta>.
  inst.shifted = shift_rewards;
  inst.rewards = RewardFunctionSet(H);
  std::vector<Eigen::VectorXd> vstar(H + 1);
  for (int h = H; h >= 1; --h) {
    const LevelStates& level = inst.feature_map.layout().level(h);
    vstar[h - 1].resize(level.size());
    for (int i = 0; i < level.size(); ++i) {
      double best = 0.0;
      for (int a = 0; a < 2; ++a) {
        const double q = inst.linear_qstar(h, level.id(i), a);
        if (a == 0 || q > best) best = q;
      }
      vstar[h - 1][i] = best;
    }
  }
  for (int h = 1; h <= H; ++h) {
    const LevelStates& level = inst.feature_map.layout().level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < 2; ++a) {
        double r = inst.linear_qstar(h, level.id(i), a);
        if (h < H) {
          const StateId next = inst.next_state(h, level.id(i), a);
          r -= vstar[h][inst.feature_map.layout().level(h + 1).index_of(next)];
        }
        if (shift_rewards) r += HardInstance::kRewardShift;
        inst.rewards.set(h, level.id(i), a, r);
      }
    }
  }
  return inst;
}

}  // namespace

HardInstance build_hard_instance(int horizon, RngStream& rng,
                                 bool shift_rewards) {
  return build_hard(horizon, rng, std::nullopt, shift_rewards);
}

HardInstance build_hard_instance_planted(int horizon, const RngStream& rng,
                                         StateId planted_state,
                                         int planted_action,
                                         int planted_last_action,
                                         bool shift_rewards) {
  return build_hard(
      horizon, rng,
      std::make_tuple(planted_state, planted_action, planted_last_action),
      shift_rewards);
}

TabularMdp materialize_transitions(const HardInstance& instance) {
  TabularMdp mdp;
  mdp.horizon = instance.horizon;
  mdp.num_actions = 2;
  mdp.states = instance.states();
  mdp.initial = Eigen::VectorXd::Zero(instance.states().level(1).size());
  mdp.initial[0] = 1.0;
  mdp.kernels.resize(mdp.horizon - 1);
  for (int h = 1; h < mdp.horizon; ++h) {
    const LevelStates& level = mdp.states.level(h);
    const LevelStates& next_level = mdp.states.level(h + 1);
    mdp.kernels[h - 1] = Eigen::MatrixXd::Zero(level.size() * 2,
                                               next_level.size());
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < 2; ++a) {
        const StateId next = instance.next_state(h, level.id(i), a);
        mdp.kernels[h - 1](i * 2 + a, next_level.index_of(next)) = 1.0;
      }
    }
  }
  return mdp;
}

StateId BudgetedEnv::sample_initial(RngStream& rng) {
  if (used_ >= budget_) {
    throw BudgetExceeded("episode budget " + std::to_string(budget_) +
                         " exhausted");
  }
  ++used_;
  return inner_->sample_initial(rng);
}

AdversaryReport run_adversary_game(const ExplorerFn& explorer,
                                   const PlannerFn& planner, int horizon,
                                   long budget, int trials, RngStream& rng) {
  if (trials < 1) throw InvalidParameter("need at least one trial");
  if (budget < 0) throw InvalidParameter("budget must be >= 0");

  AdversaryReport report;
  report.horizon = horizon;
  report.budget = budget;
  report.trials = trials;
  const double pairs = std::pow(2.0, horizon - 2);
  const double frac = std::min(1.0, static_cast<double>(budget) / pairs);
  report.bound = frac + (1.0 - frac) * 0.5;

  long successes = 0, misses = 0, guesses = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream trial_rng = rng.spawn(static_cast<std::uint64_t>(t));
    RngStream build_rng = trial_rng.spawn(0);
    const HardInstance inst = build_hard_instance(horizon, build_rng);
    HardInstanceEnv raw_env(inst);
    BudgetedEnv env(raw_env, budget);

    RngStream explore_rng = trial_rng.spawn(1);
    ExplorationDataset dataset = explorer(inst, env, explore_rng);
    if (dataset.episodes() > budget) {
      throw BudgetExceeded("explorer returned " +
                           std::to_string(dataset.episodes()) +
                           " episodes on a budget of " +
                           std::to_string(budget));
    }
    if (dataset.episodes() > 0) check_dataset(dataset);

    TrialRecord rec;
    rec.episodes_used = env.episodes_used();
    const StateId goal = inst.good_state(horizon - 1);
    rec.missed_goal = true;
    for (const Trajectory& tau : dataset.trajectories) {
      for (const TransitionStep& step : tau.steps) {
        if (step.h == horizon - 1 && step.state == goal) {
          rec.missed_goal = false;
        }
      }
    }

    RngStream plan_rng = trial_rng.spawn(2);
    const PolicyTable policy = planner(inst, dataset, plan_rng);
    rec.suboptimality =
        suboptimality(materialize_transitions(inst), inst.rewards, policy);
    rec.success = rec.suboptimality <= 0.1;
    rec.guessed_last = policy.defined(horizon - 1, goal) &&
                       policy.action(horizon - 1, goal) ==
                           inst.planted_last_action;

    successes += rec.success ? 1 : 0;
    misses += rec.missed_goal ? 1 : 0;
    guesses += rec.guessed_last ? 1 : 0;
    report.records.push_back(rec);
  }
  report.success_rate = static_cast<double>(successes) / trials;
  report.missed_goal_rate = static_cast<double>(misses) / trials;
  report.guess_rate = static_cast<double>(guesses) / trials;
  return report;
}

ExplorerFn lsvi_explorer() {
  return [](const HardInstance& inst, BudgetedEnv& env, RngStream& rng) {
    ExplorationDataset empty;
    empty.horizon = inst.horizon;
    if (env.budget() < 1) return empty;
    ExplorationConfig config;
    config.episodes = static_cast<int>(env.budget());
    config.beta = default_bonus_scale(inst.dim, inst.horizon, 0.1, 0.1);
    return run_exploration(inst.features(), env, config, rng).dataset;
  };
}

PlannerFn lsvi_planner() {
  return [](const HardInstance& inst, const ExplorationDataset& dataset,
            RngStream&) {
    const double beta = default_bonus_scale(inst.dim, inst.horizon, 0.1, 0.1);
    ExplorationDataset local = dataset;
    local.horizon = inst.horizon;
    return plan(local, inst.rewards, beta, inst.features()).policy();
  };
}

ExplorerFn omniscient_explorer() {
  return [](const HardInstance& inst, BudgetedEnv& env, RngStream& rng) {
    const int H = inst.horizon;
    ExplorationDataset ds;
    ds.horizon = H;
    if (env.budget() < 1) return ds;
    Trajectory tau;
    StateId s = env.sample_initial(rng);
    for (int h = 1; h <= H; ++h) {
      const int a = inst.planted_pair(h).second;
      const StateId next =
          h < H ? env.sample_next(h, s, a, rng) : kTerminalState;
      tau.steps.push_back({h, s, a, next});
      s = next;
    }
    ds.trajectories.push_back(std::move(tau));
    return ds;
  };
}

ExplorerFn sweep_explorer() {
  return [](const HardInstance& inst, BudgetedEnv& env, RngStream& rng) {
    const int H = inst.horizon;
    ExplorationDataset ds;
    ds.horizon = H;
    const LevelStates& leaves = inst.states().level(H - 2);
    const long pairs = 2L * leaves.size();
    const StateId goal = inst.good_state(H - 1);

    auto rollout = [&](StateId target, int leaf_action, int last_action) {
      Trajectory tau;
      StateId s = env.sample_initial(rng);
      for (int h = 1; h <= H; ++h) {
        int a = 0;
        if (h < H - 2) {
          a = static_cast<int>((target >> (H - 3 - h)) & 1);
        } else if (h == H - 2) {
          a = leaf_action;
        } else if (h == H - 1) {
          a = last_action;
        }
        const StateId next =
            h < H ? env.sample_next(h, s, a, rng) : kTerminalState;
        tau.steps.push_back({h, s, a, next});
        s = next;
      }
      ds.trajectories.push_back(std::move(tau));
    };

    std::optional<std::pair<StateId, int>> hit;
    long used = 0;
    for (long p = 0; p < pairs && used < env.budget() && !hit; ++p, ++used) {
      const StateId target = leaves.id(static_cast<int>(p / 2));
      const int leaf_action = static_cast<int>(p % 2);
      rollout(target, leaf_action, 0);
      for (const TransitionStep& step : ds.trajectories.back().steps) {
        if (step.h == H - 1 && step.state == goal) hit = {target, leaf_action};
      }
    }
    if (hit && used < env.budget()) {
      // Second pass through the planted pair with the other final action.
      rollout(hit->first, hit->second, 1);
    }
    return ds;
  };
}

PlannerFn model_planner() {
  return [](const HardInstance& inst, const ExplorationDataset& dataset,
            RngStream&) {
    const int H = inst.horizon;
    // Tree levels are fixed and public; only the last two transition levels
    // need estimating. Unseen pairs default to the bad branch.
    std::map<std::pair<StateId, int>, StateId> seen;
    for (const Trajectory& tau : dataset.trajectories) {
      for (const TransitionStep& step : tau.steps) {
        if (step.h >= H - 2 && step.h < H) {
          seen[{step.state, step.action}] = step.next;
        }
      }
    }
    TabularMdp mdp = materialize_transitions(inst);
    for (int h = H - 2; h < H; ++h) {
      const LevelStates& level = mdp.states.level(h);
      const LevelStates& next_level = mdp.states.level(h + 1);
      for (int i = 0; i < level.size(); ++i) {
        for (int a = 0; a < 2; ++a) {
          auto it = seen.find({level.id(i), a});
          const StateId next = it != seen.end()
                                   ? it->second
                                   : inst.bad_state(h + 1);
          mdp.kernels[h - 1].row(i * 2 + a).setZero();
          mdp.kernels[h - 1](i * 2 + a, next_level.index_of(next)) = 1.0;
        }
      }
    }
    return solve_exact(mdp, inst.rewards).policy;
  };
}

}  // namespace rflin
