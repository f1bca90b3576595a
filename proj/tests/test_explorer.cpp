#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rflin/explorer.hpp"
#include "rflin/mdp.hpp"
#include "rflin/rng.hpp"

using namespace rflin;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Deterministic H-level chain with one state per level and `actions` actions,
// all leading to the single next state. One-hot feature embedding.
LinearMdpSpec single_path_spec(int horizon, int actions) {
  TabularMdp mdp;
  mdp.horizon = horizon;
  mdp.num_actions = actions;
  std::vector<LevelStates> levels;
  for (int h = 1; h <= horizon; ++h) levels.push_back(LevelStates({h}));
  mdp.states = StateLayout(levels);
  mdp.initial = VectorXd::Ones(1);
  for (int h = 1; h < horizon; ++h) {
    mdp.kernels.push_back(MatrixXd::Ones(actions, 1));
  }
  RewardFunctionSet rewards(horizon);
  for (int h = 1; h <= horizon; ++h) {
    for (int a = 0; a < actions; ++a) rewards.set(h, h, a, 0.0);
  }
  return make_tabular_embedding(mdp, rewards);
}

}  // namespace

TEST_CASE("bonus is beta times the root of the quadratic form, clipped") {
  CHECK(bonus(1.0, 1.0, 5) == 1.0);
  CHECK(bonus(100.0, 1.0, 5) == 5.0);  // clipped at H
  CHECK(bonus(2.0, 0.25, 5) == 1.0);
  // Lambda = I + e1 e1^T gives quadratic form 1/2 along e1.
  CHECK(bonus(2.0, 0.5, 5) ==
        doctest::Approx(1.4142135623730951).epsilon(1e-15));
  CHECK(bonus(3.0, 0.0, 5) == 0.0);
  CHECK_THROWS_AS(bonus(-1.0, 1.0, 5), InvalidParameter);
}

TEST_CASE("exploration reward rescales the bonus into the unit interval") {
  CHECK(exploration_reward(5.0, 5) == 1.0);
  CHECK(exploration_reward(0.0, 5) == 0.0);
  CHECK(exploration_reward(1.4142135623730951, 5) ==
        doctest::Approx(0.2828427124746190).epsilon(1e-15));
  CHECK_THROWS_AS(exploration_reward(-0.1, 5), ContractViolation);
  CHECK_THROWS_AS(exploration_reward(5.1, 5), ContractViolation);
}

TEST_CASE("default scale and budget follow their formulas") {
  const int d = 6, H = 4;
  const double eps = 0.1, delta = 0.1;
  const double logterm = std::log(d * H / (delta * eps));
  CHECK(default_bonus_scale(d, H, eps, delta, 0.5) ==
        doctest::Approx(0.5 * d * H * std::sqrt(logterm)).epsilon(1e-12));
  const double raw = 2e-6 * std::pow(d, 3) * std::pow(H, 6) * logterm /
                     (eps * eps);
  CHECK(default_episode_budget(d, H, eps, delta, 2e-6) ==
        static_cast<long>(std::ceil(raw)));
  CHECK(default_episode_budget(1, 1, 0.1, 0.1, 1e-12) == 1);  // floor at 1
  CHECK_THROWS_AS(default_bonus_scale(0, 4, 0.1, 0.1), InvalidParameter);
  CHECK_THROWS_AS(default_bonus_scale(6, 4, 0.0, 0.1), InvalidParameter);
}

TEST_CASE("empty history gives the pessimistic constant value") {
  LinearMdpSpec spec = single_path_spec(4, 2);
  const double beta = 1.0;
  ValueBackup backup = backward_pass(spec.features(), {}, beta);
  // No data: weights are zero, the bonus is beta for unit features, and the
  // internal reward adds beta/H, so Q = (1 + 1/H) beta at every pair.
  const double expect = (1.0 + 1.0 / 4.0) * beta;
  for (int h = 1; h <= 4; ++h) {
    CHECK(backup.value(h, 0) == doctest::Approx(expect).epsilon(1e-12));
    for (int a = 0; a < 2; ++a) {
      CHECK(backup.bonus_at(spec.features(), h, h, a) ==
            doctest::Approx(beta).epsilon(1e-12));
    }
  }
  // With beta past the clip everything saturates at H.
  ValueBackup big = backward_pass(spec.features(), {}, 100.0);
  CHECK(big.value(1, 0) == 4.0);
}

TEST_CASE("bonus decays as the visit count grows") {
  LinearMdpSpec spec = single_path_spec(3, 2);
  PolicyTable policy(3);
  for (int h = 1; h <= 3; ++h) policy.set(h, h, 0);
  RngStream rng(61);
  const double beta = 1.0;
  std::vector<Trajectory> history;
  double previous = bonus(beta, 1.0, 3);
  for (int n = 1; n <= 6; ++n) {
    history.push_back(simulate_episode(spec, policy, rng));
    ValueBackup backup = backward_pass(spec.features(), history, beta);
    // One-hot features: n identical visits shrink the form to 1/(1+n).
    const double got = backup.bonus_at(spec.features(), 1, 1, 0);
    CHECK(got == doctest::Approx(beta / std::sqrt(1.0 + n)).epsilon(1e-10));
    CHECK(got < previous);
    previous = got;
    // The never-taken action keeps its full-width bonus.
    CHECK(backup.bonus_at(spec.features(), 1, 1, 1) ==
          doctest::Approx(beta).epsilon(1e-12));
  }
}

TEST_CASE("values never exceed the horizon") {
  RngStream build(62);
  LinearMdpSpec spec = make_random_anchor_instance(4, 3, 5, 2, build);
  ExplorationConfig config;
  config.episodes = 40;
  config.beta = 50.0;  // force the clip to matter
  RngStream rng(63);
  ExplorationResult result = run_exploration(spec, config, rng);
  for (double v : result.value_log) {
    CHECK(v <= 3.0 + 1e-12);
    CHECK(v >= 0.0);
  }
  for (const auto& episode : result.visited_rewards) {
    REQUIRE(episode.size() == 3);
    for (double r : episode) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("exploration replays exactly under a fixed seed") {
  RngStream build(64);
  LinearMdpSpec spec = make_random_anchor_instance(4, 3, 5, 2, build);
  ExplorationConfig config;
  config.episodes = 30;
  config.beta = 2.0;
  RngStream r1(65), r2(65);
  ExplorationResult a = run_exploration(spec, config, r1);
  ExplorationResult b = run_exploration(spec, config, r2);
  CHECK(a.dataset == b.dataset);
  CHECK(a.value_log == b.value_log);
  CHECK(a.initial_states == b.initial_states);
}

TEST_CASE("a single-path environment yields identical episodes") {
  LinearMdpSpec spec = single_path_spec(3, 1);
  ExplorationConfig config;
  config.episodes = 40;
  config.beta = 1.0;
  RngStream rng(66);
  ExplorationResult result = run_exploration(spec, config, rng);
  REQUIRE(result.dataset.episodes() == 40);
  for (int k = 1; k < 40; ++k) {
    CHECK(result.dataset.trajectories[k] == result.dataset.trajectories[0]);
  }
  // First episode sees no data: weights are zero, so only the level-1 bonus
  // and its reward contribute.
  CHECK(result.value_log[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  // Optimistic value first rises as downstream bonuses start to propagate
  // through the regression, then decays once the single path is worn in.
  CHECK(result.value_log.back() < result.value_log.front());
  CHECK(result.value_log.back() < 0.7);
}

TEST_CASE("incremental and from-scratch paths agree") {
  RngStream build(67);
  LinearMdpSpec spec = make_random_anchor_instance(5, 4, 6, 2, build);
  ExplorationConfig fast;
  fast.episodes = 60;
  fast.beta = 3.0;
  fast.incremental = true;
  ExplorationConfig reference = fast;
  reference.incremental = false;
  RngStream r1(68), r2(68);
  ExplorationResult a = run_exploration(spec, fast, r1);
  ExplorationResult b = run_exploration(spec, reference, r2);
  REQUIRE(a.value_log.size() == b.value_log.size());
  for (size_t k = 0; k < a.value_log.size(); ++k) {
    CHECK(a.value_log[k] ==
          doctest::Approx(b.value_log[k]).epsilon(1e-8));
  }
  CHECK(a.dataset == b.dataset);
}

TEST_CASE("recorded per-episode rewards match a fresh backward sweep") {
  RngStream build(69);
  LinearMdpSpec spec = make_random_anchor_instance(4, 3, 4, 2, build);
  ExplorationConfig config;
  config.episodes = 12;
  config.beta = 2.0;
  config.record_episode_rewards = true;
  RngStream rng(70);
  ExplorationResult result = run_exploration(spec, config, rng);
  REQUIRE(result.episode_rewards.size() == 12);
  const auto& history = result.dataset.trajectories;
  for (int k : {0, 5, 11}) {
    // Episode k's internal reward table comes from the first k episodes.
    ValueBackup reference = backward_pass(
        spec.features(),
        std::span<const Trajectory>(history.data(), static_cast<size_t>(k)),
        config.beta);
    for (int h = 1; h <= 3; ++h) {
      for (StateId s : spec.states().level(h).ids()) {
        for (int a = 0; a < 2; ++a) {
          const double want =
              exploration_reward(
                  reference.bonus_at(spec.features(), h, s, a), 3);
          CHECK(result.episode_rewards[k].at(h, s, a) ==
                doctest::Approx(want).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("accumulated optimistic values stay under the exploration budget") {
  RngStream build(11);
  LinearMdpSpec spec = make_random_anchor_instance(6, 4, 6, 2, build);
  ExplorationConfig config;
  config.episodes = 500;
  config.beta = default_bonus_scale(6, 4, 0.1, 0.1);
  RngStream rng(11);
  ExplorationResult result = run_exploration(spec, config, rng);
  double total = 0.0;
  for (double v : result.value_log) total += v;
  const double d = 6, H = 4, K = 500;
  const double cap =
      10.0 * std::sqrt(d * d * d * H * H * H * H * K *
                       std::log(d * K * H / 0.1));
  CHECK(total <= cap);
}

TEST_CASE("exploration validates its configuration") {
  LinearMdpSpec spec = single_path_spec(3, 1);
  RngStream rng(71);
  ExplorationConfig config;
  config.episodes = 0;
  config.beta = 1.0;
  CHECK_THROWS_AS(run_exploration(spec, config, rng), InvalidParameter);
  config.episodes = 1;
  config.beta = -1.0;
  CHECK_THROWS_AS(run_exploration(spec, config, rng), InvalidParameter);
}
