#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rflin/hardness.hpp"
#include "rflin/mdp.hpp"
#include "rflin/oracle.hpp"
#include "rflin/rng.hpp"

using namespace rflin;
using Eigen::VectorXd;

TEST_CASE("a single sign vector needs one dimension") {
  RngStream rng(1);
  SignFamily family = build_near_orthogonal_features(1, 0.01, rng);
  CHECK(family.dim == 1);
  REQUIRE(family.vectors.size() == 1);
  CHECK(std::abs(family.vectors[0].norm() - 1.0) <= 1e-12);
}

TEST_CASE("sign families are unit norm and nearly orthogonal") {
  RngStream rng(5);
  const int count = 64;
  SignFamily family = build_near_orthogonal_features(count, 0.01, rng);
  REQUIRE(static_cast<int>(family.vectors.size()) == count);
  // Scaled Hadamard rows verify exactly once the dimension reaches the
  // family size, so the doubling stops there.
  CHECK(family.dim == 64);
  CHECK(family.attempts >= 1);
  for (const VectorXd& v : family.vectors) {
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
    // Entries are scaled signs, nothing else.
    for (int i = 0; i < v.size(); ++i) {
      CHECK(std::abs(std::abs(v[i]) - 1.0 / 8.0) <= 1e-12);
    }
  }
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      CHECK(std::abs(family.vectors[i].dot(family.vectors[j])) <= 0.01);
    }
  }
}

TEST_CASE("sign family construction is seed-deterministic") {
  RngStream r1(9), r2(9);
  SignFamily a = build_near_orthogonal_features(16, 0.01, r1);
  SignFamily b = build_near_orthogonal_features(16, 0.01, r2);
  CHECK(a.dim == b.dim);
  for (size_t i = 0; i < a.vectors.size(); ++i) {
    CHECK((a.vectors[i] - b.vectors[i]).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(build_near_orthogonal_features(0, 0.01, r1),
                  InvalidParameter);
  CHECK_THROWS_AS(build_near_orthogonal_features(2, -1.0, r1),
                  InvalidParameter);
}

TEST_CASE("tree levels and successors follow the doubling numbering") {
  RngStream rng(11);
  const HardInstance inst = build_hard_instance(5, rng);
  CHECK(inst.horizon == 5);
  CHECK(inst.dim == 8);  // 2^(H-2)

  CHECK(inst.states().level(1).ids() == std::vector<StateId>{1});
  CHECK(inst.states().level(2).ids() == std::vector<StateId>{2, 3});
  CHECK(inst.states().level(3).ids() == std::vector<StateId>{4, 5, 6, 7});
  CHECK(inst.states().level(4).ids() == std::vector<StateId>{8, 9});
  CHECK(inst.states().level(5).ids() == std::vector<StateId>{16, 17});
  CHECK(inst.good_state(4) == 8);
  CHECK(inst.bad_state(4) == 9);
  CHECK(inst.good_state(5) == 16);
  CHECK(inst.bad_state(5) == 17);
  CHECK_THROWS_AS(inst.good_state(3), InvalidInput);

  // Interior steps shift in the action bit.
  CHECK(inst.next_state(1, 1, 0) == 2);
  CHECK(inst.next_state(1, 1, 1) == 3);
  CHECK(inst.next_state(2, 3, 1) == 7);
  CHECK(inst.next_state(2, 2, 0) == 4);

  // Level H-2 funnels to good exactly at the plant.
  CHECK(inst.next_state(3, inst.planted_state, inst.planted_action) == 8);
  for (StateId s : inst.states().level(3).ids()) {
    for (int a = 0; a < 2; ++a) {
      if (s == inst.planted_state && a == inst.planted_action) continue;
      CHECK(inst.next_state(3, s, a) == 9);
    }
  }
  // Level H-1: only the planted final action keeps the good branch.
  CHECK(inst.next_state(4, 8, inst.planted_last_action) == 16);
  CHECK(inst.next_state(4, 8, 1 - inst.planted_last_action) == 17);
  CHECK(inst.next_state(4, 9, 0) == 17);
  CHECK(inst.next_state(4, 9, 1) == 17);

  CHECK_THROWS_AS(inst.next_state(1, 2, 0), InvalidInput);
  CHECK_THROWS_AS(inst.next_state(2, 2, 2), InvalidInput);
  CHECK_THROWS_AS(inst.next_state(5, 16, 0), InvalidInput);
}

TEST_CASE("the planted trajectory chains through the successor map") {
  RngStream rng(12);
  const HardInstance inst = build_hard_instance(7, rng);
  const int H = inst.horizon;
  CHECK(inst.planted_pair(1).first == 1);
  for (int h = 1; h < H; ++h) {
    const auto [s, a] = inst.planted_pair(h);
    CHECK(inst.next_state(h, s, a) == inst.planted_pair(h + 1).first);
  }
  CHECK(inst.planted_pair(H - 2) ==
        std::pair<StateId, int>{inst.planted_state, inst.planted_action});
  CHECK(inst.planted_pair(H - 1) ==
        std::pair<StateId, int>{inst.good_state(H - 1),
                                inst.planted_last_action});
  CHECK(inst.planted_pair(H) == std::pair<StateId, int>{inst.good_state(H), 0});
}

TEST_CASE("only the final good pair pays, and it pays one half") {
  RngStream rng(13);
  const HardInstance inst = build_hard_instance(5, rng);
  const int H = inst.horizon;
  CHECK(inst.rewards.at(H, inst.good_state(H), 0) == 0.5);
  for (int h = 1; h <= H; ++h) {
    for (StateId s : inst.states().level(h).ids()) {
      for (int a = 0; a < 2; ++a) {
        if (h == H && s == inst.good_state(H) && a == 0) continue;
        // Off the terminal plant the telescoping leaves only roundoff.
        CHECK(std::abs(inst.rewards.at(h, s, a)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("optimal action values are linear in the features") {
  RngStream rng(14);
  const HardInstance inst = build_hard_instance(6, rng);
  TabularMdp mdp = materialize_transitions(inst);
  const ExactSolution sol = solve_exact(mdp, inst.rewards);
  for (int h = 1; h <= inst.horizon; ++h) {
    const LevelStates& level = inst.states().level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < 2; ++a) {
        CHECK(std::abs(sol.q[h - 1](i, a) -
                       inst.linear_qstar(h, level.id(i), a)) <= 1e-12);
      }
    }
  }
  // On the plant the value is the half; elsewhere at the same level it stays
  // within half the orthogonality tolerance.
  for (int h = 1; h <= inst.horizon; ++h) {
    const auto [ps, pa] = inst.planted_pair(h);
    CHECK(inst.linear_qstar(h, ps, pa) ==
          doctest::Approx(0.5).epsilon(1e-12));
    for (StateId s : inst.states().level(h).ids()) {
      for (int a = 0; a < 2; ++a) {
        if (s == ps && a == pa) continue;
        CHECK(std::abs(inst.linear_qstar(h, s, a)) <= 0.005 + 1e-12);
      }
    }
  }
  // The coefficient norm stays admissible.
  for (const VectorXd& theta : inst.theta) {
    CHECK(theta.norm() <= std::sqrt(static_cast<double>(inst.dim)) + 1e-12);
  }
}

TEST_CASE("any wrong planted decision forfeits the half") {
  RngStream rng(15);
  const HardInstance inst = build_hard_instance(6, rng);
  TabularMdp mdp = materialize_transitions(inst);
  const ExactSolution sol = solve_exact(mdp, inst.rewards);
  for (int wrong_level = 1; wrong_level <= inst.horizon - 1; ++wrong_level) {
    PolicyTable deviant = sol.policy;
    const auto [s, a] = inst.planted_pair(wrong_level);
    deviant.set(wrong_level, s, 1 - a);
    const double gap = suboptimality(mdp, inst.rewards, deviant);
    CHECK(gap >= 0.49 - 0.02 * inst.horizon);
    CHECK(gap >= 0.1);  // decodability margin used by the sweep solver
  }
}

TEST_CASE("paired plants share features and rewards, differ only in routing") {
  RngStream rng(16);
  const RngStream frozen(900);
  const int H = 6;
  // Same stream, same mid-tree plant, different final action.
  HardInstance a = build_hard_instance_planted(H, frozen, 9, 1, 0);
  HardInstance b = build_hard_instance_planted(H, frozen, 9, 1, 1);
  for (int h = 1; h <= H; ++h) {
    CHECK((a.features().level_columns(h) - b.features().level_columns(h))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  // Reward tables carry no information about the final action.
  for (int h = 1; h <= H; ++h) {
    for (StateId s : a.states().level(h).ids()) {
      for (int act = 0; act < 2; ++act) {
        CHECK(a.rewards.at(h, s, act) == b.rewards.at(h, s, act));
      }
    }
  }
  // Transitions agree everywhere except at the good level-(H-1) state.
  for (int h = 1; h < H; ++h) {
    for (StateId s : a.states().level(h).ids()) {
      for (int act = 0; act < 2; ++act) {
        if (h == H - 1 && s == a.good_state(H - 1)) continue;
        CHECK(a.next_state(h, s, act) == b.next_state(h, s, act));
      }
    }
  }
  CHECK(a.next_state(H - 1, a.good_state(H - 1), 0) !=
        b.next_state(H - 1, b.good_state(H - 1), 0));

  // A different mid-tree plant moves only that funnel entry.
  HardInstance c = build_hard_instance_planted(H, frozen, 10, 0, 0);
  int differing = 0;
  for (StateId s : a.states().level(H - 2).ids()) {
    for (int act = 0; act < 2; ++act) {
      if (a.next_state(H - 2, s, act) != c.next_state(H - 2, s, act)) {
        ++differing;
      }
    }
  }
  CHECK(differing == 2);  // the two funnel entries that swapped branches
  CHECK_THROWS_AS(build_hard_instance_planted(H, frozen, 3, 0, 0),
                  InvalidParameter);
}

TEST_CASE("construction rejects horizons below the tree minimum") {
  RngStream rng(17);
  CHECK_THROWS_AS(build_hard_instance(3, rng), InvalidParameter);
  CHECK_THROWS_AS(build_hard_instance(2, rng), InvalidParameter);
}

TEST_CASE("the reward shift moves values without moving the optimum") {
  RngStream r1(18), r2(18);
  const HardInstance plain = build_hard_instance(6, r1);
  const HardInstance shifted = build_hard_instance(6, r2, true);
  CHECK(shifted.shifted);
  const int H = 6;
  for (int h = 1; h <= H; ++h) {
    for (StateId s : plain.states().level(h).ids()) {
      for (int a = 0; a < 2; ++a) {
        CHECK(shifted.rewards.at(h, s, a) ==
              doctest::Approx(plain.rewards.at(h, s, a) +
                              HardInstance::kRewardShift)
                  .epsilon(1e-15));
        CHECK(shifted.rewards.at(h, s, a) >= 0.0);
        CHECK(shifted.rewards.at(h, s, a) <= 0.52 + 1e-12);
      }
    }
  }
  TabularMdp plain_mdp = materialize_transitions(plain);
  TabularMdp shifted_mdp = materialize_transitions(shifted);
  const ExactSolution base = solve_exact(plain_mdp, plain.rewards);
  const ExactSolution moved = solve_exact(shifted_mdp, shifted.rewards);
  CHECK(moved.initial_value ==
        doctest::Approx(base.initial_value + 0.02 * H).epsilon(1e-12));
  CHECK(suboptimality(shifted_mdp, shifted.rewards, base.policy) <= 1e-12);
}

TEST_CASE("the budgeted environment refuses extra episodes") {
  RngStream rng(19);
  const HardInstance inst = build_hard_instance(5, rng);
  HardInstanceEnv inner(inst);
  BudgetedEnv env(inner, 2);
  CHECK(env.budget() == 2);
  CHECK(env.sample_initial(rng) == 1);
  CHECK(env.sample_initial(rng) == 1);
  CHECK(env.episodes_used() == 2);
  CHECK_THROWS_AS(env.sample_initial(rng), BudgetExceeded);
  // Mid-episode steps are not budgeted.
  CHECK_NOTHROW(env.sample_next(1, 1, 0, rng));
}

TEST_CASE("an explorer that ignores its budget is caught") {
  RngStream rng(20);
  // Fabricates more episodes than the budget allows without touching the
  // environment.
  ExplorerFn cheater = [](const HardInstance& inst, BudgetedEnv& env,
                          RngStream&) {
    ExplorationDataset dataset;
    dataset.horizon = inst.horizon;
    for (long k = 0; k <= env.budget(); ++k) {
      Trajectory traj;
      StateId s = 1;
      for (int h = 1; h <= inst.horizon; ++h) {
        const StateId next =
            h < inst.horizon ? inst.next_state(h, s, 0) : kTerminalState;
        traj.steps.push_back({h, s, 0, next});
        s = next;
      }
      dataset.trajectories.push_back(traj);
    }
    return dataset;
  };
  CHECK_THROWS_AS(
      run_adversary_game(cheater, model_planner(), 5, 3, 2, rng),
      BudgetExceeded);
}

TEST_CASE("with no data the final action is a coin flip") {
  RngStream rng(21);
  AdversaryReport report =
      run_adversary_game(lsvi_explorer(), lsvi_planner(), 6, 0, 400, rng);
  CHECK(report.horizon == 6);
  CHECK(report.budget == 0);
  CHECK(report.trials == 400);
  // Nothing was explored, so no trial can have reached the goal.
  CHECK(report.missed_goal_rate == 1.0);
  CHECK(report.bound == 0.5);
  // The planted final action is an unbiased coin across instances; 3 sigma
  // for 400 Bernoulli(1/2) trials is 0.075.
  CHECK(report.guess_rate > 0.5 - 0.075);
  CHECK(report.guess_rate < 0.5 + 0.075);
  // Succeeding outright needs the whole planted path by luck.
  CHECK(report.success_rate <= report.guess_rate);
  CHECK(report.success_rate < 0.2);
  REQUIRE(static_cast<int>(report.records.size()) == 400);
  for (const TrialRecord& record : report.records) {
    CHECK(record.episodes_used == 0);
  }
}

TEST_CASE("an informed explorer plus model planning always wins") {
  RngStream rng(22);
  AdversaryReport report = run_adversary_game(omniscient_explorer(),
                                              model_planner(), 6, 1, 20, rng);
  CHECK(report.success_rate == 1.0);
  CHECK(report.missed_goal_rate == 0.0);
  CHECK(report.guess_rate == 1.0);
  for (const TrialRecord& record : report.records) {
    CHECK(record.suboptimality <= 1e-9);
    CHECK(record.episodes_used == 1);
  }
}

TEST_CASE("sweeping every funnel entry beats the game at full budget") {
  RngStream rng(23);
  const int H = 6;
  const long budget = (1L << (H - 2)) + 1;  // every pair, plus the replay
  AdversaryReport report = run_adversary_game(sweep_explorer(),
                                              model_planner(), H, budget, 10,
                                              rng);
  CHECK(report.success_rate == 1.0);
  CHECK(report.missed_goal_rate == 0.0);
  CHECK(report.bound == 1.0);
}

TEST_CASE("the game bound interpolates between half and one") {
  RngStream rng(24);
  AdversaryReport partial =
      run_adversary_game(lsvi_explorer(), lsvi_planner(), 6, 8, 1, rng);
  // P = 16 funnel pairs: bound = 8/16 + (1 - 8/16) / 2.
  CHECK(partial.bound == 0.75);
}

TEST_CASE("game trials replay under a fixed seed") {
  RngStream r1(25), r2(25);
  AdversaryReport a =
      run_adversary_game(sweep_explorer(), model_planner(), 5, 4, 6, r1);
  AdversaryReport b =
      run_adversary_game(sweep_explorer(), model_planner(), 5, 4, 6, r2);
  CHECK(a.success_rate == b.success_rate);
  CHECK(a.missed_goal_rate == b.missed_goal_rate);
  CHECK(a.guess_rate == b.guess_rate);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].success == b.records[i].success);
    CHECK(a.records[i].missed_goal == b.records[i].missed_goal);
    CHECK(a.records[i].guessed_last == b.records[i].guessed_last);
    CHECK(a.records[i].suboptimality == b.records[i].suboptimality);
    CHECK(a.records[i].episodes_used == b.records[i].episodes_used);
  }
  CHECK_THROWS_AS(
      run_adversary_game(lsvi_explorer(), lsvi_planner(), 6, -1, 1, r1),
      InvalidParameter);
  CHECK_THROWS_AS(
      run_adversary_game(lsvi_explorer(), lsvi_planner(), 6, 0, 0, r1),
      InvalidParameter);
}
