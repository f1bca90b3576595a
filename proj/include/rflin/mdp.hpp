#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rflin/errors.hpp"
#include "rflin/rng.hpp"

namespace rflin {

using StateId = std::int64_t;

// Successor recorded for the final step of an episode, where no next level
// exists.
constexpr StateId kTerminalState = -1;

// Numerical slack used by model invariant checks.
constexpr double kModelSlack = 1e-9;

// The states available at one level, with O(1) id -> index lookup.
class LevelStates {
 public:
  LevelStates() = default;
  explicit LevelStates(std::vector<StateId> ids);

  int size() const { return static_cast<int>(ids_.size()); }
  StateId id(int index) const { return ids_.at(index); }
  // -1 when the id is not present at this level.
  int index_of(StateId s) const;
  bool contains(StateId s) const { return index_of(s) >= 0; }
  const std::vector<StateId>& ids() const { return ids_; }

 private:
  std::vector<StateId> ids_;
  std::unordered_map<StateId, int> index_;
};

// Per-level state sets for levels 1..H. Level arguments throughout the
// library are 1-based to match the backward-recursion conventions.
class StateLayout {
 public:
  StateLayout() = default;
  explicit StateLayout(std::vector<LevelStates> levels);

  int horizon() const { return static_cast<int>(levels_.size()); }
  const LevelStates& level(int h) const;

 private:
  std::vector<LevelStates> levels_;
};

// phi(s, a) for every level, state, and action, together with the layout the
// indices refer to. Construction rejects vectors longer than unit norm.
class FeatureMap {
 public:
  FeatureMap() = default;
  // columns[h-1] is d x (|S_h| * A); column index = state_index * A + action.
  FeatureMap(int dim, StateLayout layout, int num_actions,
             std::vector<Eigen::MatrixXd> columns);

  int dim() const { return dim_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return layout_.horizon(); }
  const StateLayout& layout() const { return layout_; }

  Eigen::Ref<const Eigen::VectorXd> phi(int h, StateId s, int a) const;
  Eigen::Ref<const Eigen::VectorXd> phi_by_index(int h, int state_index,
                                                 int a) const;
  const Eigen::MatrixXd& level_columns(int h) const;

 private:
  int dim_ = 0;
  int num_actions_ = 0;
  StateLayout layout_;
  std::vector<Eigen::MatrixXd> columns_;
};

// Deterministic action choice per (level, state).
class PolicyTable {
 public:
  PolicyTable() = default;
  explicit PolicyTable(int horizon) : levels_(horizon) {}

  int horizon() const { return static_cast<int>(levels_.size()); }
  void set(int h, StateId s, int a);
  int action(int h, StateId s) const;
  bool defined(int h, StateId s) const;
  const std::map<StateId, int>& level(int h) const;
  bool operator==(const PolicyTable& other) const {
    return levels_ == other.levels_;
  }

 private:
  std::vector<std::map<StateId, int>> levels_;
};

struct TransitionStep {
  int h = 0;
  StateId state = 0;
  int action = 0;
  StateId next = kTerminalState;
  bool operator==(const TransitionStep&) const = default;
};

// One episode: H steps, where the successor of step h equals the state of
// step h+1 and the final successor is kTerminalState.
struct Trajectory {
  std::vector<TransitionStep> steps;
  bool operator==(const Trajectory&) const = default;
};

// Everything exploration hands to planning: trajectories with successor
// states retained. Carries no reward information by construction.
struct ExplorationDataset {
  int horizon = 0;
  std::vector<Trajectory> trajectories;

  int episodes() const { return static_cast<int>(trajectories.size()); }
  bool operator==(const ExplorationDataset&) const = default;
};

// Throws InvalidModel when the dataset breaks its structural invariants.
void check_dataset(const ExplorationDataset& dataset);

// Reward tables per level, optionally backed by linear coefficient vectors.
class RewardFunctionSet {
 public:
  RewardFunctionSet() = default;
  explicit RewardFunctionSet(int horizon) : levels_(horizon) {}

  static RewardFunctionSet from_linear(const FeatureMap& features,
                                       std::vector<Eigen::VectorXd> etas);

  int horizon() const { return static_cast<int>(levels_.size()); }
  void set(int h, StateId s, int a, double reward);
  double at(int h, StateId s, int a) const;
  bool has(int h, StateId s, int a) const;
  const std::map<std::pair<StateId, int>, double>& level(int h) const;

  bool linear() const { return !etas_.empty(); }
  const std::vector<Eigen::VectorXd>& etas() const { return etas_; }
  // Records coefficient vectors after the fact; verifies they reproduce the
  // stored table on `features` to within kModelSlack.
  void attach_linear(const FeatureMap& features,
                     std::vector<Eigen::VectorXd> etas);

 private:
  std::vector<std::map<std::pair<StateId, int>, double>> levels_;
  std::vector<Eigen::VectorXd> etas_;
};

// One named invariant check outcome. Advisory items are reported but do not
// make construction fail.
struct CheckItem {
  std::string name;
  bool pass = true;
  bool advisory = false;
  double residual = 0.0;
};

// Linear MDP: transitions P_h(s'|s,a) = <mu_h(s'), phi(s,a)> with the
// d-vectors mu_h(s') stacked as rows of the level-h transition core, and
// rewards r_h(s,a) = <phi(s,a), eta_h>.
class LinearMdpSpec {
 public:
  LinearMdpSpec() = default;

  // Validates all model invariants; throws InvalidModel on the first hard
  // failure.
  static LinearMdpSpec create(FeatureMap features,
                              std::vector<Eigen::MatrixXd> cores,
                              std::vector<Eigen::VectorXd> etas,
                              Eigen::VectorXd initial);
  // Skips validation; for loading files that will be checked separately.
  static LinearMdpSpec unchecked(FeatureMap features,
                                 std::vector<Eigen::MatrixXd> cores,
                                 std::vector<Eigen::VectorXd> etas,
                                 Eigen::VectorXd initial);

  int horizon() const { return features_.horizon(); }
  int dim() const { return features_.dim(); }
  int num_actions() const { return features_.num_actions(); }
  const FeatureMap& features() const { return features_; }
  const StateLayout& states() const { return features_.layout(); }
  // h in [1..H-1]; rows indexed by successor state index at level h+1.
  const Eigen::MatrixXd& core(int h) const;
  const std::vector<Eigen::MatrixXd>& cores() const { return cores_; }
  // h in [1..H].
  const Eigen::VectorXd& eta(int h) const;
  const std::vector<Eigen::VectorXd>& etas() const { return etas_; }
  const Eigen::VectorXd& initial() const { return initial_; }

  double reward(int h, StateId s, int a) const;
  RewardFunctionSet reward_set() const;
  // Distribution over level h+1 state indices.
  Eigen::VectorXd next_distribution(int h, StateId s, int a) const;

  std::vector<CheckItem> validate() const;

 private:
  FeatureMap features_;
  std::vector<Eigen::MatrixXd> cores_;
  std::vector<Eigen::VectorXd> etas_;
  Eigen::VectorXd initial_;
};

// Explicit per-level transition tables (no linear structure assumed).
struct TabularMdp {
  int horizon = 0;
  int num_actions = 0;
  StateLayout states;
  Eigen::VectorXd initial;
  // kernels[h-1] is (|S_h| * A) x |S_{h+1}|; row index = state_index * A + a.
  std::vector<Eigen::MatrixXd> kernels;

  Eigen::Ref<const Eigen::RowVectorXd> row(int h, StateId s, int a) const;
};

// Sampling interface every exploration routine runs against. Implementations
// expose dynamics only; rewards are unreachable through this type.
class EpisodicEnv {
 public:
  virtual ~EpisodicEnv() = default;
  virtual int horizon() const = 0;
  virtual StateId sample_initial(RngStream& rng) = 0;
  // h in [1..H-1].
  virtual StateId sample_next(int h, StateId s, int a, RngStream& rng) = 0;
};

class LinearMdpEnv : public EpisodicEnv {
 public:
  explicit LinearMdpEnv(const LinearMdpSpec& spec) : spec_(&spec) {}
  int horizon() const override { return spec_->horizon(); }
  StateId sample_initial(RngStream& rng) override;
  StateId sample_next(int h, StateId s, int a, RngStream& rng) override;

 private:
  const LinearMdpSpec* spec_;
};

class TabularMdpEnv : public EpisodicEnv {
 public:
  explicit TabularMdpEnv(const TabularMdp& mdp) : mdp_(&mdp) {}
  int horizon() const override { return mdp_->horizon; }
  StateId sample_initial(RngStream& rng) override;
  StateId sample_next(int h, StateId s, int a, RngStream& rng) override;

 private:
  const TabularMdp* mdp_;
};

// Index drawn from an explicit probability vector by inverse-CDF scan.
int sample_index(const Eigen::Ref<const Eigen::VectorXd>& probabilities,
                 RngStream& rng);

// Rolls one episode under `policy`. Rewards are never produced.
Trajectory simulate_episode(const LinearMdpSpec& spec,
                            const PolicyTable& policy, RngStream& rng);

// One-hot embedding of explicit tables: d = max_h |S_h|*|A|, and the feature
// of (s, a) at level h is the indicator of its per-level pair index.
LinearMdpSpec make_tabular_embedding(const TabularMdp& mdp,
                                     const RewardFunctionSet& rewards);

// Random instance whose transition cores hold d anchor next-state
// distributions per level; features live in the probability simplex, so
// M_h phi is automatically a distribution. Rewards are linear with
// coefficients rescaled into [0, 1] where that keeps their norm admissible.
LinearMdpSpec make_random_anchor_instance(int dim, int horizon, int n_states,
                                          int n_actions, RngStream& rng);

// Random explicit tables with Dirichlet(1,..,1) transition rows.
TabularMdp make_random_tabular(int horizon, int n_states, int n_actions,
                               RngStream& rng);
// Uniform [0, 1] rewards for every (h, s, a) of `mdp`.
RewardFunctionSet make_random_tabular_rewards(const TabularMdp& mdp,
                                              RngStream& rng);

// Explicit tables induced by a linear spec (P rows = M_h phi).
TabularMdp materialize_transitions(const LinearMdpSpec& spec);

}  // namespace rflin
