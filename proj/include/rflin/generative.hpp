#pragma once

#include <functional>

#include "rflin/hardness.hpp"
#include "rflin/mdp.hpp"

namespace rflin {

// Residual threshold for both the basis construction and the span check
// when extending values off the basis.
inline constexpr double kSpanTol = 1e-9;

struct BasisPair {
  StateId state = 0;
  int action = 0;
};

// A maximal linearly independent set of feature columns at one level,
// chosen greedily in (state index, action) order.
struct LevelBasis {
  std::vector<BasisPair> pairs;
  Eigen::MatrixXd phis;  // dim x pairs.size(), column i = phi(pair i)
};

std::vector<LevelBasis> find_feature_basis(const FeatureMap& features);

// Answers a single transition query: the successor drawn from P_h(. | s, a).
// Level-H queries are answered with kTerminalState.
using TransitionOracle = std::function<StateId(int h, StateId s, int a)>;

struct Probe {
  int h = 0;
  StateId state = 0;
  int action = 0;
  StateId next = kTerminalState;
};

struct ProbeTranscript {
  int horizon = 0;
  std::vector<Probe> probes;

  long queries() const { return static_cast<long>(probes.size()); }
  std::vector<Probe> level(int h) const;
};

// Queries the oracle once per basis pair at every level, level H included,
// so the transcript length is exactly the sum of per-level ranks (at most
// dim * horizon).
ProbeTranscript generative_explore(const FeatureMap& features,
                                   const TransitionOracle& oracle);

struct GenerativeResult {
  int horizon = 0;
  StateLayout layout;
  PolicyTable policy;
  std::vector<Eigen::MatrixXd> q_values;  // [h-1]: |S_h| x A
  std::vector<Eigen::VectorXd> values;    // [h-1]: per state, max over actions

  double q(int h, StateId s, int a) const;
  double value(int h, StateId s) const;
};

// Backward induction from probed successors at the basis pairs only, with
// every other action-value obtained by writing its feature as a combination
// of basis features. A feature outside the basis span (residual above
// kSpanTol) raises SpanViolation; a basis pair missing from the transcript
// raises InvalidInput.
GenerativeResult generative_plan(const FeatureMap& features,
                                 const ProbeTranscript& transcript,
                                 const RewardFunctionSet& rewards);

// Oracle over the instance's deterministic successor function.
TransitionOracle exact_transition_oracle(const HardInstance& instance);

// Oracle over a deterministic tabular model; rows with mass spread over
// more than one successor raise InvalidModel when queried.
TransitionOracle exact_transition_oracle(const TabularMdp& mdp);

}  // namespace rflin
