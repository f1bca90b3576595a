#include "rflin/generative.hpp"

#include <cmath>
#include <map>

namespace rflin {

std::vector<Probe> ProbeTranscript::level(int h) const {
  std::vector<Probe> out;
  for (const Probe& p : probes) {
    if (p.h == h) out.push_back(p);
  }
  return out;
}

double GenerativeResult::q(int h, StateId s, int a) const {
  return q_values.at(h - 1)(layout.level(h).index_of(s), a);
}

double GenerativeResult::value(int h, StateId s) const {
  return values.at(h - 1)[layout.level(h).index_of(s)];
}

std::vector<LevelBasis> find_feature_basis(const FeatureMap& features) {
  const StateLayout& layout = features.layout();
  const int H = layout.horizon();
  const int A = features.num_actions();
  std::vector<LevelBasis> bases(H);
  for (int h = 1; h <= H; ++h) {
    LevelBasis& basis = bases[h - 1];
    std::vector<Eigen::VectorXd> ortho;  // orthonormal span of kept columns
    const LevelStates& level = layout.level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < A; ++a) {
        Eigen::VectorXd residual = features.phi(h, level.id(i), a);
        for (const Eigen::VectorXd& e : ortho) {
          residual -= residual.dot(e) * e;
        }
        const double norm = residual.norm();
        if (norm > kSpanTol) {
          ortho.push_back(residual / norm);
          basis.pairs.push_back({level.id(i), a});
        }
      }
    }
    basis.phis.resize(features.dim(), static_cast<int>(basis.pairs.size()));
    for (int i = 0; i < static_cast<int>(basis.pairs.size()); ++i) {
      basis.phis.col(i) =
          features.phi(h, basis.pairs[i].state, basis.pairs[i].action);
    }
  }
  return bases;
}

ProbeTranscript generative_explore(const FeatureMap& features,
                                   const TransitionOracle& oracle) {
  const std::vector<LevelBasis> bases = find_feature_basis(features);
  ProbeTranscript transcript;
  transcript.horizon = features.layout().horizon();
  for (int h = 1; h <= transcript.horizon; ++h) {
    for (const BasisPair& pair : bases[h - 1].pairs) {
      transcript.probes.push_back(
          {h, pair.state, pair.action, oracle(h, pair.state, pair.action)});
    }
  }
  return transcript;
}

GenerativeResult generative_plan(const FeatureMap& features,
                                 const ProbeTranscript& transcript,
                                 const RewardFunctionSet& rewards) {
  const StateLayout& layout = features.layout();
  const int H = layout.horizon();
  const int A = features.num_actions();
  if (transcript.horizon != H) {
    throw InvalidInput("transcript horizon " +
                       std::to_string(transcript.horizon) +
                       " does not match the features");
  }

  std::map<std::tuple<int, StateId, int>, StateId> probed;
  for (const Probe& p : transcript.probes) {
    probed[{p.h, p.state, p.action}] = p.next;
  }

  const std::vector<LevelBasis> bases = find_feature_basis(features);
  GenerativeResult result;
  result.horizon = H;
  result.layout = layout;
  result.policy = PolicyTable(H);
  result.q_values.resize(H);
  result.values.resize(H);

  Eigen::VectorXd next_values;
  for (int h = H; h >= 1; --h) {
    const LevelBasis& basis = bases[h - 1];
    const int k = static_cast<int>(basis.pairs.size());

    Eigen::VectorXd basis_q(k);
    for (int i = 0; i < k; ++i) {
      const BasisPair& pair = basis.pairs[i];
      basis_q[i] = rewards.at(h, pair.state, pair.action);
      auto it = probed.find({h, pair.state, pair.action});
      if (it == probed.end()) {
        throw InvalidInput("transcript has no probe for level " +
                           std::to_string(h) + " state " +
                           std::to_string(pair.state) + " action " +
                           std::to_string(pair.action));
      }
      if (h < H) {
        const int idx = layout.level(h + 1).index_of(it->second);
        if (idx < 0) {
          throw InvalidModel("probed successor " + std::to_string(it->second) +
                             " is not a level-" + std::to_string(h + 1) +
                             " state");
        }
        basis_q[i] += next_values[idx];
      }
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis.phis);
    const LevelStates& level = layout.level(h);
    Eigen::MatrixXd q(level.size(), A);
    Eigen::VectorXd v(level.size());
    for (int i = 0; i < level.size(); ++i) {
      int best_action = 0;
      for (int a = 0; a < A; ++a) {
        const Eigen::VectorXd phi = features.phi(h, level.id(i), a);
        const Eigen::VectorXd beta = qr.solve(phi);
        const double residual = (basis.phis * beta - phi).norm();
        if (residual > kSpanTol * std::max(1.0, phi.norm())) {
          throw SpanViolation("feature at level " + std::to_string(h) +
                              " state " + std::to_string(level.id(i)) +
                              " action " + std::to_string(a) +
                              " lies outside the basis span");
        }
        q(i, a) = beta.dot(basis_q);
        if (a == 0 || q(i, a) > q(i, best_action)) best_action = a;
      }
      v[i] = q(i, best_action);
      result.policy.set(h, level.id(i), best_action);
    }
    result.q_values[h - 1] = std::move(q);
    result.values[h - 1] = v;
    next_values = std::move(v);
  }
  return result;
}

TransitionOracle exact_transition_oracle(const HardInstance& instance) {
  const HardInstance* inst = &instance;
  return [inst](int h, StateId s, int a) -> StateId {
    if (h == inst->horizon) return kTerminalState;
    return inst->next_state(h, s, a);
  };
}

TransitionOracle exact_transition_oracle(const TabularMdp& mdp) {
  const TabularMdp* model = &mdp;
  return [model](int h, StateId s, int a) -> StateId {
    if (h == model->horizon) return kTerminalState;
    if (!model->states.level(h).contains(s)) {
      throw InvalidInput("state " + std::to_string(s) + " is not at level " +
                         std::to_string(h));
    }
    const Eigen::RowVectorXd row = model->row(h, s, a);
    int hit = -1;
    for (int j = 0; j < row.size(); ++j) {
      if (row[j] > 0.0) {
        if (hit >= 0 || std::abs(row[j] - 1.0) > kModelSlack) {
          throw InvalidModel("transition row at level " + std::to_string(h) +
                             " is not deterministic");
        }
        hit = j;
      }
    }
    if (hit < 0) throw InvalidModel("transition row sums to zero");
    return model->states.level(h + 1).id(hit);
  };
}

}  // namespace rflin
