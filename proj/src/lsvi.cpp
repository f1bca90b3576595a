#include "rflin/lsvi.hpp"

#include <cmath>

namespace rflin {

double bonus(double beta, double quadratic, int horizon) {
  if (beta <= 0.0) throw InvalidParameter("bonus scale must be positive");
  if (horizon < 1) throw InvalidParameter("horizon must be >= 1");
  if (!(quadratic >= 0.0)) {
    throw ContractViolation("quadratic form is negative or NaN");
  }
  return std::min(beta * std::sqrt(quadratic), static_cast<double>(horizon));
}

double exploration_reward(double bonus_value, int horizon) {
  if (horizon < 1) throw InvalidParameter("horizon must be >= 1");
  if (!(bonus_value >= 0.0) || bonus_value > static_cast<double>(horizon)) {
    throw ContractViolation("bonus " + std::to_string(bonus_value) +
                            " outside [0, " + std::to_string(horizon) + "]");
  }
  return bonus_value / static_cast<double>(horizon);
}

double ValueBackup::value(int h, int state_index) const {
  return levels.at(h - 1).values[state_index];
}

double ValueBackup::weight_dot(const FeatureMap& features, int h, StateId s,
                               int a) const {
  return levels.at(h - 1).weights.dot(features.phi(h, s, a));
}

double ValueBackup::bonus_at(const FeatureMap& features, int h, StateId s,
                             int a) const {
  const auto phi = features.phi(h, s, a);
  const double q = std::max(phi.dot(levels.at(h - 1).cov_inverse * phi), 0.0);
  return bonus(beta, q, horizon);
}

ValueBackup lsvi_backward(const FeatureMap& features,
                          std::span<const LsviLevelInput> inputs, double beta,
                          const RewardTerm& reward) {
  const int H = features.horizon();
  if (static_cast<int>(inputs.size()) != H) {
    throw InvalidInput("got " + std::to_string(inputs.size()) +
                       " level inputs for horizon " + std::to_string(H));
  }
  const int d = features.dim();
  const int A = features.num_actions();
  const double cap = static_cast<double>(H);

  ValueBackup out;
  out.horizon = H;
  out.beta = beta;
  out.levels.resize(H);
  out.policy = PolicyTable(H);

  for (int h = H; h >= 1; --h) {
    const LsviLevelInput& in = inputs[h - 1];
    if (in.cov_inverse == nullptr || in.cov_inverse->rows() != d ||
        in.cov_inverse->cols() != d) {
      throw InvalidInput("level " + std::to_string(h) +
                         " inverse has the wrong shape");
    }
    const std::size_t n = in.states.size();
    if (in.actions.size() != n || in.successors.size() != n) {
      throw InvalidInput("level " + std::to_string(h) +
                         " data spans have mismatched lengths");
    }
    LsviLevel& level = out.levels[h - 1];

    // Ridge weights against targets V_{h+1}(successor); zero at the last
    // level where V_{H+1} vanishes.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    if (h < H) {
      const Eigen::VectorXd& next_values = out.levels[h].values;
      const LevelStates& next_states = features.layout().level(h + 1);
      for (std::size_t t = 0; t < n; ++t) {
        const int idx = next_states.index_of(in.successors[t]);
        if (idx < 0) {
          throw InvalidModel("recorded successor " +
                             std::to_string(in.successors[t]) +
                             " is not at level " + std::to_string(h + 1));
        }
        rhs.noalias() +=
            features.phi(h, in.states[t], in.actions[t]) * next_values[idx];
      }
    }
    level.weights = (*in.cov_inverse) * rhs;
    level.cov_inverse = *in.cov_inverse;

    const LevelStates& here = features.layout().level(h);
    level.values.resize(here.size());
    for (int i = 0; i < here.size(); ++i) {
      double best = 0.0;
      int best_a = 0;
      for (int a = 0; a < A; ++a) {
        const auto phi = features.phi_by_index(h, i, a);
        const double quad =
            std::max(phi.dot(level.cov_inverse * phi), 0.0);
        const double u = bonus(beta, quad, H);
        const double q = std::min(
            level.weights.dot(phi) + reward(h, here.id(i), a, u) + u, cap);
        if (a == 0 || q > best) {
          best = q;
          best_a = a;
        }
      }
      level.values[i] = best;
      out.policy.set(h, here.id(i), best_a);
    }
  }
  return out;
}

}  // namespace rflin
