#include "rflin/mdp.hpp"

#include <algorithm>
#include <cmath>

namespace rflin {
namespace {

std::string hsa(int h, StateId s, int a) {
  return "(h=" + std::to_string(h) + ", s=" + std::to_string(s) +
         ", a=" + std::to_string(a) + ")";
}

}  // namespace

LevelStates::LevelStates(std::vector<StateId> ids) : ids_(std::move(ids)) {
  if (ids_.empty()) throw InvalidInput("a level needs at least one state");
  std::sort(ids_.begin(), ids_.end());
  for (int i = 0; i < static_cast<int>(ids_.size()); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw InvalidInput("duplicate state id " + std::to_string(ids_[i]));
    }
  }
}

int LevelStates::index_of(StateId s) const {
  auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

StateLayout::StateLayout(std::vector<LevelStates> levels)
    : levels_(std::move(levels)) {
  if (levels_.empty()) throw InvalidInput("layout needs at least one level");
}

const LevelStates& StateLayout::level(int h) const {
  if (h < 1 || h > horizon()) {
    throw InvalidInput("level " + std::to_string(h) + " outside 1.." +
                       std::to_string(horizon()));
  }
  return levels_[h - 1];
}

FeatureMap::FeatureMap(int dim, StateLayout layout, int num_actions,
                       std::vector<Eigen::MatrixXd> columns)
    : dim_(dim),
      num_actions_(num_actions),
      layout_(std::move(layout)),
      columns_(std::move(columns)) {
  if (dim_ < 1) throw InvalidInput("feature dimension must be >= 1");
  if (num_actions_ < 1) throw InvalidInput("need at least one action");
  if (static_cast<int>(columns_.size()) != layout_.horizon()) {
    throw InvalidInput("feature map has " + std::to_string(columns_.size()) +
                       " level blocks for horizon " +
                       std::to_string(layout_.horizon()));
  }
  for (int h = 1; h <= layout_.horizon(); ++h) {
    const auto& block = columns_[h - 1];
    const int expected = layout_.level(h).size() * num_actions_;
    if (block.rows() != dim_ || block.cols() != expected) {
      throw InvalidInput("feature block at level " + std::to_string(h) +
                         " is " + std::to_string(block.rows()) + "x" +
                         std::to_string(block.cols()) + ", expected " +
                         std::to_string(dim_) + "x" + std::to_string(expected));
    }
  }
}

Eigen::Ref<const Eigen::VectorXd> FeatureMap::phi(int h, StateId s,
                                                  int a) const {
  const int idx = layout_.level(h).index_of(s);
  if (idx < 0) {
    throw InvalidInput("state " + std::to_string(s) + " is not at level " +
                       std::to_string(h));
  }
  return phi_by_index(h, idx, a);
}

Eigen::Ref<const Eigen::VectorXd> FeatureMap::phi_by_index(int h,
                                                           int state_index,
                                                           int a) const {
  if (a < 0 || a >= num_actions_) {
    throw InvalidInput("action " + std::to_string(a) + " outside 0.." +
                       std::to_string(num_actions_ - 1));
  }
  return columns_[h - 1].col(state_index * num_actions_ + a);
}

const Eigen::MatrixXd& FeatureMap::level_columns(int h) const {
  layout_.level(h);  // bounds check
  return columns_[h - 1];
}

void PolicyTable::set(int h, StateId s, int a) {
  if (h < 1 || h > horizon()) {
    throw InvalidInput("policy level " + std::to_string(h) + " outside 1.." +
                       std::to_string(horizon()));
  }
  levels_[h - 1][s] = a;
}

int PolicyTable::action(int h, StateId s) const {
  if (h < 1 || h > horizon()) {
    throw IncompletePolicy("policy has no level " + std::to_string(h));
  }
  auto it = levels_[h - 1].find(s);
  if (it == levels_[h - 1].end()) {
    throw IncompletePolicy("policy undefined at (h=" + std::to_string(h) +
                           ", s=" + std::to_string(s) + ")");
  }
  return it->second;
}

bool PolicyTable::defined(int h, StateId s) const {
  return h >= 1 && h <= horizon() && levels_[h - 1].count(s) > 0;
}

const std::map<StateId, int>& PolicyTable::level(int h) const {
  if (h < 1 || h > horizon()) {
    throw InvalidInput("policy level " + std::to_string(h) + " outside 1.." +
                       std::to_string(horizon()));
  }
  return levels_[h - 1];
}

void check_dataset(const ExplorationDataset& dataset) {
  if (dataset.horizon < 1) throw InvalidModel("dataset horizon must be >= 1");
  for (std::size_t k = 0; k < dataset.trajectories.size(); ++k) {
    const auto& steps = dataset.trajectories[k].steps;
    if (static_cast<int>(steps.size()) != dataset.horizon) {
      throw InvalidModel("episode " + std::to_string(k) + " has " +
                         std::to_string(steps.size()) + " steps, expected " +
                         std::to_string(dataset.horizon));
    }
    for (int i = 0; i < dataset.horizon; ++i) {
      if (steps[i].h != i + 1) {
        throw InvalidModel("episode " + std::to_string(k) +
                           " has out-of-order level " +
                           std::to_string(steps[i].h) + " at position " +
                           std::to_string(i));
      }
      if (i + 1 < dataset.horizon && steps[i].next != steps[i + 1].state) {
        throw InvalidModel("episode " + std::to_string(k) +
                           " breaks successor chaining at level " +
                           std::to_string(i + 1));
      }
    }
    if (steps.back().next != kTerminalState) {
      throw InvalidModel("episode " + std::to_string(k) +
                         " does not end with the terminal successor");
    }
  }
}

RewardFunctionSet RewardFunctionSet::from_linear(
    const FeatureMap& features, std::vector<Eigen::VectorXd> etas) {
  if (static_cast<int>(etas.size()) != features.horizon()) {
    throw InvalidInput("got " + std::to_string(etas.size()) +
                       " coefficient vectors for horizon " +
                       std::to_string(features.horizon()));
  }
  RewardFunctionSet out(features.horizon());
  for (int h = 1; h <= features.horizon(); ++h) {
    if (etas[h - 1].size() != features.dim()) {
      throw DimensionMismatch("reward coefficients at level " +
                              std::to_string(h) + " have size " +
                              std::to_string(etas[h - 1].size()) +
                              ", features are " +
                              std::to_string(features.dim()));
    }
    const auto& level = features.layout().level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < features.num_actions(); ++a) {
        out.set(h, level.id(i),
                a, features.phi_by_index(h, i, a).dot(etas[h - 1]));
      }
    }
  }
  out.etas_ = std::move(etas);
  return out;
}

void RewardFunctionSet::set(int h, StateId s, int a, double reward) {
  if (h < 1 || h > horizon()) {
    throw InvalidInput("reward level " + std::to_string(h) + " outside 1.." +
                       std::to_string(horizon()));
  }
  levels_[h - 1][{s, a}] = reward;
}

double RewardFunctionSet::at(int h, StateId s, int a) const {
  if (h < 1 || h > horizon()) {
    throw MissingReward("no rewards at level " + std::to_string(h));
  }
  auto it = levels_[h - 1].find({s, a});
  if (it == levels_[h - 1].end()) {
    throw MissingReward("reward undefined at " + hsa(h, s, a));
  }
  return it->second;
}

bool RewardFunctionSet::has(int h, StateId s, int a) const {
  return h >= 1 && h <= horizon() && levels_[h - 1].count({s, a}) > 0;
}

const std::map<std::pair<StateId, int>, double>& RewardFunctionSet::level(
    int h) const {
  if (h < 1 || h > horizon()) {
    throw InvalidInput("reward level " + std::to_string(h) + " outside 1.." +
                       std::to_string(horizon()));
  }
  return levels_[h - 1];
}

void RewardFunctionSet::attach_linear(const FeatureMap& features,
                                      std::vector<Eigen::VectorXd> etas) {
  RewardFunctionSet linear = from_linear(features, std::move(etas));
  for (int h = 1; h <= horizon(); ++h) {
    for (const auto& [key, value] : levels_[h - 1]) {
      const double expect = linear.at(h, key.first, key.second);
      if (std::abs(expect - value) > kModelSlack) {
        throw InvalidModel("stored reward at " +
                           hsa(h, key.first, key.second) +
                           " differs from its linear form by " +
                           std::to_string(std::abs(expect - value)));
      }
    }
  }
  etas_ = std::move(linear.etas_);
}

LinearMdpSpec LinearMdpSpec::unchecked(FeatureMap features,
                                       std::vector<Eigen::MatrixXd> cores,
                                       std::vector<Eigen::VectorXd> etas,
                                       Eigen::VectorXd initial) {
  LinearMdpSpec spec;
  spec.features_ = std::move(features);
  spec.cores_ = std::move(cores);
  spec.etas_ = std::move(etas);
  spec.initial_ = std::move(initial);
  return spec;
}

LinearMdpSpec LinearMdpSpec::create(FeatureMap features,
                                    std::vector<Eigen::MatrixXd> cores,
                                    std::vector<Eigen::VectorXd> etas,
                                    Eigen::VectorXd initial) {
  LinearMdpSpec spec = unchecked(std::move(features), std::move(cores),
                                 std::move(etas), std::move(initial));
  for (const CheckItem& item : spec.validate()) {
    if (!item.pass && !item.advisory) {
      throw InvalidModel(item.name + " check failed with residual " +
                         std::to_string(item.residual));
    }
  }
  return spec;
}

const Eigen::MatrixXd& LinearMdpSpec::core(int h) const {
  if (h < 1 || h >= horizon()) {
    throw InvalidInput("transition core level " + std::to_string(h) +
                       " outside 1.." + std::to_string(horizon() - 1));
  }
  return cores_[h - 1];
}

const Eigen::VectorXd& LinearMdpSpec::eta(int h) const {
  if (h < 1 || h > horizon()) {
    throw InvalidInput("reward coefficients level " + std::to_string(h) +
                       " outside 1.." + std::to_string(horizon()));
  }
  return etas_[h - 1];
}

double LinearMdpSpec::reward(int h, StateId s, int a) const {
  return features_.phi(h, s, a).dot(eta(h));
}

RewardFunctionSet LinearMdpSpec::reward_set() const {
  return RewardFunctionSet::from_linear(features_, etas_);
}

Eigen::VectorXd LinearMdpSpec::next_distribution(int h, StateId s,
                                                 int a) const {
  return core(h) * features_.phi(h, s, a);
}

std::vector<CheckItem> LinearMdpSpec::validate() const {
  std::vector<CheckItem> items;
  const int H = horizon();
  const int d = dim();
  const int A = num_actions();

  // Block shapes first; the value checks below assume them.
  {
    CheckItem shapes{"block-shapes", true, false, 0.0};
    if (static_cast<int>(cores_.size()) != H - 1 ||
        static_cast<int>(etas_.size()) != H ||
        initial_.size() != states().level(1).size()) {
      shapes.pass = false;
    } else {
      for (int h = 1; h < H && shapes.pass; ++h) {
        if (cores_[h - 1].rows() != states().level(h + 1).size() ||
            cores_[h - 1].cols() != d) {
          shapes.pass = false;
        }
      }
      for (int h = 1; h <= H && shapes.pass; ++h) {
        if (etas_[h - 1].size() != d) shapes.pass = false;
      }
    }
    items.push_back(shapes);
    if (!shapes.pass) return items;
  }

  {
    CheckItem norms{"feature-norms", true, false, 0.0};
    for (int h = 1; h <= H; ++h) {
      for (int c = 0; c < features_.level_columns(h).cols(); ++c) {
        const double over = features_.level_columns(h).col(c).norm() - 1.0;
        norms.residual = std::max(norms.residual, over);
      }
    }
    norms.residual = std::max(norms.residual, 0.0);
    norms.pass = norms.residual <= kModelSlack;
    items.push_back(norms);
  }

  {
    CheckItem nonneg{"transition-nonnegativity", true, false, 0.0};
    CheckItem normalization{"transition-normalization", true, false, 0.0};
    for (int h = 1; h < H; ++h) {
      const auto& level = states().level(h);
      for (int i = 0; i < level.size(); ++i) {
        for (int a = 0; a < A; ++a) {
          const Eigen::VectorXd p =
              cores_[h - 1] * features_.phi_by_index(h, i, a);
          nonneg.residual = std::max(nonneg.residual, -p.minCoeff());
          normalization.residual =
              std::max(normalization.residual, std::abs(p.sum() - 1.0));
        }
      }
    }
    nonneg.residual = std::max(nonneg.residual, 0.0);
    nonneg.pass = nonneg.residual <= kModelSlack;
    normalization.pass = normalization.residual <= kModelSlack;
    items.push_back(nonneg);
    items.push_back(normalization);
  }

  {
    CheckItem range{"reward-range", true, false, 0.0};
    for (int h = 1; h <= H; ++h) {
      const auto& level = states().level(h);
      for (int i = 0; i < level.size(); ++i) {
        for (int a = 0; a < A; ++a) {
          const double r = features_.phi_by_index(h, i, a).dot(etas_[h - 1]);
          range.residual =
              std::max({range.residual, -r, r - 1.0});
        }
      }
    }
    range.residual = std::max(range.residual, 0.0);
    range.pass = range.residual <= kModelSlack;
    items.push_back(range);
  }

  {
    CheckItem norm{"reward-coefficient-norm", true, false, 0.0};
    const double bound = std::sqrt(static_cast<double>(d));
    for (int h = 1; h <= H; ++h) {
      norm.residual = std::max(norm.residual, etas_[h - 1].norm() - bound);
    }
    norm.residual = std::max(norm.residual, 0.0);
    norm.pass = norm.residual <= kModelSlack;
    items.push_back(norm);
  }

  {
    CheckItem init{"initial-distribution", true, false, 0.0};
    init.residual = std::max(
        {0.0, -initial_.minCoeff(), std::abs(initial_.sum() - 1.0)});
    init.pass = init.residual <= kModelSlack;
    items.push_back(init);
  }

  {
    // Total-measure norm bound on the transition cores. Advisory: some valid
    // embeddings sit exactly on the bound and file round-trips may nudge it.
    CheckItem occupancy{"core-measure-norm", true, true, 0.0};
    const double bound = std::sqrt(static_cast<double>(d));
    for (int h = 1; h < H; ++h) {
      const double n = cores_[h - 1].colwise().sum().norm();
      occupancy.residual = std::max(occupancy.residual, n - bound);
    }
    occupancy.residual = std::max(occupancy.residual, 0.0);
    occupancy.pass = occupancy.residual <= kModelSlack;
    items.push_back(occupancy);
  }

  return items;
}

Eigen::Ref<const Eigen::RowVectorXd> TabularMdp::row(int h, StateId s,
                                                     int a) const {
  if (h < 1 || h >= horizon) {
    throw InvalidInput("transition level " + std::to_string(h) +
                       " outside 1.." + std::to_string(horizon - 1));
  }
  const int idx = states.level(h).index_of(s);
  if (idx < 0) {
    throw InvalidInput("state " + std::to_string(s) + " is not at level " +
                       std::to_string(h));
  }
  if (a < 0 || a >= num_actions) {
    throw InvalidInput("action " + std::to_string(a) + " outside 0.." +
                       std::to_string(num_actions - 1));
  }
  return kernels[h - 1].row(idx * num_actions + a);
}

int sample_index(const Eigen::Ref<const Eigen::VectorXd>& probabilities,
                 RngStream& rng) {
  double total = 0.0;
  for (int i = 0; i < probabilities.size(); ++i) {
    total += std::max(probabilities[i], 0.0);
  }
  if (total <= 0.0) {
    throw InvalidModel("cannot sample from an all-zero distribution");
  }
  const double u = rng.uniform() * total;
  double cum = 0.0;
  int last_positive = -1;
  for (int i = 0; i < probabilities.size(); ++i) {
    const double p = std::max(probabilities[i], 0.0);
    if (p > 0.0) last_positive = i;
    cum += p;
    if (u < cum) return i;
  }
  return last_positive;
}

StateId LinearMdpEnv::sample_initial(RngStream& rng) {
  const int idx = sample_index(spec_->initial(), rng);
  return spec_->states().level(1).id(idx);
}

StateId LinearMdpEnv::sample_next(int h, StateId s, int a, RngStream& rng) {
  const Eigen::VectorXd p = spec_->next_distribution(h, s, a);
  return spec_->states().level(h + 1).id(sample_index(p, rng));
}

StateId TabularMdpEnv::sample_initial(RngStream& rng) {
  const int idx = sample_index(mdp_->initial, rng);
  return mdp_->states.level(1).id(idx);
}

StateId TabularMdpEnv::sample_next(int h, StateId s, int a, RngStream& rng) {
  const Eigen::VectorXd p = mdp_->row(h, s, a).transpose();
  return mdp_->states.level(h + 1).id(sample_index(p, rng));
}

Trajectory simulate_episode(const LinearMdpSpec& spec,
                            const PolicyTable& policy, RngStream& rng) {
  LinearMdpEnv env(spec);
  Trajectory out;
  const int H = spec.horizon();
  StateId s = env.sample_initial(rng);
  for (int h = 1; h <= H; ++h) {
    const int a = policy.action(h, s);
    const StateId next =
        h < H ? env.sample_next(h, s, a, rng) : kTerminalState;
    out.steps.push_back({h, s, a, next});
    s = next;
  }
  return out;
}

LinearMdpSpec make_tabular_embedding(const TabularMdp& mdp,
                                     const RewardFunctionSet& rewards) {
  const int H = mdp.horizon;
  const int A = mdp.num_actions;
  if (rewards.horizon() != H) {
    throw InvalidInput("reward tables cover horizon " +
                       std::to_string(rewards.horizon()) + ", tables are " +
                       std::to_string(H));
  }
  int d = 0;
  for (int h = 1; h <= H; ++h) {
    d = std::max(d, mdp.states.level(h).size() * A);
  }

  std::vector<Eigen::MatrixXd> columns(H);
  std::vector<Eigen::VectorXd> etas(H);
  for (int h = 1; h <= H; ++h) {
    const int pairs = mdp.states.level(h).size() * A;
    columns[h - 1] = Eigen::MatrixXd::Zero(d, pairs);
    etas[h - 1] = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < mdp.states.level(h).size(); ++i) {
      for (int a = 0; a < A; ++a) {
        const int j = i * A + a;
        columns[h - 1](j, j) = 1.0;
        etas[h - 1](j) = rewards.at(h, mdp.states.level(h).id(i), a);
      }
    }
  }

  std::vector<Eigen::MatrixXd> cores(H - 1);
  for (int h = 1; h < H; ++h) {
    cores[h - 1] =
        Eigen::MatrixXd::Zero(mdp.states.level(h + 1).size(), d);
    const int pairs = mdp.states.level(h).size() * A;
    // Column j of the core is the next-state distribution of pair j.
    cores[h - 1].leftCols(pairs) = mdp.kernels[h - 1].transpose();
  }

  FeatureMap features(d, mdp.states, A, std::move(columns));
  return LinearMdpSpec::create(std::move(features), std::move(cores),
                               std::move(etas), mdp.initial);
}

namespace {

// Dirichlet(1,...,1) draw: normalized unit exponentials.
Eigen::VectorXd simplex_point(int n, RngStream& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    v[i] = -std::log(u);
  }
  return v / v.sum();
}

std::vector<LevelStates> uniform_levels(int horizon, int n_states) {
  std::vector<StateId> ids(n_states);
  for (int i = 0; i < n_states; ++i) ids[i] = i;
  return std::vector<LevelStates>(horizon, LevelStates(ids));
}

}  // namespace

LinearMdpSpec make_random_anchor_instance(int dim, int horizon, int n_states,
                                          int n_actions, RngStream& rng) {
  if (dim < 1 || horizon < 1 || n_states < 1 || n_actions < 1) {
    throw InvalidParameter("anchor instance needs positive d, H, |S|, |A|");
  }
  StateLayout layout(uniform_levels(horizon, n_states));
  RngStream feature_rng = rng.spawn(1);
  RngStream core_rng = rng.spawn(2);
  RngStream reward_rng = rng.spawn(3);
  RngStream init_rng = rng.spawn(4);

  std::vector<Eigen::MatrixXd> columns(horizon);
  for (int h = 1; h <= horizon; ++h) {
    RngStream level_rng = feature_rng.spawn(h);
    columns[h - 1].resize(dim, n_states * n_actions);
    for (int c = 0; c < n_states * n_actions; ++c) {
      columns[h - 1].col(c) = simplex_point(dim, level_rng);
    }
  }
  FeatureMap features(dim, layout, n_actions, std::move(columns));

  // Each core column is one anchor next-state distribution, so any convex
  // combination of columns (any simplex feature) is again a distribution.
  std::vector<Eigen::MatrixXd> cores(horizon - 1);
  for (int h = 1; h < horizon; ++h) {
    RngStream level_rng = core_rng.spawn(h);
    cores[h - 1].resize(n_states, dim);
    for (int j = 0; j < dim; ++j) {
      cores[h - 1].col(j) = simplex_point(n_states, level_rng);
    }
  }

  const double norm_bound = std::sqrt(static_cast<double>(dim));
  std::vector<Eigen::VectorXd> etas(horizon);
  for (int h = 1; h <= horizon; ++h) {
    RngStream level_rng = reward_rng.spawn(h);
    Eigen::VectorXd eta(dim);
    for (int j = 0; j < dim; ++j) eta[j] = level_rng.uniform();
    // Spread the realized rewards across [0, 1] when the rescaled
    // coefficients stay admissible. Constants are linear here because
    // simplex features have coordinates summing to one.
    double lo = 1.0, hi = 0.0;
    for (int c = 0; c < features.level_columns(h).cols(); ++c) {
      const double r = features.level_columns(h).col(c).dot(eta);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (hi - lo > 1e-9) {
      const Eigen::VectorXd scaled =
          (eta.array() - lo).matrix() / (hi - lo);
      if (scaled.norm() <= norm_bound) eta = scaled;
    }
    etas[h - 1] = eta;
  }

  Eigen::VectorXd initial = simplex_point(n_states, init_rng);
  return LinearMdpSpec::create(std::move(features), std::move(cores),
                               std::move(etas), std::move(initial));
}

TabularMdp make_random_tabular(int horizon, int n_states, int n_actions,
                               RngStream& rng) {
  if (horizon < 1 || n_states < 1 || n_actions < 1) {
    throw InvalidParameter("tabular instance needs positive H, |S|, |A|");
  }
  TabularMdp mdp;
  mdp.horizon = horizon;
  mdp.num_actions = n_actions;
  mdp.states = StateLayout(uniform_levels(horizon, n_states));
  RngStream kernel_rng = rng.spawn(1);
  RngStream init_rng = rng.spawn(2);
  mdp.kernels.resize(horizon - 1);
  for (int h = 1; h < horizon; ++h) {
    RngStream level_rng = kernel_rng.spawn(h);
    mdp.kernels[h - 1].resize(n_states * n_actions, n_states);
    for (int r = 0; r < n_states * n_actions; ++r) {
      mdp.kernels[h - 1].row(r) = simplex_point(n_states, level_rng).transpose();
    }
  }
  mdp.initial = simplex_point(n_states, init_rng);
  return mdp;
}

RewardFunctionSet make_random_tabular_rewards(const TabularMdp& mdp,
                                              RngStream& rng) {
  RewardFunctionSet rewards(mdp.horizon);
  RngStream reward_rng = rng.spawn(1);
  for (int h = 1; h <= mdp.horizon; ++h) {
    RngStream level_rng = reward_rng.spawn(h);
    const auto& level = mdp.states.level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        rewards.set(h, level.id(i), a, level_rng.uniform());
      }
    }
  }
  return rewards;
}

TabularMdp materialize_transitions(const LinearMdpSpec& spec) {
  TabularMdp mdp;
  mdp.horizon = spec.horizon();
  mdp.num_actions = spec.num_actions();
  mdp.states = spec.states();
  mdp.initial = spec.initial();
  mdp.kernels.resize(mdp.horizon - 1);
  for (int h = 1; h < mdp.horizon; ++h) {
    const auto& level = spec.states().level(h);
    mdp.kernels[h - 1].resize(level.size() * mdp.num_actions,
                              spec.states().level(h + 1).size());
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        mdp.kernels[h - 1].row(i * mdp.num_actions + a) =
            (spec.core(h) * spec.features().phi_by_index(h, i, a)).transpose();
      }
    }
  }
  return mdp;
}

}  // namespace rflin
