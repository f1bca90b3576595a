#include "rflin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "rflin/io.hpp"
#include "rflin/oracle.hpp"
#include "rflin/planner.hpp"

namespace rflin {
namespace {

// Substream ids for work that hangs off a per-seed root stream. Instance
// generators claim small ids internally, so these start well above them.
constexpr std::uint64_t kExploreStream = 901;
constexpr std::uint64_t kRewardStreamBase = 910;

std::string csv_safe(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return out;
}

}  // namespace

LinearMdpSpec build_instance(const InstanceConfig& instance,
                             std::uint64_t seed) {
  RngStream rng(seed);
  if (instance.kind == "anchor") {
    return make_random_anchor_instance(instance.dim, instance.horizon,
                                       instance.states_per_level,
                                       instance.actions, rng);
  }
  if (instance.kind == "tabular") {
    TabularMdp mdp = make_random_tabular(instance.horizon,
                                         instance.states_per_level,
                                         instance.actions, rng);
    return make_tabular_embedding(mdp, make_random_tabular_rewards(mdp, rng));
  }
  throw InvalidParameter("unknown instance kind '" + instance.kind + "'");
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  if (config.episode_grid.empty()) {
    throw InvalidParameter("episode grid must be nonempty");
  }
  for (int k : config.episode_grid) {
    if (k < 1) throw InvalidParameter("episode counts must be >= 1");
  }
  if (config.seeds < 1) throw InvalidParameter("need at least one seed");
  if (config.reward_sets < 1) {
    throw InvalidParameter("need at least one reward set");
  }

  const int max_k = *std::max_element(config.episode_grid.begin(),
                                      config.episode_grid.end());
  const int cells_per_seed =
      static_cast<int>(config.episode_grid.size()) * config.reward_sets;

  auto run_seed = [&](int seed_index) {
    const std::uint64_t seed = config.seed + seed_index;
    std::vector<SweepRow> rows(cells_per_seed);
    for (size_t ki = 0; ki < config.episode_grid.size(); ++ki) {
      for (int set = 0; set < config.reward_sets; ++set) {
        SweepRow& row = rows[ki * config.reward_sets + set];
        row.kind = config.instance.kind;
        row.episodes = config.episode_grid[ki];
        row.seed = seed;
        row.reward_set = set;
        row.bonus_coeff = config.beta > 0.0 ? 0.0 : config.bonus_coeff;
      }
    }
    auto fail_all = [&](const std::string& what) {
      for (SweepRow& row : rows) row.error = csv_safe(what);
      return rows;
    };

    LinearMdpSpec spec;
    try {
      spec = build_instance(config.instance, seed);
    } catch (const std::exception& e) {
      return fail_all(std::string("instance: ") + e.what());
    }
    const double beta =
        config.beta > 0.0
            ? config.beta
            : default_bonus_scale(spec.dim(), spec.horizon(), config.epsilon,
                                  config.delta, config.bonus_coeff);
    for (SweepRow& row : rows) {
      row.dim = spec.dim();
      row.horizon = spec.horizon();
      row.beta = beta;
    }

    ExplorationDataset dataset;
    try {
      ExplorationConfig explore;
      explore.episodes = max_k;
      explore.beta = beta;
      explore.epsilon = config.epsilon;
      explore.delta = config.delta;
      RngStream explore_rng = RngStream(seed).spawn(kExploreStream);
      dataset = run_exploration(spec, explore, explore_rng).dataset;
    } catch (const std::exception& e) {
      return fail_all(std::string("explore: ") + e.what());
    }

    const TabularMdp tabular = materialize_transitions(spec);
    for (int set = 0; set < config.reward_sets; ++set) {
      RewardFunctionSet rewards;
      double v_star = 0.0;
      try {
        if (set == 0) {
          rewards = spec.reward_set();
        } else {
          RngStream reward_rng =
              RngStream(seed).spawn(kRewardStreamBase + set);
          std::vector<Eigen::VectorXd> etas(spec.horizon());
          for (int h = 1; h <= spec.horizon(); ++h) {
            etas[h - 1].resize(spec.dim());
            for (int i = 0; i < spec.dim(); ++i) {
              etas[h - 1][i] = reward_rng.uniform();
            }
          }
          rewards = RewardFunctionSet::from_linear(spec.features(), etas);
        }
        v_star = solve_exact(tabular, rewards).initial_value;
      } catch (const std::exception& e) {
        for (size_t ki = 0; ki < config.episode_grid.size(); ++ki) {
          rows[ki * config.reward_sets + set].error =
              csv_safe(std::string("rewards: ") + e.what());
        }
        continue;
      }
      for (size_t ki = 0; ki < config.episode_grid.size(); ++ki) {
        SweepRow& row = rows[ki * config.reward_sets + set];
        try {
          ExplorationDataset prefix;
          prefix.horizon = dataset.horizon;
          prefix.trajectories.assign(
              dataset.trajectories.begin(),
              dataset.trajectories.begin() + config.episode_grid[ki]);
          const PolicyTable policy =
              plan(prefix, rewards, beta, spec.features()).policy();
          row.v_star = v_star;
          row.v_pi = evaluate_policy(tabular, rewards, policy);
          row.suboptimality = v_star - row.v_pi;
        } catch (const std::exception& e) {
          row.error = csv_safe(std::string("plan: ") + e.what());
        }
      }
    }
    return rows;
  };

  std::vector<std::vector<SweepRow>> per_seed(config.seeds);
  const int jobs = std::max(1, std::min(config.jobs, config.seeds));
  std::atomic<int> next_seed{0};
  auto worker = [&]() {
    while (true) {
      const int i = next_seed.fetch_add(1);
      if (i >= config.seeds) break;
      per_seed[i] = run_seed(i);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<size_t>(config.seeds) * cells_per_seed);
  for (size_t ki = 0; ki < config.episode_grid.size(); ++ki) {
    for (int i = 0; i < config.seeds; ++i) {
      for (int set = 0; set < config.reward_sets; ++set) {
        rows.push_back(per_seed[i][ki * config.reward_sets + set]);
      }
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "kind,d,H,K,seed,reward_set,beta,c_beta,suboptimality,V1_star,V1_pi,"
         "error\n";
  for (const SweepRow& row : rows) {
    out << row.kind << ',' << row.dim << ',' << row.horizon << ','
        << row.episodes << ',' << row.seed << ',' << row.reward_set << ','
        << format_double(row.beta) << ',' << format_double(row.bonus_coeff)
        << ',';
    if (row.error.empty()) {
      out << format_double(row.suboptimality) << ','
          << format_double(row.v_star) << ',' << format_double(row.v_pi);
    } else {
      out << ",,";
    }
    out << ',' << row.error << '\n';
  }
  return out.str();
}

std::vector<AdversaryReport> run_hardness(const HardnessConfig& config) {
  if (config.horizon < 4) throw InvalidParameter("hardness needs horizon >= 4");
  if (config.budgets.empty()) {
    throw InvalidParameter("budget list must be nonempty");
  }
  if (config.trials < 1) throw InvalidParameter("need at least one trial");

  ExplorerFn explorer;
  if (config.explorer == "lsvi") {
    explorer = lsvi_explorer();
  } else if (config.explorer == "sweep") {
    explorer = sweep_explorer();
  } else if (config.explorer == "omniscient") {
    explorer = omniscient_explorer();
  } else {
    throw InvalidParameter("unknown explorer '" + config.explorer + "'");
  }
  PlannerFn planner;
  if (config.planner == "lsvi") {
    planner = lsvi_planner();
  } else if (config.planner == "model") {
    planner = model_planner();
  } else {
    throw InvalidParameter("unknown planner '" + config.planner + "'");
  }

  RngStream root(config.seed);
  std::vector<AdversaryReport> reports;
  for (long budget : config.budgets) {
    if (budget < 0) throw InvalidParameter("budgets must be >= 0");
    RngStream game_rng = root.spawn(static_cast<std::uint64_t>(budget));
    reports.push_back(run_adversary_game(explorer, planner, config.horizon,
                                         budget, config.trials, game_rng));
  }
  return reports;
}

std::string hardness_csv(const std::vector<AdversaryReport>& reports) {
  std::ostringstream out;
  out << "H,budget,trials,success_rate,eventE_rate,bound\n";
  for (const AdversaryReport& report : reports) {
    out << report.horizon << ',' << report.budget << ',' << report.trials
        << ',' << format_double(report.success_rate) << ','
        << format_double(report.missed_goal_rate) << ','
        << format_double(report.bound) << '\n';
  }
  return out.str();
}

std::vector<GenerativeRow> run_generative(const GenerativeConfig& config) {
  if (config.horizons.empty()) {
    throw InvalidParameter("horizon list must be nonempty");
  }
  if (config.instances < 1) {
    throw InvalidParameter("need at least one instance per horizon");
  }

  std::vector<GenerativeRow> rows;
  for (int horizon : config.horizons) {
    for (int i = 0; i < config.instances; ++i) {
      GenerativeRow row;
      row.horizon = horizon;
      row.seed = config.seed + i;
      try {
        RngStream rng(row.seed);
        const HardInstance inst = build_hard_instance(horizon, rng);
        row.dim = inst.dim;
        row.query_cap = static_cast<long>(inst.dim) * horizon;
        const ProbeTranscript transcript =
            generative_explore(inst.features(), exact_transition_oracle(inst));
        row.queries = transcript.queries();
        const GenerativeResult plan_result =
            generative_plan(inst.features(), transcript, inst.rewards);
        const TabularMdp tabular = materialize_transitions(inst);
        const ExactSolution exact = solve_exact(tabular, inst.rewards);
        for (int h = 1; h <= horizon; ++h) {
          const double err = (plan_result.q_values[h - 1] - exact.q[h - 1])
                                 .cwiseAbs()
                                 .maxCoeff();
          row.max_q_error = std::max(row.max_q_error, err);
        }
        row.suboptimality =
            exact.initial_value -
            evaluate_policy(tabular, inst.rewards, plan_result.policy);
      } catch (const std::exception& e) {
        row.error = csv_safe(e.what());
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string generative_csv(const std::vector<GenerativeRow>& rows) {
  std::ostringstream out;
  out << "H,d,seed,queries,query_cap,max_q_error,suboptimality,error\n";
  for (const GenerativeRow& row : rows) {
    out << row.horizon << ',' << row.dim << ',' << row.seed << ','
        << row.queries << ',' << row.query_cap << ',';
    if (row.error.empty()) {
      out << format_double(row.max_q_error) << ','
          << format_double(row.suboptimality);
    } else {
      out << ',';
    }
    out << ',' << row.error << '\n';
  }
  return out.str();
}

bool ValidationReport::all_pass() const {
  if (!parse_ok) return false;
  for (const CheckItem& item : items) {
    if (!item.pass && !item.advisory) return false;
  }
  return true;
}

namespace {

std::vector<CheckItem> hard_instance_checks(const HardInstance& inst) {
  std::vector<CheckItem> items;
  const int H = inst.horizon;
  const StateLayout& layout = inst.states();

  CheckItem tree{"tree-numbering", true, false, 0.0};
  for (int h = 1; h <= H - 2 && tree.pass; ++h) {
    const LevelStates& level = layout.level(h);
    if (level.size() != 1 << (h - 1)) tree.pass = false;
    for (int i = 0; i < level.size() && tree.pass; ++i) {
      if (level.id(i) != (StateId{1} << (h - 1)) + i) tree.pass = false;
    }
  }
  for (int h = H - 1; h <= H && tree.pass; ++h) {
    const std::vector<StateId> want{inst.good_state(h), inst.bad_state(h)};
    if (layout.level(h).ids() != want) tree.pass = false;
  }
  if (tree.pass &&
      (!layout.level(H - 2).contains(inst.planted_state) ||
       inst.planted_action < 0 || inst.planted_action > 1 ||
       inst.planted_last_action < 0 || inst.planted_last_action > 1)) {
    tree.pass = false;
  }
  items.push_back(tree);

  CheckItem norms{"feature-norms", true, false, 0.0};
  CheckItem coherence{"feature-coherence", true, false, 0.0};
  for (int h = 1; h <= H; ++h) {
    const Eigen::MatrixXd& cols = inst.features().level_columns(h);
    for (int i = 0; i < cols.cols(); ++i) {
      norms.residual =
          std::max(norms.residual, std::max(0.0, cols.col(i).norm() - 1.0));
      for (int j = i + 1; j < cols.cols(); ++j) {
        coherence.residual = std::max(
            coherence.residual, std::abs(cols.col(i).dot(cols.col(j))));
      }
    }
  }
  norms.pass = norms.residual <= kModelSlack;
  coherence.pass = coherence.residual <= 0.01;
  items.push_back(norms);
  items.push_back(coherence);

  CheckItem theta_norm{"qstar-coefficient-norm", true, false, 0.0};
  const double cap = std::sqrt(static_cast<double>(inst.dim));
  for (int h = 1; h <= H; ++h) {
    theta_norm.residual = std::max(
        theta_norm.residual, std::max(0.0, inst.theta[h - 1].norm() - cap));
  }
  theta_norm.pass = theta_norm.residual <= kModelSlack;
  items.push_back(theta_norm);

  const double shift = inst.shifted ? HardInstance::kRewardShift : 0.0;
  CheckItem range{"reward-range", true, false, 0.0};
  const double lo = -HardInstance::kRewardShift + shift;
  const double hi = 0.5 + shift;
  for (int h = 1; h <= H; ++h) {
    const LevelStates& level = layout.level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < 2; ++a) {
        const double r = inst.rewards.at(h, level.id(i), a);
        range.residual = std::max(
            range.residual, std::max(lo - r, r - hi));
      }
    }
  }
  range.residual = std::max(range.residual, 0.0);
  range.pass = range.residual <= 1e-12;
  items.push_back(range);

  CheckItem certificate{"linear-qstar-certificate", true, false, 0.0};
  CheckItem consistency{"reward-consistency", true, false, 0.0};
  try {
    const ExactSolution exact =
        solve_exact(materialize_transitions(inst), inst.rewards);
    for (int h = 1; h <= H; ++h) {
      const LevelStates& level = layout.level(h);
      for (int i = 0; i < level.size(); ++i) {
        for (int a = 0; a < 2; ++a) {
          const double want = inst.linear_qstar(h, level.id(i), a) +
                              shift * (H - h + 1);
          certificate.residual =
              std::max(certificate.residual,
                       std::abs(exact.q[h - 1](i, a) - want));
          double bellman = inst.linear_qstar(h, level.id(i), a);
          if (h < H) {
            const StateId next = inst.next_state(h, level.id(i), a);
            double best = 0.0;
            for (int na = 0; na < 2; ++na) {
              const double q = inst.linear_qstar(h + 1, next, na);
              if (na == 0 || q > best) best = q;
            }
            bellman -= best;
          }
          consistency.residual = std::max(
              consistency.residual,
              std::abs(inst.rewards.at(h, level.id(i), a) - bellman - shift));
        }
      }
    }
  } catch (const std::exception&) {
    certificate.residual = std::numeric_limits<double>::infinity();
    consistency.residual = std::numeric_limits<double>::infinity();
  }
  certificate.pass = certificate.residual <= 1e-12;
  consistency.pass = consistency.residual <= kModelSlack;
  items.push_back(certificate);
  items.push_back(consistency);
  return items;
}

}  // namespace

ValidationReport validate_instance_file(const std::string& path) {
  ValidationReport report;
  LoadedInstance loaded;
  try {
    loaded = load_instance(path, false);
  } catch (const std::exception& e) {
    report.parse_error = e.what();
    return report;
  }
  report.parse_ok = true;
  report.kind = loaded.kind;
  if (loaded.linear) {
    report.items = loaded.linear->validate();
  } else {
    report.items = hard_instance_checks(*loaded.hard);
  }
  return report;
}

std::string validation_text(const ValidationReport& report) {
  std::ostringstream out;
  if (!report.parse_ok) {
    out << "[FAIL] parse: " << report.parse_error << '\n';
    return out.str();
  }
  out << "kind: " << report.kind << '\n';
  for (const CheckItem& item : report.items) {
    out << (item.pass ? "[PASS] " : "[FAIL] ") << item.name
        << (item.advisory ? " (advisory)" : "") << " worst residual "
        << format_double(item.residual) << '\n';
  }
  out << (report.all_pass() ? "all checks passed" : "checks FAILED") << '\n';
  return out.str();
}

}  // namespace rflin
