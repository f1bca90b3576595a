#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rflin/harness.hpp"
#include "rflin/io.hpp"
#include "rflin/oracle.hpp"
#include "rflin/planner.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rflin;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw InvalidInput("write to " + path.string() + " failed");
}

// Feature map plus a live environment for either instance kind.
struct OpenedInstance {
  LoadedInstance loaded;
  std::unique_ptr<EpisodicEnv> env;

  const FeatureMap& features() const {
    return loaded.linear ? loaded.linear->features()
                         : loaded.hard->features();
  }
  RewardFunctionSet own_rewards() const {
    return loaded.linear ? loaded.linear->reward_set() : loaded.hard->rewards;
  }
  TabularMdp tabular() const {
    return loaded.linear ? materialize_transitions(*loaded.linear)
                         : materialize_transitions(*loaded.hard);
  }
};

OpenedInstance open_instance(const std::string& path) {
  OpenedInstance opened;
  opened.loaded = load_instance(path);
  if (opened.loaded.linear) {
    opened.env = std::make_unique<LinearMdpEnv>(*opened.loaded.linear);
  } else {
    opened.env = std::make_unique<HardInstanceEnv>(*opened.loaded.hard);
  }
  return opened;
}

struct GenInstanceArgs {
  std::string kind = "anchor";
  int dim = 6;
  int horizon = 4;
  int states = 8;
  int actions = 2;
  bool shift = false;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen_instance(const GenInstanceArgs& args) {
  const fs::path dir = prepare_out(args.out);
  const fs::path path = dir / "instance.inst";
  if (args.kind == "hard") {
    RngStream rng(args.seed);
    save_instance(path.string(),
                  build_hard_instance(args.horizon, rng, args.shift));
  } else {
    InstanceConfig instance;
    instance.kind = args.kind;
    instance.dim = args.dim;
    instance.horizon = args.horizon;
    instance.states_per_level = args.states;
    instance.actions = args.actions;
    save_instance(path.string(), build_instance(instance, args.seed));
  }
  std::cout << path.string() << '\n';
  return kOk;
}

struct ExploreArgs {
  std::string instance;
  int episodes = 100;
  double beta = 0.0;
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_explore(const ExploreArgs& args) {
  const fs::path dir = prepare_out(args.out);
  OpenedInstance opened = open_instance(args.instance);
  const FeatureMap& features = opened.features();

  ExplorationConfig config;
  config.episodes = args.episodes;
  config.epsilon = args.epsilon;
  config.delta = args.delta;
  config.beta = args.beta > 0.0
                    ? args.beta
                    : default_bonus_scale(features.dim(), features.horizon(),
                                          args.epsilon, args.delta);
  RngStream rng(args.seed);
  const ExplorationResult result =
      run_exploration(features, *opened.env, config, rng);
  save_dataset((dir / "dataset.csv").string(), result.dataset);
  save_value_log((dir / "value_log.csv").string(), result.value_log);
  std::cout << (dir / "dataset.csv").string() << '\n'
            << (dir / "value_log.csv").string() << '\n';
  return kOk;
}

struct PlanArgs {
  std::string instance;
  std::string dataset;
  std::string rewards;  // empty: plan against the instance's own rewards
  double beta = 0.0;
  std::string out;
};

int run_plan(const PlanArgs& args) {
  const fs::path dir = prepare_out(args.out);
  OpenedInstance opened = open_instance(args.instance);
  const FeatureMap& features = opened.features();
  const ExplorationDataset dataset = load_dataset(args.dataset);
  const RewardFunctionSet rewards = args.rewards.empty()
                                        ? opened.own_rewards()
                                        : load_rewards(args.rewards);
  const double beta =
      args.beta > 0.0 ? args.beta
                      : default_bonus_scale(features.dim(), features.horizon(),
                                            0.1, 0.1);
  const PlanningResult result = plan(dataset, rewards, beta, features);
  save_policy((dir / "policy.csv").string(), result.policy());

  const TabularMdp tabular = opened.tabular();
  std::cout << (dir / "policy.csv").string() << '\n'
            << "V1_pi " << format_double(evaluate_policy(tabular, rewards,
                                                         result.policy()))
            << '\n';
  return kOk;
}

struct SweepArgs {
  SweepConfig config;
  std::string out;
};

int run_sweep_cmd(const SweepArgs& args) {
  const fs::path dir = prepare_out(args.out);
  const std::vector<SweepRow> rows = run_sweep(args.config);
  write_text(dir / "sweep.csv", sweep_csv(rows));
  std::cout << (dir / "sweep.csv").string() << '\n';
  int failed = 0;
  for (const SweepRow& row : rows) {
    if (!row.error.empty()) ++failed;
  }
  if (failed > 0) {
    std::cerr << failed << " of " << rows.size()
              << " cells failed; see the error column\n";
    return kRuntimeError;
  }
  return kOk;
}

struct HardnessArgs {
  HardnessConfig config;
  std::string out;
};

int run_hardness_cmd(const HardnessArgs& args) {
  const fs::path dir = prepare_out(args.out);
  const std::vector<AdversaryReport> reports = run_hardness(args.config);
  write_text(dir / "hardness.csv", hardness_csv(reports));
  std::cout << (dir / "hardness.csv").string() << '\n';
  return kOk;
}

struct GenerativeArgs {
  GenerativeConfig config;
  std::string out;
};

int run_generative_cmd(const GenerativeArgs& args) {
  const fs::path dir = prepare_out(args.out);
  const std::vector<GenerativeRow> rows = run_generative(args.config);
  write_text(dir / "generative.csv", generative_csv(rows));
  std::cout << (dir / "generative.csv").string() << '\n';
  int failed = 0;
  for (const GenerativeRow& row : rows) {
    if (!row.error.empty()) ++failed;
  }
  if (failed > 0) {
    std::cerr << failed << " of " << rows.size() << " instances failed\n";
    return kRuntimeError;
  }
  return kOk;
}

int run_validate(const std::string& instance) {
  const ValidationReport report = validate_instance_file(instance);
  std::cout << validation_text(report);
  return report.all_pass() ? kOk : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale laboratory for reward-free RL with linear "
               "function approximation"};
  app.require_subcommand(1);

  GenInstanceArgs gen;
  CLI::App* gen_cmd =
      app.add_subcommand("gen-instance", "generate and save an instance");
  gen_cmd->add_option("--kind", gen.kind, "anchor, tabular, or hard")
      ->check(CLI::IsMember({"anchor", "tabular", "hard"}));
  gen_cmd->add_option("--d", gen.dim, "feature dimension (anchor)");
  gen_cmd->add_option("--H", gen.horizon, "horizon");
  gen_cmd->add_option("--states", gen.states, "states per level");
  gen_cmd->add_option("--actions", gen.actions, "actions per state");
  gen_cmd->add_flag("--shift", gen.shift,
                    "shift planted rewards into [0, 0.52]");
  gen_cmd->add_option("--seed", gen.seed, "rng seed")->required();
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  ExploreArgs explore;
  CLI::App* explore_cmd = app.add_subcommand(
      "explore", "reward-free exploration on a stored instance");
  explore_cmd->add_option("--instance", explore.instance, "instance file")
      ->required();
  explore_cmd->add_option("-K,--episodes", explore.episodes,
                          "number of episodes");
  explore_cmd->add_option("--beta", explore.beta,
                          "bonus scale; 0 means the default scale");
  explore_cmd->add_option("--epsilon", explore.epsilon, "target accuracy");
  explore_cmd->add_option("--delta", explore.delta, "failure probability");
  explore_cmd->add_option("--seed", explore.seed, "rng seed")->required();
  explore_cmd->add_option("--out", explore.out, "output directory")
      ->required();

  PlanArgs plan_args;
  CLI::App* plan_cmd =
      app.add_subcommand("plan", "plan against a stored dataset");
  plan_cmd->add_option("--instance", plan_args.instance, "instance file")
      ->required();
  plan_cmd->add_option("--dataset", plan_args.dataset, "dataset CSV")
      ->required();
  plan_cmd->add_option("--rewards", plan_args.rewards,
                       "reward CSV; defaults to the instance's own rewards");
  plan_cmd->add_option("--beta", plan_args.beta,
                       "bonus scale; 0 means the default scale");
  plan_cmd->add_option("--out", plan_args.out, "output directory")->required();

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "suboptimality against episode count over seeds");
  sweep_cmd->add_option("--kind", sweep.config.instance.kind,
                        "anchor or tabular")
      ->check(CLI::IsMember({"anchor", "tabular"}));
  sweep_cmd->add_option("--d", sweep.config.instance.dim,
                        "feature dimension (anchor)");
  sweep_cmd->add_option("--H", sweep.config.instance.horizon, "horizon");
  sweep_cmd->add_option("--states", sweep.config.instance.states_per_level,
                        "states per level");
  sweep_cmd->add_option("--actions", sweep.config.instance.actions,
                        "actions per state");
  sweep_cmd
      ->add_option("-K,--episodes", sweep.config.episode_grid,
                   "episode counts to compare")
      ->required();
  sweep_cmd->add_option("--seeds", sweep.config.seeds, "number of seeds");
  sweep_cmd->add_option("--reward-sets", sweep.config.reward_sets,
                        "reward sets per dataset (set 0 is the instance's)");
  sweep_cmd->add_option("--beta", sweep.config.beta,
                        "bonus scale; 0 means the default scale");
  sweep_cmd->add_option("--c-beta", sweep.config.bonus_coeff,
                        "coefficient inside the default bonus scale");
  sweep_cmd->add_option("--epsilon", sweep.config.epsilon, "target accuracy");
  sweep_cmd->add_option("--delta", sweep.config.delta, "failure probability");
  sweep_cmd->add_option("--jobs", sweep.config.jobs, "worker threads");
  sweep_cmd->add_option("--seed", sweep.config.seed, "rng seed")->required();
  sweep_cmd->add_option("--out", sweep.out, "output directory")->required();

  HardnessArgs hardness;
  CLI::App* hardness_cmd = app.add_subcommand(
      "hardness", "explore-then-plan trials on planted instances");
  hardness_cmd->add_option("--H", hardness.config.horizon, "horizon (>= 4)");
  hardness_cmd
      ->add_option("-N,--budgets", hardness.config.budgets,
                   "episode budgets to test")
      ->required();
  hardness_cmd->add_option("--trials", hardness.config.trials,
                           "trials per budget");
  hardness_cmd
      ->add_option("--explorer", hardness.config.explorer,
                   "lsvi, sweep, or omniscient")
      ->check(CLI::IsMember({"lsvi", "sweep", "omniscient"}));
  hardness_cmd
      ->add_option("--planner", hardness.config.planner, "lsvi or model")
      ->check(CLI::IsMember({"lsvi", "model"}));
  hardness_cmd->add_option("--seed", hardness.config.seed, "rng seed")
      ->required();
  hardness_cmd->add_option("--out", hardness.out, "output directory")
      ->required();

  GenerativeArgs generative;
  CLI::App* generative_cmd = app.add_subcommand(
      "generative", "basis probes plus exact planning on planted instances");
  generative_cmd
      ->add_option("--H,--horizons", generative.config.horizons,
                   "horizons to test")
      ->required();
  generative_cmd->add_option("--instances", generative.config.instances,
                             "instances per horizon");
  generative_cmd->add_option("--seed", generative.config.seed, "rng seed")
      ->required();
  generative_cmd->add_option("--out", generative.out, "output directory")
      ->required();

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "check every invariant of a stored instance");
  validate_cmd->add_option("--instance", validate_path, "instance file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_instance(gen);
    if (explore_cmd->parsed()) return run_explore(explore);
    if (plan_cmd->parsed()) return run_plan(plan_args);
    if (sweep_cmd->parsed()) return run_sweep_cmd(sweep);
    if (hardness_cmd->parsed()) return run_hardness_cmd(hardness);
    if (generative_cmd->parsed()) return run_generative_cmd(generative);
    if (validate_cmd->parsed()) return run_validate(validate_path);
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}
