#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rflin/generative.hpp"
#include "rflin/harness.hpp"
#include "rflin/io.hpp"
#include "rflin/oracle.hpp"
#include "rflin/planner.hpp"

namespace py = pybind11;
using namespace rflin;

namespace {

double resolve_beta(double beta, int dim, int horizon, double epsilon,
                    double delta) {
  return beta > 0.0 ? beta
                    : default_bonus_scale(dim, horizon, epsilon, delta);
}

ExplorationResult explore_features(const FeatureMap& features,
                                   EpisodicEnv& env, int episodes,
                                   std::uint64_t seed, double beta,
                                   double epsilon, double delta,
                                   bool incremental) {
  ExplorationConfig config;
  config.episodes = episodes;
  config.epsilon = epsilon;
  config.delta = delta;
  config.incremental = incremental;
  config.beta =
      resolve_beta(beta, features.dim(), features.horizon(), epsilon, delta);
  RngStream rng(seed);
  return run_exploration(features, env, config, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "reward-free exploration and planning with linear value models";

  py::register_exception<Error>(m, "RflinError");

  py::class_<CheckItem>(m, "CheckItem")
      .def_readonly("name", &CheckItem::name)
      .def_readonly("pass_", &CheckItem::pass)
      .def_readonly("advisory", &CheckItem::advisory)
      .def_readonly("residual", &CheckItem::residual)
      .def("__repr__", [](const CheckItem& item) {
        return "<CheckItem " + item.name + (item.pass ? " pass" : " FAIL") +
               " residual " + format_double(item.residual) + ">";
      });

  py::class_<PolicyTable>(m, "PolicyTable")
      .def(py::init<int>(), py::arg("horizon"))
      .def("horizon", &PolicyTable::horizon)
      .def("set", &PolicyTable::set, py::arg("h"), py::arg("state"),
           py::arg("action"))
      .def("action", &PolicyTable::action, py::arg("h"), py::arg("state"))
      .def("defined", &PolicyTable::defined, py::arg("h"), py::arg("state"))
      .def(py::self == py::self);

  py::class_<RewardFunctionSet>(m, "RewardFunctionSet")
      .def(py::init<int>(), py::arg("horizon"))
      .def("horizon", &RewardFunctionSet::horizon)
      .def("set", &RewardFunctionSet::set, py::arg("h"), py::arg("state"),
           py::arg("action"), py::arg("reward"))
      .def("at", &RewardFunctionSet::at, py::arg("h"), py::arg("state"),
           py::arg("action"))
      .def("has", &RewardFunctionSet::has, py::arg("h"), py::arg("state"),
           py::arg("action"));

  py::class_<TransitionStep>(m, "TransitionStep")
      .def_readonly("h", &TransitionStep::h)
      .def_readonly("state", &TransitionStep::state)
      .def_readonly("action", &TransitionStep::action)
      .def_readonly("next", &TransitionStep::next);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("steps", &Trajectory::steps);

  py::class_<ExplorationDataset>(m, "ExplorationDataset")
      .def_readonly("horizon", &ExplorationDataset::horizon)
      .def_readonly("trajectories", &ExplorationDataset::trajectories)
      .def("episodes", &ExplorationDataset::episodes);

  py::class_<ExplorationResult>(m, "ExplorationResult")
      .def_readonly("dataset", &ExplorationResult::dataset)
      .def_readonly("value_log", &ExplorationResult::value_log)
      .def_readonly("initial_states", &ExplorationResult::initial_states)
      .def_readonly("visited_rewards", &ExplorationResult::visited_rewards);

  py::class_<TabularMdp>(m, "TabularMdp")
      .def_readonly("horizon", &TabularMdp::horizon)
      .def_readonly("num_actions", &TabularMdp::num_actions);

  py::class_<LinearMdpSpec>(m, "LinearMdpSpec")
      .def("horizon", &LinearMdpSpec::horizon)
      .def("dim", &LinearMdpSpec::dim)
      .def("num_actions", &LinearMdpSpec::num_actions)
      .def("reward", &LinearMdpSpec::reward, py::arg("h"), py::arg("state"),
           py::arg("action"))
      .def("reward_set", &LinearMdpSpec::reward_set)
      .def("validate", &LinearMdpSpec::validate);

  py::class_<HardInstance>(m, "HardInstance")
      .def_readonly("horizon", &HardInstance::horizon)
      .def_readonly("dim", &HardInstance::dim)
      .def_readonly("planted_state", &HardInstance::planted_state)
      .def_readonly("planted_action", &HardInstance::planted_action)
      .def_readonly("planted_last_action", &HardInstance::planted_last_action)
      .def_readonly("rewards", &HardInstance::rewards)
      .def_readonly("shifted", &HardInstance::shifted)
      .def("good_state", &HardInstance::good_state, py::arg("h"))
      .def("bad_state", &HardInstance::bad_state, py::arg("h"))
      .def("next_state", &HardInstance::next_state, py::arg("h"),
           py::arg("state"), py::arg("action"))
      .def("linear_qstar", &HardInstance::linear_qstar, py::arg("h"),
           py::arg("state"), py::arg("action"))
      .def("planted_pair", &HardInstance::planted_pair, py::arg("h"));

  py::class_<ExactSolution>(m, "ExactSolution")
      .def_readonly("q", &ExactSolution::q)
      .def_readonly("v", &ExactSolution::v)
      .def_readonly("policy", &ExactSolution::policy)
      .def_readonly("initial_value", &ExactSolution::initial_value);

  py::class_<PlanningResult>(m, "PlanningResult")
      .def_property_readonly(
          "policy",
          [](const PlanningResult& r) { return r.policy(); })
      .def("value", &PlanningResult::value, py::arg("h"),
           py::arg("state_index"));

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("success", &TrialRecord::success)
      .def_readonly("missed_goal", &TrialRecord::missed_goal)
      .def_readonly("guessed_last", &TrialRecord::guessed_last)
      .def_readonly("suboptimality", &TrialRecord::suboptimality)
      .def_readonly("episodes_used", &TrialRecord::episodes_used);

  py::class_<AdversaryReport>(m, "AdversaryReport")
      .def_readonly("horizon", &AdversaryReport::horizon)
      .def_readonly("budget", &AdversaryReport::budget)
      .def_readonly("trials", &AdversaryReport::trials)
      .def_readonly("success_rate", &AdversaryReport::success_rate)
      .def_readonly("missed_goal_rate", &AdversaryReport::missed_goal_rate)
      .def_readonly("guess_rate", &AdversaryReport::guess_rate)
      .def_readonly("bound", &AdversaryReport::bound)
      .def_readonly("records", &AdversaryReport::records);

  py::class_<Probe>(m, "Probe")
      .def_readonly("h", &Probe::h)
      .def_readonly("state", &Probe::state)
      .def_readonly("action", &Probe::action)
      .def_readonly("next", &Probe::next);

  py::class_<ProbeTranscript>(m, "ProbeTranscript")
      .def_readonly("horizon", &ProbeTranscript::horizon)
      .def_readonly("probes", &ProbeTranscript::probes)
      .def("queries", &ProbeTranscript::queries);

  py::class_<GenerativeResult>(m, "GenerativeResult")
      .def_readonly("horizon", &GenerativeResult::horizon)
      .def_readonly("policy", &GenerativeResult::policy)
      .def("q", &GenerativeResult::q, py::arg("h"), py::arg("state"),
           py::arg("action"))
      .def("value", &GenerativeResult::value, py::arg("h"), py::arg("state"));

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("parse_ok", &ValidationReport::parse_ok)
      .def_readonly("parse_error", &ValidationReport::parse_error)
      .def_readonly("kind", &ValidationReport::kind)
      .def_readonly("items", &ValidationReport::items)
      .def("all_pass", &ValidationReport::all_pass);

  m.def(
      "make_anchor_instance",
      [](int dim, int horizon, int states, int actions, std::uint64_t seed) {
        RngStream rng(seed);
        return make_random_anchor_instance(dim, horizon, states, actions, rng);
      },
      py::arg("dim"), py::arg("horizon"), py::arg("states"),
      py::arg("actions"), py::arg("seed"));
  m.def(
      "make_tabular_instance",
      [](int horizon, int states, int actions, std::uint64_t seed) {
        RngStream rng(seed);
        TabularMdp mdp = make_random_tabular(horizon, states, actions, rng);
        return make_tabular_embedding(mdp,
                                      make_random_tabular_rewards(mdp, rng));
      },
      py::arg("horizon"), py::arg("states"), py::arg("actions"),
      py::arg("seed"));
  m.def(
      "make_hard_instance",
      [](int horizon, std::uint64_t seed, bool shift) {
        RngStream rng(seed);
        return build_hard_instance(horizon, rng, shift);
      },
      py::arg("horizon"), py::arg("seed"), py::arg("shift") = false);

  m.def("default_bonus_scale", &default_bonus_scale, py::arg("dim"),
        py::arg("horizon"), py::arg("epsilon") = 0.1, py::arg("delta") = 0.1,
        py::arg("c") = kDefaultBonusCoeff);
  m.def("default_episode_budget", &default_episode_budget, py::arg("dim"),
        py::arg("horizon"), py::arg("epsilon") = 0.1, py::arg("delta") = 0.1,
        py::arg("c") = kDefaultBudgetCoeff);

  m.def(
      "explore",
      [](const LinearMdpSpec& spec, int episodes, std::uint64_t seed,
         double beta, double epsilon, double delta, bool incremental) {
        LinearMdpEnv env(spec);
        return explore_features(spec.features(), env, episodes, seed, beta,
                                epsilon, delta, incremental);
      },
      py::arg("instance"), py::arg("episodes"), py::arg("seed"),
      py::arg("beta") = 0.0, py::arg("epsilon") = 0.1, py::arg("delta") = 0.1,
      py::arg("incremental") = true);
  m.def(
      "explore",
      [](const HardInstance& instance, int episodes, std::uint64_t seed,
         double beta, double epsilon, double delta, bool incremental) {
        HardInstanceEnv env(instance);
        return explore_features(instance.features(), env, episodes, seed, beta,
                                epsilon, delta, incremental);
      },
      py::arg("instance"), py::arg("episodes"), py::arg("seed"),
      py::arg("beta") = 0.0, py::arg("epsilon") = 0.1, py::arg("delta") = 0.1,
      py::arg("incremental") = true);

  m.def(
      "plan",
      [](const ExplorationDataset& dataset, const RewardFunctionSet& rewards,
         const LinearMdpSpec& spec, double beta) {
        return plan(dataset, rewards,
                    resolve_beta(beta, spec.dim(), spec.horizon(), 0.1, 0.1),
                    spec.features());
      },
      py::arg("dataset"), py::arg("rewards"), py::arg("instance"),
      py::arg("beta") = 0.0);
  m.def(
      "plan",
      [](const ExplorationDataset& dataset, const RewardFunctionSet& rewards,
         const HardInstance& instance, double beta) {
        return plan(dataset, rewards,
                    resolve_beta(beta, instance.dim, instance.horizon, 0.1,
                                 0.1),
                    instance.features());
      },
      py::arg("dataset"), py::arg("rewards"), py::arg("instance"),
      py::arg("beta") = 0.0);

  m.def("materialize",
        [](const LinearMdpSpec& spec) { return materialize_transitions(spec); },
        py::arg("instance"));
  m.def("materialize",
        [](const HardInstance& instance) {
          return materialize_transitions(instance);
        },
        py::arg("instance"));

  m.def("solve_exact", &solve_exact, py::arg("mdp"), py::arg("rewards"));
  m.def("evaluate_policy", &evaluate_policy, py::arg("mdp"),
        py::arg("rewards"), py::arg("policy"));
  m.def("suboptimality", &suboptimality, py::arg("mdp"), py::arg("rewards"),
        py::arg("policy"));

  m.def(
      "adversary_game",
      [](int horizon, long budget, int trials, std::uint64_t seed,
         const std::string& explorer, const std::string& planner) {
        HardnessConfig config;
        config.horizon = horizon;
        config.budgets = {budget};
        config.trials = trials;
        config.seed = seed;
        config.explorer = explorer;
        config.planner = planner;
        return run_hardness(config).front();
      },
      py::arg("horizon"), py::arg("budget"), py::arg("trials"),
      py::arg("seed"), py::arg("explorer") = "lsvi",
      py::arg("planner") = "lsvi");

  m.def(
      "generative_explore",
      [](const HardInstance& instance) {
        return generative_explore(instance.features(),
                                  exact_transition_oracle(instance));
      },
      py::arg("instance"));
  m.def(
      "generative_plan",
      [](const HardInstance& instance, const ProbeTranscript& transcript) {
        return generative_plan(instance.features(), transcript,
                               instance.rewards);
      },
      py::arg("instance"), py::arg("transcript"));

  m.def("save_instance",
        [](const std::string& path, const LinearMdpSpec& spec) {
          save_instance(path, spec);
        },
        py::arg("path"), py::arg("instance"));
  m.def("save_instance",
        [](const std::string& path, const HardInstance& instance) {
          save_instance(path, instance);
        },
        py::arg("path"), py::arg("instance"));
  m.def(
      "load_linear_instance",
      [](const std::string& path, bool validate) {
        LoadedInstance loaded = load_instance(path, validate);
        if (!loaded.linear) {
          throw InvalidInput("file does not hold a linear-mdp instance");
        }
        return *loaded.linear;
      },
      py::arg("path"), py::arg("validate") = true);
  m.def(
      "load_hard_instance",
      [](const std::string& path, bool validate) {
        LoadedInstance loaded = load_instance(path, validate);
        if (!loaded.hard) {
          throw InvalidInput("file does not hold a planted instance");
        }
        return *loaded.hard;
      },
      py::arg("path"), py::arg("validate") = true);

  m.def("save_dataset", &save_dataset, py::arg("path"), py::arg("dataset"));
  m.def("load_dataset", &load_dataset, py::arg("path"),
        py::arg("validate") = true);
  m.def("save_policy", &save_policy, py::arg("path"), py::arg("policy"));
  m.def("load_policy", &load_policy, py::arg("path"));
  m.def("save_rewards", &save_rewards, py::arg("path"), py::arg("rewards"));
  m.def("load_rewards", &load_rewards, py::arg("path"));

  m.def("validate_instance_file", &validate_instance_file, py::arg("path"));
}
