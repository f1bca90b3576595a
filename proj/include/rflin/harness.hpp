#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rflin/explorer.hpp"
#include "rflin/generative.hpp"
#include "rflin/hardness.hpp"
#include "rflin/mdp.hpp"

namespace rflin {

// Which random instance a sweep cell runs on.
struct InstanceConfig {
  std::string kind = "anchor";  // "anchor" or "tabular"
  int dim = 6;                  // anchor kinds only; tabular derives its own
  int horizon = 4;
  int states_per_level = 8;
  int actions = 2;
};

LinearMdpSpec build_instance(const InstanceConfig& instance,
                             std::uint64_t seed);

struct SweepConfig {
  InstanceConfig instance;
  std::vector<int> episode_grid;  // K values, explored once at the maximum
  int seeds = 1;                  // fan out as seed, seed+1, ...
  std::uint64_t seed = 0;
  int reward_sets = 1;  // set 0 is the instance's own; others random linear
  double beta = 0.0;    // <= 0 selects the default scale
  double bonus_coeff = kDefaultBonusCoeff;
  double epsilon = 0.1;
  double delta = 0.1;
  int jobs = 1;
};

struct SweepRow {
  std::string kind;
  int dim = 0;
  int horizon = 0;
  int episodes = 0;
  std::uint64_t seed = 0;
  int reward_set = 0;
  double beta = 0.0;
  double bonus_coeff = 0.0;
  double suboptimality = 0.0;
  double v_star = 0.0;
  double v_pi = 0.0;
  std::string error;  // empty unless this cell failed; other cells continue
};

// Explore once per seed at the largest K, then plan on episode prefixes for
// every (K, reward set) cell. Seeds run on a bounded worker pool; rows come
// back in (K, seed, reward set) order regardless of completion order.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct HardnessConfig {
  int horizon = 8;
  std::vector<long> budgets;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string explorer = "lsvi";  // "lsvi", "sweep", or "omniscient"
  std::string planner = "lsvi";   // "lsvi" or "model"
};

// One adversary game per budget, all against the configured procedures.
std::vector<AdversaryReport> run_hardness(const HardnessConfig& config);

// Header: H,budget,trials,success_rate,eventE_rate,bound. The eventE_rate
// column carries the missed-goal rate.
std::string hardness_csv(const std::vector<AdversaryReport>& reports);

struct GenerativeConfig {
  std::vector<int> horizons;
  int instances = 5;  // per horizon, seeded seed, seed+1, ...
  std::uint64_t seed = 0;
};

struct GenerativeRow {
  int horizon = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  long queries = 0;
  long query_cap = 0;  // dim * horizon
  double max_q_error = 0.0;
  double suboptimality = 0.0;
  std::string error;
};

// Probe-then-plan on fresh planted instances, scored against the exact
// solver.
std::vector<GenerativeRow> run_generative(const GenerativeConfig& config);

std::string generative_csv(const std::vector<GenerativeRow>& rows);

struct ValidationReport {
  bool parse_ok = false;
  std::string parse_error;  // set when parse_ok is false
  std::string kind;
  std::vector<CheckItem> items;

  bool all_pass() const;
};

// Loads an instance file without the loader's own checks, then reports every
// model invariant with pass/fail and the worst residual seen.
ValidationReport validate_instance_file(const std::string& path);

std::string validation_text(const ValidationReport& report);

}  // namespace rflin
