#pragma once

#include <optional>
#include <string>

#include "rflin/generative.hpp"
#include "rflin/hardness.hpp"
#include "rflin/mdp.hpp"

namespace rflin {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Instance files are line-oriented text with a `rflin-instance v1` magic
// line, a `kind` line, scalar headers, then one record per line (`states`,
// `phi`, `core`, `eta`, `initial`, and for planted instances `planted`,
// `shifted`, `theta`, `reward`). Doubles survive a save/load round trip
// bit for bit.
void save_instance(const std::string& path, const LinearMdpSpec& spec);
void save_instance(const std::string& path, const HardInstance& instance);

struct LoadedInstance {
  std::string kind;  // "linear-mdp" or "hard"
  std::optional<LinearMdpSpec> linear;
  std::optional<HardInstance> hard;
};

// `validate` runs the model invariant checks after assembly (linear kinds)
// or re-derives the planted structure and compares (hard kinds). Token and
// record problems raise ParseError with a line number; assembly problems
// raise InvalidInput; invariant failures raise InvalidModel.
LoadedInstance load_instance(const std::string& path, bool validate = true);

// Transition datasets: CSV `episode,h,state,action,next_state` with -1 as
// the final-step successor.
void save_dataset(const std::string& path, const ExplorationDataset& dataset);
ExplorationDataset load_dataset(const std::string& path, bool validate = true);

// Policies: CSV `h,state,action`.
void save_policy(const std::string& path, const PolicyTable& policy);
PolicyTable load_policy(const std::string& path);

// Reward tables: CSV `h,state,action,reward`.
void save_rewards(const std::string& path, const RewardFunctionSet& rewards);
RewardFunctionSet load_rewards(const std::string& path);

// Per-episode estimated initial values: CSV `episode,V1_estimate`.
void save_value_log(const std::string& path, const std::vector<double>& log);
std::vector<double> load_value_log(const std::string& path);

// Generative-model probes: CSV `h,state,action,next_state`.
void save_probes(const std::string& path, const ProbeTranscript& transcript);
ProbeTranscript load_probes(const std::string& path);

}  // namespace rflin
