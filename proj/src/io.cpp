#include "rflin/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace rflin {
namespace {

constexpr const char* kMagic = "rflin-instance v1";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out.precision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path + " for reading");
  return in;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw InvalidInput("write to " + path + " failed");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream stream(line);
  std::string tok;
  while (stream >> tok) out.push_back(tok);
  return out;
}

long long parse_int(const std::string& tok, long line_no) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (errno != 0 || end == tok.c_str() || *end != '\0') {
    throw ParseError("expected an integer, got '" + tok + "'", line_no);
  }
  return v;
}

double parse_real(const std::string& tok, long line_no) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw ParseError("expected a number, got '" + tok + "'", line_no);
  }
  return v;
}

Eigen::VectorXd parse_vector(const std::vector<std::string>& toks, size_t from,
                             int expected, long line_no) {
  if (static_cast<int>(toks.size() - from) != expected) {
    throw ParseError("expected " + std::to_string(expected) +
                         " numbers, got " + std::to_string(toks.size() - from),
                     line_no);
  }
  Eigen::VectorXd v(expected);
  for (int i = 0; i < expected; ++i) v[i] = parse_real(toks[from + i], line_no);
  return v;
}

void write_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
  out << '\n';
}

// Shared shape of both instance kinds while records are being collected.
struct InstanceBuilder {
  std::string kind;
  int horizon = 0;
  int dim = 0;
  int actions = 0;
  std::map<int, std::vector<StateId>> states;
  std::map<std::tuple<int, StateId, int>, Eigen::VectorXd> phis;
  std::map<std::pair<int, StateId>, Eigen::VectorXd> cores;
  std::map<int, Eigen::VectorXd> etas;
  std::map<int, Eigen::VectorXd> thetas;
  std::map<std::tuple<int, StateId, int>, double> rewards;
  std::optional<Eigen::VectorXd> initial;
  std::optional<std::tuple<StateId, int, int>> planted;
  std::optional<bool> shifted;
};

int require_level(const InstanceBuilder& b, long long h, long line_no) {
  if (h < 1 || h > b.horizon) {
    throw ParseError("level " + std::to_string(h) + " outside 1.." +
                         std::to_string(b.horizon),
                     line_no);
  }
  return static_cast<int>(h);
}

StateLayout assemble_layout(const InstanceBuilder& b) {
  std::vector<LevelStates> levels;
  for (int h = 1; h <= b.horizon; ++h) {
    auto it = b.states.find(h);
    if (it == b.states.end()) {
      throw InvalidInput("no states record for level " + std::to_string(h));
    }
    levels.emplace_back(it->second);
  }
  return StateLayout(std::move(levels));
}

std::vector<Eigen::MatrixXd> assemble_columns(const InstanceBuilder& b,
                                              const StateLayout& layout) {
  std::vector<Eigen::MatrixXd> columns(b.horizon);
  for (int h = 1; h <= b.horizon; ++h) {
    const LevelStates& level = layout.level(h);
    columns[h - 1].resize(b.dim, level.size() * b.actions);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < b.actions; ++a) {
        auto it = b.phis.find({h, level.id(i), a});
        if (it == b.phis.end()) {
          throw InvalidInput("no phi record for level " + std::to_string(h) +
                             " state " + std::to_string(level.id(i)) +
                             " action " + std::to_string(a));
        }
        columns[h - 1].col(i * b.actions + a) = it->second;
      }
    }
  }
  return columns;
}

LinearMdpSpec assemble_linear(const InstanceBuilder& b, bool validate) {
  const StateLayout layout = assemble_layout(b);
  FeatureMap features(b.dim, layout, b.actions, assemble_columns(b, layout));

  std::vector<Eigen::MatrixXd> cores(b.horizon - 1);
  for (int h = 1; h < b.horizon; ++h) {
    const LevelStates& next_level = layout.level(h + 1);
    cores[h - 1].resize(next_level.size(), b.dim);
    for (int i = 0; i < next_level.size(); ++i) {
      auto it = b.cores.find({h, next_level.id(i)});
      if (it == b.cores.end()) {
        throw InvalidInput("no core record for level " + std::to_string(h) +
                           " successor " + std::to_string(next_level.id(i)));
      }
      cores[h - 1].row(i) = it->second.transpose();
    }
  }

  std::vector<Eigen::VectorXd> etas(b.horizon);
  for (int h = 1; h <= b.horizon; ++h) {
    auto it = b.etas.find(h);
    if (it == b.etas.end()) {
      throw InvalidInput("no eta record for level " + std::to_string(h));
    }
    etas[h - 1] = it->second;
  }

  if (!b.initial) throw InvalidInput("no initial record");
  if (b.initial->size() != layout.level(1).size()) {
    throw InvalidInput("initial distribution has " +
                       std::to_string(b.initial->size()) + " entries for " +
                       std::to_string(layout.level(1).size()) +
                       " first-level states");
  }

  return validate ? LinearMdpSpec::create(std::move(features), std::move(cores),
                                          std::move(etas), *b.initial)
                  : LinearMdpSpec::unchecked(std::move(features),
                                             std::move(cores), std::move(etas),
                                             *b.initial);
}

HardInstance assemble_hard(const InstanceBuilder& b, bool validate) {
  if (b.actions != 2) {
    throw InvalidInput("planted instances always have two actions");
  }
  if (b.horizon < 4) throw InvalidInput("planted instances need horizon >= 4");
  if (!b.planted) throw InvalidInput("no planted record");
  if (!b.shifted) throw InvalidInput("no shifted record");

  const StateLayout layout = assemble_layout(b);
  HardInstance inst;
  inst.horizon = b.horizon;
  inst.dim = b.dim;
  std::tie(inst.planted_state, inst.planted_action, inst.planted_last_action) =
      *b.planted;
  inst.shifted = *b.shifted;
  inst.feature_map =
      FeatureMap(b.dim, layout, 2, assemble_columns(b, layout));

  inst.theta.resize(b.horizon);
  for (int h = 1; h <= b.horizon; ++h) {
    auto it = b.thetas.find(h);
    if (it == b.thetas.end()) {
      throw InvalidInput("no theta record for level " + std::to_string(h));
    }
    inst.theta[h - 1] = it->second;
  }

  inst.rewards = RewardFunctionSet(b.horizon);
  for (int h = 1; h <= b.horizon; ++h) {
    const LevelStates& level = layout.level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < 2; ++a) {
        auto it = b.rewards.find({h, level.id(i), a});
        if (it == b.rewards.end()) {
          throw InvalidInput("no reward record for level " + std::to_string(h) +
                             " state " + std::to_string(level.id(i)) +
                             " action " + std::to_string(a));
        }
        inst.rewards.set(h, level.id(i), a, it->second);
      }
    }
  }

  if (validate) {
    // The stated plant must sit at level H-2, the state sets must follow the
    // binary-tree numbering that next_state assumes, and theta and the
    // rewards must reproduce the planted construction.
    for (int h = 1; h <= b.horizon - 2; ++h) {
      const LevelStates& level = layout.level(h);
      for (int i = 0; i < level.size(); ++i) {
        if (level.id(i) != (StateId{1} << (h - 1)) + i) {
          throw InvalidModel("level " + std::to_string(h) +
                             " states do not follow the tree numbering");
        }
      }
      if (level.size() != 1 << (h - 1)) {
        throw InvalidModel("level " + std::to_string(h) + " has " +
                           std::to_string(level.size()) + " states, expected " +
                           std::to_string(1 << (h - 1)));
      }
    }
    for (int h = b.horizon - 1; h <= b.horizon; ++h) {
      const std::vector<StateId> want{inst.good_state(h), inst.bad_state(h)};
      if (layout.level(h).ids() != want) {
        throw InvalidModel("level " + std::to_string(h) +
                           " must hold exactly the good and bad states");
      }
    }
    if (!layout.level(b.horizon - 2).contains(inst.planted_state) ||
        inst.planted_action < 0 || inst.planted_action > 1 ||
        inst.planted_last_action < 0 || inst.planted_last_action > 1) {
      throw InvalidModel("planted record is not a level-(H-2) pair");
    }
    for (int h = 1; h <= b.horizon; ++h) {
      const auto [s, a] = inst.planted_pair(h);
      const double drift =
          (inst.theta[h - 1] - 0.5 * inst.feature_map.phi(h, s, a))
              .lpNorm<Eigen::Infinity>();
      if (drift > kModelSlack) {
        throw InvalidModel("theta at level " + std::to_string(h) +
                           " does not match the planted feature (off by " +
                           format_double(drift) + ")");
      }
    }
    const double shift = inst.shifted ? HardInstance::kRewardShift : 0.0;
    for (int h = 1; h <= b.horizon; ++h) {
      const LevelStates& level = layout.level(h);
      for (int i = 0; i < level.size(); ++i) {
        for (int a = 0; a < 2; ++a) {
          double want = inst.linear_qstar(h, level.id(i), a);
          if (h < b.horizon) {
            const StateId next = inst.next_state(h, level.id(i), a);
            double best = 0.0;
            for (int na = 0; na < 2; ++na) {
              const double q = inst.linear_qstar(h + 1, next, na);
              if (na == 0 || q > best) best = q;
            }
            want -= best;
          }
          want += shift;
          const double got = inst.rewards.at(h, level.id(i), a);
          if (std::abs(got - want) > kModelSlack) {
            throw InvalidModel(
                "reward at level " + std::to_string(h) + " state " +
                std::to_string(level.id(i)) + " action " + std::to_string(a) +
                " is off by " + format_double(std::abs(got - want)));
          }
        }
      }
    }
  }
  return inst;
}

void save_states_and_phis(std::ofstream& out, const FeatureMap& features) {
  const StateLayout& layout = features.layout();
  for (int h = 1; h <= layout.horizon(); ++h) {
    out << "states " << h;
    for (StateId s : layout.level(h).ids()) out << ' ' << s;
    out << '\n';
  }
  for (int h = 1; h <= layout.horizon(); ++h) {
    const LevelStates& level = layout.level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < features.num_actions(); ++a) {
        out << "phi " << h << ' ' << level.id(i) << ' ' << a;
        write_vector(out, features.phi_by_index(h, i, a));
      }
    }
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

void save_instance(const std::string& path, const LinearMdpSpec& spec) {
  std::ofstream out = open_out(path);
  out << kMagic << '\n';
  out << "kind linear-mdp\n";
  out << "horizon " << spec.horizon() << '\n';
  out << "dim " << spec.dim() << '\n';
  out << "actions " << spec.num_actions() << '\n';
  save_states_and_phis(out, spec.features());
  for (int h = 1; h < spec.horizon(); ++h) {
    const LevelStates& next_level = spec.states().level(h + 1);
    for (int i = 0; i < next_level.size(); ++i) {
      out << "core " << h << ' ' << next_level.id(i);
      write_vector(out, spec.core(h).row(i).transpose());
    }
  }
  for (int h = 1; h <= spec.horizon(); ++h) {
    out << "eta " << h;
    write_vector(out, spec.eta(h));
  }
  out << "initial";
  write_vector(out, spec.initial());
  finish_write(out, path);
}

void save_instance(const std::string& path, const HardInstance& instance) {
  std::ofstream out = open_out(path);
  out << kMagic << '\n';
  out << "kind hard\n";
  out << "horizon " << instance.horizon << '\n';
  out << "dim " << instance.dim << '\n';
  out << "actions 2\n";
  save_states_and_phis(out, instance.features());
  out << "planted " << instance.planted_state << ' ' << instance.planted_action
      << ' ' << instance.planted_last_action << '\n';
  out << "shifted " << (instance.shifted ? 1 : 0) << '\n';
  for (int h = 1; h <= instance.horizon; ++h) {
    out << "theta " << h;
    write_vector(out, instance.theta[h - 1]);
  }
  for (int h = 1; h <= instance.horizon; ++h) {
    const LevelStates& level = instance.states().level(h);
    for (int i = 0; i < level.size(); ++i) {
      for (int a = 0; a < 2; ++a) {
        out << "reward " << h << ' ' << level.id(i) << ' ' << a << ' '
            << format_double(instance.rewards.at(h, level.id(i), a)) << '\n';
      }
    }
  }
  finish_write(out, path);
}

LoadedInstance load_instance(const std::string& path, bool validate) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line() || line != kMagic) {
    throw ParseError("missing '" + std::string(kMagic) + "' header", 1);
  }

  InstanceBuilder b;
  // Fixed header order before the per-record lines start.
  const std::vector<std::string> header_keys{"kind", "horizon", "dim",
                                            "actions"};
  for (const std::string& key : header_keys) {
    if (!next_line()) throw ParseError("missing '" + key + "' line", line_no);
    const std::vector<std::string> toks = tokens(line);
    if (toks.size() != 2 || toks[0] != key) {
      throw ParseError("expected '" + key + " <value>'", line_no);
    }
    if (key == "kind") {
      b.kind = toks[1];
      if (b.kind != "linear-mdp" && b.kind != "hard") {
        throw ParseError("unknown kind '" + b.kind + "'", line_no);
      }
    } else {
      const long long v = parse_int(toks[1], line_no);
      if (v < 1 || v > 1'000'000) {
        throw ParseError("'" + key + "' value " + std::to_string(v) +
                             " out of range",
                         line_no);
      }
      if (key == "horizon") b.horizon = static_cast<int>(v);
      if (key == "dim") b.dim = static_cast<int>(v);
      if (key == "actions") b.actions = static_cast<int>(v);
    }
  }

  while (next_line()) {
    const std::vector<std::string> toks = tokens(line);
    const std::string& tag = toks[0];
    if (tag == "states") {
      if (toks.size() < 2) throw ParseError("states line needs a level", line_no);
      const int h = require_level(b, parse_int(toks[1], line_no), line_no);
      if (b.states.count(h)) {
        throw ParseError("duplicate states record for level " +
                             std::to_string(h),
                         line_no);
      }
      std::vector<StateId> ids;
      for (size_t i = 2; i < toks.size(); ++i) {
        ids.push_back(parse_int(toks[i], line_no));
      }
      if (ids.empty()) throw ParseError("empty state set", line_no);
      b.states[h] = std::move(ids);
    } else if (tag == "phi") {
      if (toks.size() < 4) throw ParseError("phi line too short", line_no);
      const int h = require_level(b, parse_int(toks[1], line_no), line_no);
      const StateId s = parse_int(toks[2], line_no);
      const int a = static_cast<int>(parse_int(toks[3], line_no));
      b.phis[{h, s, a}] = parse_vector(toks, 4, b.dim, line_no);
    } else if (tag == "core") {
      if (toks.size() < 3) throw ParseError("core line too short", line_no);
      const int h = require_level(b, parse_int(toks[1], line_no), line_no);
      const StateId s = parse_int(toks[2], line_no);
      b.cores[{h, s}] = parse_vector(toks, 3, b.dim, line_no);
    } else if (tag == "eta") {
      if (toks.size() < 2) throw ParseError("eta line too short", line_no);
      const int h = require_level(b, parse_int(toks[1], line_no), line_no);
      b.etas[h] = parse_vector(toks, 2, b.dim, line_no);
    } else if (tag == "theta") {
      if (toks.size() < 2) throw ParseError("theta line too short", line_no);
      const int h = require_level(b, parse_int(toks[1], line_no), line_no);
      b.thetas[h] = parse_vector(toks, 2, b.dim, line_no);
    } else if (tag == "reward") {
      if (toks.size() != 5) throw ParseError("reward line needs h, state, action, value", line_no);
      const int h = require_level(b, parse_int(toks[1], line_no), line_no);
      const StateId s = parse_int(toks[2], line_no);
      const int a = static_cast<int>(parse_int(toks[3], line_no));
      b.rewards[{h, s, a}] = parse_real(toks[4], line_no);
    } else if (tag == "initial") {
      if (toks.size() < 2) throw ParseError("initial line needs entries", line_no);
      b.initial = parse_vector(toks, 1, static_cast<int>(toks.size() - 1), line_no);
    } else if (tag == "planted") {
      if (toks.size() != 4) throw ParseError("planted line needs state and two actions", line_no);
      b.planted = {parse_int(toks[1], line_no),
                   static_cast<int>(parse_int(toks[2], line_no)),
                   static_cast<int>(parse_int(toks[3], line_no))};
    } else if (tag == "shifted") {
      if (toks.size() != 2) throw ParseError("shifted line needs 0 or 1", line_no);
      const long long v = parse_int(toks[1], line_no);
      if (v != 0 && v != 1) throw ParseError("shifted must be 0 or 1", line_no);
      b.shifted = v == 1;
    } else {
      throw ParseError("unknown record '" + tag + "'", line_no);
    }
  }

  LoadedInstance loaded;
  loaded.kind = b.kind;
  if (b.kind == "linear-mdp") {
    loaded.linear = assemble_linear(b, validate);
  } else {
    loaded.hard = assemble_hard(b, validate);
  }
  return loaded;
}

void save_dataset(const std::string& path, const ExplorationDataset& dataset) {
  std::ofstream out = open_out(path);
  out << "episode,h,state,action,next_state\n";
  for (int e = 0; e < dataset.episodes(); ++e) {
    for (const TransitionStep& step : dataset.trajectories[e].steps) {
      out << e << ',' << step.h << ',' << step.state << ',' << step.action
          << ',' << step.next << '\n';
    }
  }
  finish_write(out, path);
}

ExplorationDataset load_dataset(const std::string& path, bool validate) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "episode,h,state,action,next_state") {
    throw ParseError("missing dataset header", 1);
  }
  ExplorationDataset dataset;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 5) throw ParseError("expected 5 fields", line_no);
    const long long episode = parse_int(f[0], line_no);
    if (episode < 0 || episode > dataset.episodes()) {
      throw ParseError("episodes must be numbered contiguously from 0",
                       line_no);
    }
    if (episode == dataset.episodes()) dataset.trajectories.emplace_back();
    TransitionStep step;
    step.h = static_cast<int>(parse_int(f[1], line_no));
    step.state = parse_int(f[2], line_no);
    step.action = static_cast<int>(parse_int(f[3], line_no));
    step.next = parse_int(f[4], line_no);
    dataset.trajectories[episode].steps.push_back(step);
    dataset.horizon = std::max(dataset.horizon, step.h);
  }
  if (validate && dataset.episodes() > 0) check_dataset(dataset);
  return dataset;
}

void save_policy(const std::string& path, const PolicyTable& policy) {
  std::ofstream out = open_out(path);
  out << "h,state,action\n";
  for (int h = 1; h <= policy.horizon(); ++h) {
    for (const auto& [s, a] : policy.level(h)) {
      out << h << ',' << s << ',' << a << '\n';
    }
  }
  finish_write(out, path);
}

PolicyTable load_policy(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "h,state,action") {
    throw ParseError("missing policy header", 1);
  }
  std::vector<std::tuple<int, StateId, int>> rows;
  int horizon = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
    const int h = static_cast<int>(parse_int(f[0], line_no));
    if (h < 1) throw ParseError("level must be >= 1", line_no);
    rows.emplace_back(h, parse_int(f[1], line_no),
                      static_cast<int>(parse_int(f[2], line_no)));
    horizon = std::max(horizon, h);
  }
  PolicyTable policy(horizon);
  for (const auto& [h, s, a] : rows) policy.set(h, s, a);
  return policy;
}

void save_rewards(const std::string& path, const RewardFunctionSet& rewards) {
  std::ofstream out = open_out(path);
  out << "h,state,action,reward\n";
  for (int h = 1; h <= rewards.horizon(); ++h) {
    for (const auto& [key, r] : rewards.level(h)) {
      out << h << ',' << key.first << ',' << key.second << ','
          << format_double(r) << '\n';
    }
  }
  finish_write(out, path);
}

RewardFunctionSet load_rewards(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "h,state,action,reward") {
    throw ParseError("missing rewards header", 1);
  }
  std::vector<std::tuple<int, StateId, int, double>> rows;
  int horizon = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 4) throw ParseError("expected 4 fields", line_no);
    const int h = static_cast<int>(parse_int(f[0], line_no));
    if (h < 1) throw ParseError("level must be >= 1", line_no);
    rows.emplace_back(h, parse_int(f[1], line_no),
                      static_cast<int>(parse_int(f[2], line_no)),
                      parse_real(f[3], line_no));
    horizon = std::max(horizon, h);
  }
  RewardFunctionSet rewards(horizon);
  for (const auto& [h, s, a, r] : rows) rewards.set(h, s, a, r);
  return rewards;
}

void save_value_log(const std::string& path, const std::vector<double>& log) {
  std::ofstream out = open_out(path);
  out << "episode,V1_estimate\n";
  for (size_t e = 0; e < log.size(); ++e) {
    out << e << ',' << format_double(log[e]) << '\n';
  }
  finish_write(out, path);
}

std::vector<double> load_value_log(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "episode,V1_estimate") {
    throw ParseError("missing value-log header", 1);
  }
  std::vector<double> log;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 2) throw ParseError("expected 2 fields", line_no);
    if (parse_int(f[0], line_no) != static_cast<long long>(log.size())) {
      throw ParseError("episodes must be numbered contiguously from 0",
                       line_no);
    }
    log.push_back(parse_real(f[1], line_no));
  }
  return log;
}

void save_probes(const std::string& path, const ProbeTranscript& transcript) {
  std::ofstream out = open_out(path);
  out << "h,state,action,next_state\n";
  for (const Probe& p : transcript.probes) {
    out << p.h << ',' << p.state << ',' << p.action << ',' << p.next << '\n';
  }
  finish_write(out, path);
}

ProbeTranscript load_probes(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "h,state,action,next_state") {
    throw ParseError("missing probes header", 1);
  }
  ProbeTranscript transcript;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 4) throw ParseError("expected 4 fields", line_no);
    Probe p;
    p.h = static_cast<int>(parse_int(f[0], line_no));
    if (p.h < 1) throw ParseError("level must be >= 1", line_no);
    p.state = parse_int(f[1], line_no);
    p.action = static_cast<int>(parse_int(f[2], line_no));
    p.next = parse_int(f[3], line_no);
    transcript.probes.push_back(p);
    transcript.horizon = std::max(transcript.horizon, p.h);
  }
  return transcript;
}

}  // namespace rflin
