#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rflin/harness.hpp"
#include "rflin/io.hpp"
#include "rflin/rng.hpp"

using namespace rflin;

namespace {

SweepConfig small_sweep() {
  SweepConfig config;
  config.instance.kind = "anchor";
  config.instance.dim = 4;
  config.instance.horizon = 3;
  config.instance.states_per_level = 4;
  config.instance.actions = 2;
  config.episode_grid = {20, 60};
  config.seeds = 3;
  config.seed = 15;
  config.reward_sets = 2;
  return config;
}

double median_suboptimality(const std::vector<SweepRow>& rows, int episodes) {
  std::vector<double> gaps;
  for (const SweepRow& row : rows) {
    if (row.episodes == episodes && row.error.empty()) {
      gaps.push_back(row.suboptimality);
    }
  }
  REQUIRE(!gaps.empty());
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

TEST_CASE("sweep rows cover the full grid in a fixed order") {
  SweepConfig config = small_sweep();
  std::vector<SweepRow> rows = run_sweep(config);
  REQUIRE(static_cast<int>(rows.size()) == 2 * 3 * 2);  // K x seeds x sets
  int i = 0;
  for (int episodes : {20, 60}) {
    for (std::uint64_t seed : {15ULL, 16ULL, 17ULL}) {
      for (int set = 0; set < 2; ++set) {
        CHECK(rows[i].episodes == episodes);
        CHECK(rows[i].seed == seed);
        CHECK(rows[i].reward_set == set);
        CHECK(rows[i].error.empty());
        CHECK(rows[i].kind == "anchor");
        CHECK(rows[i].dim == 4);
        CHECK(rows[i].horizon == 3);
        CHECK(rows[i].v_star >= rows[i].v_pi - 1e-9);
        CHECK(rows[i].suboptimality >= -1e-12);
        ++i;
      }
    }
  }
}

TEST_CASE("sweeps replay byte for byte, in any job count") {
  SweepConfig config = small_sweep();
  const std::string one = sweep_csv(run_sweep(config));
  const std::string two = sweep_csv(run_sweep(config));
  CHECK(one == two);
  config.jobs = 4;
  const std::string parallel = sweep_csv(run_sweep(config));
  CHECK(one == parallel);
  CHECK(one.rfind("kind,d,H,K,seed,reward_set,beta,c_beta,"
                  "suboptimality,V1_star,V1_pi,error",
                  0) == 0);
}

TEST_CASE("a single-action instance is trivially optimal at every budget") {
  SweepConfig config;
  config.instance.kind = "anchor";
  config.instance.dim = 3;
  config.instance.horizon = 3;
  config.instance.states_per_level = 4;
  config.instance.actions = 1;
  config.episode_grid = {5, 25};
  config.seeds = 2;
  config.seed = 3;
  std::vector<SweepRow> rows = run_sweep(config);
  for (const SweepRow& row : rows) {
    CHECK(row.error.empty());
    CHECK(row.suboptimality <= 1e-12);
  }
}

TEST_CASE("more exploration does not hurt the sweep median") {
  SweepConfig config;
  config.instance.kind = "anchor";
  config.instance.dim = 4;
  config.instance.horizon = 3;
  config.instance.states_per_level = 4;
  config.instance.actions = 2;
  config.episode_grid = {10, 300};
  config.seeds = 6;
  config.seed = 70;
  config.reward_sets = 2;
  config.jobs = 4;
  std::vector<SweepRow> rows = run_sweep(config);
  CHECK(median_suboptimality(rows, 300) <=
        median_suboptimality(rows, 10) + 1e-9);
}

TEST_CASE("a failing cell is reported without sinking the run") {
  SweepConfig config = small_sweep();
  // An unknown kind makes every per-seed build fail; the run still returns
  // a complete grid of rows carrying the failure text.
  config.instance.kind = "mystery";
  CHECK_THROWS_AS(build_instance(config.instance, 1), InvalidParameter);
  std::vector<SweepRow> rows = run_sweep(config);
  REQUIRE(static_cast<int>(rows.size()) == 2 * 3 * 2);
  for (const SweepRow& row : rows) {
    CHECK(row.error.rfind("instance:", 0) == 0);
    // Error text is sanitized so the CSV stays one line per row.
    CHECK(row.error.find(',') == std::string::npos);
    CHECK(row.error.find('\n') == std::string::npos);
  }
  const std::string csv = sweep_csv(rows);
  const size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == rows.size() + 1);
}

TEST_CASE("tabular sweep instances run end to end") {
  SweepConfig config;
  config.instance.kind = "tabular";
  config.instance.horizon = 3;
  config.instance.states_per_level = 3;
  config.instance.actions = 2;
  config.episode_grid = {30};
  config.seeds = 2;
  config.seed = 9;
  std::vector<SweepRow> rows = run_sweep(config);
  for (const SweepRow& row : rows) {
    CHECK(row.error.empty());
    CHECK(row.kind == "tabular");
    CHECK(row.dim == 6);  // |S| * A from the one-hot embedding
  }
}

TEST_CASE("hardness runs one game per budget against the same seed root") {
  HardnessConfig config;
  config.horizon = 5;
  config.budgets = {0, 9};
  config.trials = 8;
  config.seed = 21;
  config.explorer = "sweep";
  config.planner = "model";
  std::vector<AdversaryReport> reports = run_hardness(config);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].budget == 0);
  CHECK(reports[1].budget == 9);
  CHECK(reports[0].bound == 0.5);
  // 9 episodes cover all 8 funnel pairs plus the replay, so the sweep
  // explorer finds the plant every time.
  CHECK(reports[1].success_rate == 1.0);

  const std::string csv = hardness_csv(reports);
  CHECK(csv.rfind("H,budget,trials,success_rate,eventE_rate,bound", 0) == 0);
  const std::string again = hardness_csv(run_hardness(config));
  CHECK(csv == again);

  config.explorer = "mystery";
  CHECK_THROWS_AS(run_hardness(config), InvalidParameter);
  config.explorer = "lsvi";
  config.planner = "mystery";
  CHECK_THROWS_AS(run_hardness(config), InvalidParameter);
}

TEST_CASE("generative harness scores probe-then-plan exactly") {
  GenerativeConfig config;
  config.horizons = {5, 6};
  config.instances = 2;
  config.seed = 33;
  std::vector<GenerativeRow> rows = run_generative(config);
  REQUIRE(static_cast<int>(rows.size()) == 4);
  for (const GenerativeRow& row : rows) {
    CHECK(row.error.empty());
    CHECK(row.queries <= row.query_cap);
    CHECK(row.query_cap == static_cast<long>(row.dim) * row.horizon);
    CHECK(row.max_q_error <= 1e-10);
    CHECK(row.suboptimality <= 1e-10);
  }
  CHECK(rows[0].seed == 33);
  CHECK(rows[1].seed == 34);

  const std::string csv = generative_csv(rows);
  CHECK(csv.rfind("H,d,seed,queries,query_cap,max_q_error,suboptimality,"
                  "error",
                  0) == 0);
}

TEST_CASE("file validation reports named checks with residuals") {
  RngStream rng(44);
  LinearMdpSpec spec = make_random_anchor_instance(3, 3, 4, 2, rng);
  const std::string path = "/tmp/rflin_harness_anchor.inst";
  save_instance(path, spec);
  ValidationReport report = validate_instance_file(path);
  CHECK(report.parse_ok);
  CHECK(report.kind == "linear-mdp");
  CHECK(report.all_pass());
  bool saw_normalization = false;
  for (const CheckItem& item : report.items) {
    if (item.name == "transition-normalization") {
      saw_normalization = true;
      CHECK(item.residual <= 1e-9);
    }
  }
  CHECK(saw_normalization);
  const std::string text = validation_text(report);
  CHECK(text.find("[PASS]") != std::string::npos);
  CHECK(text.find("[FAIL]") == std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("file validation pinpoints a corrupted transition row") {
  RngStream rng(45);
  LinearMdpSpec spec = make_random_anchor_instance(3, 3, 4, 2, rng);
  const std::string path = "/tmp/rflin_harness_corrupt.inst";
  save_instance(path, spec);
  // Push one stored core coefficient so the affected row sums to about 1.1.
  std::ifstream in(path);
  std::string line, out;
  bool patched = false;
  while (std::getline(in, line)) {
    if (!patched && line.rfind("phi 1 ", 0) == 0) {
      // Scaling a feature column breaks normalization without touching the
      // stored cores; the residual lands near the scale change.
      std::istringstream tokens(line);
      std::string word;
      std::vector<std::string> parts;
      while (tokens >> word) parts.push_back(word);
      for (size_t i = 4; i < parts.size(); ++i) {
        parts[i] = format_double(std::stod(parts[i]) * 1.1);
      }
      std::string rebuilt;
      for (const std::string& part : parts) rebuilt += part + " ";
      rebuilt.pop_back();
      out += rebuilt + "\n";
      patched = true;
    } else {
      out += line + "\n";
    }
  }
  in.close();
  REQUIRE(patched);
  std::ofstream(path) << out;

  ValidationReport report = validate_instance_file(path);
  CHECK(report.parse_ok);
  CHECK_FALSE(report.all_pass());
  bool found = false;
  for (const CheckItem& item : report.items) {
    if (item.name == "transition-normalization" && !item.pass) {
      found = true;
      CHECK(item.residual == doctest::Approx(0.1).epsilon(0.02));
    }
  }
  CHECK(found);
  CHECK(validation_text(report).find("[FAIL]") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("file validation certifies the planted construction") {
  RngStream rng(46);
  const HardInstance inst = build_hard_instance(6, rng);
  const std::string path = "/tmp/rflin_harness_hard.inst";
  save_instance(path, inst);
  ValidationReport report = validate_instance_file(path);
  CHECK(report.parse_ok);
  CHECK(report.kind == "hard");
  CHECK(report.all_pass());
  bool saw_certificate = false;
  for (const CheckItem& item : report.items) {
    if (item.name == "linear-qstar-certificate") {
      saw_certificate = true;
      CHECK(item.residual <= 1e-12);
    }
  }
  CHECK(saw_certificate);
  std::remove(path.c_str());
}

TEST_CASE("unparseable files come back as a parse failure, not a throw") {
  const std::string path = "/tmp/rflin_harness_garbage.inst";
  std::ofstream(path) << "rflin-instance v1\nkind nonsense\n";
  ValidationReport report = validate_instance_file(path);
  CHECK_FALSE(report.parse_ok);
  CHECK_FALSE(report.all_pass());
  CHECK(!report.parse_error.empty());
  std::remove(path.c_str());
}
