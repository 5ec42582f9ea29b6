#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arrowhst/analysis.hpp"
#include "arrowhst/arrow_sim.hpp"
#include "arrowhst/metric_graph.hpp"
#include "arrowhst/requests.hpp"

namespace arrowhst {

WeightedGraph make_path_graph(int n);
WeightedGraph make_cycle_graph(int n);
WeightedGraph make_grid_graph(int rows, int cols);
WeightedGraph make_complete_uniform_graph(int n);
// unit-disk style weights, rescaled so the minimum distance is 1
WeightedGraph make_random_geometric_graph(int n, double radius, uint64_t seed);

struct GraphSpec {
  enum class Kind { File, Path, Cycle, Grid, RandomGeometric, CompleteUniform };
  Kind kind = Kind::Cycle;
  int n = 16;
  int rows = 4, cols = 4;
  double radius = 0.5;
  std::string path;

  // "cycle:16", "path:8", "grid:4x4", "geometric:32,0.5", "complete:16",
  // "file:PATH"
  static GraphSpec parse(const std::string& text);
  std::string describe() const;
  WeightedGraph build(uint64_t seed) const;
};

struct ExperimentConfig {
  GraphSpec graph;
  WorkloadSpec workload;
  DelayPolicy sched;
  int trials = 1;
  uint64_t master_seed = 1;
  int exact_limit = 12;
  std::string out_prefix = "report";
  std::string format = "csv";  // csv | doc | both

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

struct TrialRow {
  int trial = 0;
  uint64_t request_seed = 0, hst_seed = 0, sched_seed = 0;
  std::string digest;  // instance fingerprint: tree + requests
  int request_count = 0;
  double arrow_cost = 0.0;
  double opt_value = 0.0;
  std::string opt_kind;  // exact | lower-bound
  double ratio = 0.0;
  bool degenerate = false;
  int lemma_pass = 0, lemma_fail = 0;
  std::string first_failure;
  double mean_stretch = 0.0, max_stretch = 0.0;
  std::string error;  // per-trial failure without aborting the sweep
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRow> rows;

  int degenerate_rows = 0;
  int failed_rows = 0;
  double mean_ratio = 0.0, median_ratio = 0.0, max_ratio = 0.0;
  double fitted_c = 0.0;      // least squares through the origin of ratio vs log2 n
  double max_ratio_per_log = 0.0;
  int lemma_fail_total = 0;

  std::string to_csv() const;
  std::string summary_text() const;
};

// One row per trial: draw the workload, embed the graph metric (workload and
// tree consume disjoint seed streams derived from the master seed), simulate,
// bound the offline optimum, run the whole check suite.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Recomputes a single row from the config; rows are reproducible.
TrialRow run_trial(const ExperimentConfig& cfg, const WeightedGraph& g, const MetricSpace& m,
                   int trial);

// Writes out_prefix + ".csv" / ".txt" depending on format; byte-stable.
std::vector<std::string> emit_report(const ExperimentReport& rep, const std::string& format,
                                     const std::string& out_prefix);

}  // namespace arrowhst
