#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "arrowhst/experiment.hpp"
#include "arrowhst/hst.hpp"
#include "arrowhst/metric_graph.hpp"
#include "arrowhst/util.hpp"

using namespace arrowhst;

TEST_CASE("generators produce valid normalized metrics") {
  for (const auto& g : {make_path_graph(8), make_cycle_graph(9), make_grid_graph(3, 4),
                        make_complete_uniform_graph(7),
                        make_random_geometric_graph(14, 0.5, 3)}) {
    auto m = apsp_metric(g);
    CHECK(validate_metric(m).empty());
    CHECK(m.min_positive_distance() >= 1.0 - 1e-12);
  }
}

TEST_CASE("graph spec parsing round-trips") {
  for (const auto* text : {"cycle:16", "path:8", "grid:3x5", "geometric:32,0.5", "complete:12"}) {
    auto spec = GraphSpec::parse(text);
    CHECK(spec.describe() == text);
    auto g = spec.build(7);
    CHECK(g.node_count() >= 3);
  }
  CHECK_THROWS_AS(GraphSpec::parse("torus:9"), std::invalid_argument);
}

TEST_CASE("config json round-trips") {
  ExperimentConfig cfg;
  cfg.graph = GraphSpec::parse("cycle:24");
  cfg.workload = WorkloadSpec::parse("poisson:lambda=2,horizon=8");
  cfg.sched = DelayPolicy::parse("uniform:0.5,1");
  cfg.trials = 7;
  cfg.master_seed = 99;
  cfg.exact_limit = 10;
  auto back = ExperimentConfig::from_json_text(cfg.to_json_text());
  CHECK(back.to_json_text() == cfg.to_json_text());
  CHECK(back.trials == 7);
  CHECK(back.master_seed == 99);
}

TEST_CASE("dummy-only workload yields a degenerate row") {
  ExperimentConfig cfg;
  cfg.graph = GraphSpec::parse("cycle:8");
  cfg.workload = WorkloadSpec::parse("oneshot:k=0");
  cfg.trials = 1;
  auto rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].degenerate);
  CHECK(rep.degenerate_rows == 1);
  CHECK(rep.rows[0].error.empty());
}

TEST_CASE("worked instance as an explicit config scores ratio one") {
  ExperimentConfig cfg;
  cfg.graph = GraphSpec::parse("path:2");
  cfg.workload.kind = WorkloadKind::Explicit;
  cfg.workload.explicit_requests = {{1, 0.0}, {0, 1.0}};
  cfg.trials = 1;
  auto rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows[0];
  INFO(row.error);
  CHECK(row.error.empty());
  CHECK(row.arrow_cost == doctest::Approx(2.0));
  CHECK(row.opt_value == doctest::Approx(2.0));
  CHECK(row.ratio == doctest::Approx(1.0));
  CHECK(row.opt_kind == "exact");
  CHECK(row.lemma_fail == 0);
}

TEST_CASE("sweeps are deterministic and rows reproducible") {
  ExperimentConfig cfg;
  cfg.graph = GraphSpec::parse("cycle:12");
  cfg.workload = WorkloadSpec::parse("poisson:lambda=0.5,horizon=12");
  cfg.trials = 4;
  cfg.master_seed = 5;
  auto rep1 = run_experiment(cfg);
  auto rep2 = run_experiment(cfg);
  CHECK(rep1.to_csv() == rep2.to_csv());
  CHECK(rep1.summary_text() == rep2.summary_text());
  CHECK(rep1.lemma_fail_total == 0);

  // a row can be recomputed in isolation from (config, trial)
  WeightedGraph g = cfg.graph.build(derive_seed(cfg.master_seed, 0, "graph"));
  MetricSpace m = apsp_metric(g);
  for (int trial = 0; trial < cfg.trials; ++trial) {
    TrialRow row = run_trial(cfg, g, m, trial);
    CHECK(row.digest == rep1.rows[trial].digest);
    CHECK(row.arrow_cost == rep1.rows[trial].arrow_cost);
    CHECK(row.ratio == rep1.rows[trial].ratio);
  }
}

TEST_CASE("workload stream is independent of the tree stream") {
  ExperimentConfig cfg;
  cfg.master_seed = 17;
  // the workload seed never collides with the tree seed, and the workload is
  // drawn from the point count alone, before any tree exists
  for (int trial = 0; trial < 16; ++trial) {
    uint64_t ws = derive_seed(cfg.master_seed, trial, "workload");
    uint64_t hs = derive_seed(cfg.master_seed, trial, "hst");
    CHECK(ws != hs);
    auto a = generate_requests(16, cfg.workload, ws);
    auto b = generate_requests(16, cfg.workload, ws);
    CHECK(a.serialize() == b.serialize());
  }
}

TEST_CASE("trial errors land in the row without aborting the sweep") {
  ExperimentConfig cfg;
  cfg.graph = GraphSpec::parse("cycle:8");
  cfg.workload.kind = WorkloadKind::Explicit;
  cfg.workload.explicit_requests = {{99, 0.0}};  // unknown leaf
  cfg.trials = 3;
  auto rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.failed_rows == 3);
  for (const auto& row : rep.rows) CHECK_FALSE(row.error.empty());
}

TEST_CASE("emit_report writes byte-stable files") {
  ExperimentConfig cfg;
  cfg.graph = GraphSpec::parse("cycle:8");
  cfg.workload = WorkloadSpec::parse("oneshot:k=4");
  cfg.trials = 2;
  auto rep = run_experiment(cfg);
  auto files1 = emit_report(rep, "both", "/tmp/arrowhst_report_a");
  auto files2 = emit_report(rep, "both", "/tmp/arrowhst_report_b");
  REQUIRE(files1.size() == 2);
  for (size_t i = 0; i < files1.size(); ++i) {
    std::ifstream f1(files1[i]), f2(files2[i]);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK_FALSE(s1.empty());
  }
  CHECK_THROWS_AS(emit_report(rep, "pdf", "/tmp/arrowhst_report_c"), std::invalid_argument);
}

TEST_CASE("empty report emits a header-only csv") {
  ExperimentReport rep;
  auto csv = rep.to_csv();
  CHECK(csv.find("trial,") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
}

TEST_CASE("ratios are bounded by the constant-factor guarantee") {
  ExperimentConfig cfg;
  cfg.graph = GraphSpec::parse("cycle:16");
  cfg.workload = WorkloadSpec::parse("poisson:lambda=0.4,horizon=16");
  cfg.trials = 8;
  cfg.master_seed = 23;
  auto rep = run_experiment(cfg);
  CHECK(rep.failed_rows == 0);
  CHECK(rep.lemma_fail_total == 0);
  for (const auto& row : rep.rows) {
    if (row.degenerate || row.opt_kind != "exact") continue;
    CHECK(row.ratio <= 432.0 + 1e-9);
  }
}
