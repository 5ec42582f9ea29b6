// Experiment driver: embed a graph metric into an HST, place queueing
// requests, run the queueing protocol, bound the offline optimum, check the
// structural inequalities, and sweep seeds into CSV reports.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "arrowhst/analysis.hpp"
#include "arrowhst/arrow_sim.hpp"
#include "arrowhst/experiment.hpp"
#include "arrowhst/hst.hpp"
#include "arrowhst/metric_graph.hpp"
#include "arrowhst/offline.hpp"
#include "arrowhst/util.hpp"

namespace {

using namespace arrowhst;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

Hst tree_from_options(const std::string& graph_spec, const std::string& hst_file, uint64_t seed) {
  if (!hst_file.empty()) {
    std::ifstream in(hst_file);
    if (!in) throw std::runtime_error("cannot open '" + hst_file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return Hst::deserialize(ss.str());
  }
  GraphSpec spec = GraphSpec::parse(graph_spec);
  WeightedGraph g = spec.build(derive_seed(seed, 0, "graph"));
  return build_frt_hst(apsp_metric(g), derive_seed(seed, 0, "hst"));
}

RequestSet requests_from_options(const Hst& tree, const std::string& requests_file,
                                 const std::string& workload, uint64_t seed) {
  if (!requests_file.empty()) {
    RequestSet r = RequestSet::load(requests_file);
    if (r.max_leaf() >= tree.leaf_count())
      throw std::runtime_error("request file references a leaf outside the tree");
    return r;
  }
  return generate_requests(tree, WorkloadSpec::parse(workload),
                           derive_seed(seed, 0, "workload"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arrow on tree embeddings: simulation and analysis workbench"};
  app.require_subcommand(1);

  std::string graph = "cycle:16";
  std::string hst_file;
  std::string requests_file;
  std::string workload = "poisson:lambda=1,horizon=16";
  std::string sched = "sync";
  std::string out;
  std::string format = "csv";
  std::string config_file;
  int trials = 1;
  uint64_t seed = 1;
  int exact_limit = 12;

  auto add_common = [&](CLI::App* cmd, bool with_requests) {
    cmd->add_option("--graph", graph, "graph generator or file (cycle:16, grid:4x4, file:PATH)");
    cmd->add_option("--hst", hst_file, "load a serialized tree instead of embedding a graph");
    cmd->add_option("--seed", seed, "master seed");
    if (with_requests) {
      cmd->add_option("--requests", requests_file, "request file (leaf time per line)");
      cmd->add_option("--workload", workload, "workload model (oneshot:k=8, poisson:..., bursts:...)");
    }
  };

  auto* build_cmd = app.add_subcommand("build-hst", "embed a graph metric into a tree");
  add_common(build_cmd, false);
  build_cmd->add_option("--out", out, "write the serialized tree here");

  auto* sim_cmd = app.add_subcommand("simulate", "run the queueing protocol and dump the trace");
  add_common(sim_cmd, true);
  sim_cmd->add_option("--sched", sched, "delay policy (sync, scaled:F, uniform:LO,HI, adversarial:EPS)");
  sim_cmd->add_option("--out", out, "write the event log here");

  auto* off_cmd = app.add_subcommand("offline", "optimal offline cost and bounds");
  add_common(off_cmd, true);
  off_cmd->add_option("--exact-limit", exact_limit, "largest request count solved exactly");

  auto* analyze_cmd = app.add_subcommand("analyze", "full pipeline with every structural check");
  add_common(analyze_cmd, true);
  analyze_cmd->add_option("--sched", sched, "delay policy for the asynchronous traces");
  analyze_cmd->add_option("--exact-limit", exact_limit, "largest request count solved exactly");

  auto* sweep_cmd = app.add_subcommand("sweep", "multi-trial experiment with a CSV report");
  sweep_cmd->add_option("--config", config_file, "JSON config mirroring the flags");
  sweep_cmd->add_option("--graph", graph, "graph generator or file");
  sweep_cmd->add_option("--workload", workload, "workload model");
  sweep_cmd->add_option("--sched", sched, "delay policy");
  sweep_cmd->add_option("--trials", trials, "number of trials");
  sweep_cmd->add_option("--seed", seed, "master seed");
  sweep_cmd->add_option("--exact-limit", exact_limit, "largest request count solved exactly");
  sweep_cmd->add_option("--out", out, "report path prefix");
  sweep_cmd->add_option("--format", format, "csv | doc | both");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build_cmd->parsed()) {
      Hst tree = tree_from_options(graph, hst_file, seed);
      auto violations = verify_hst(tree);
      for (const auto& v : violations)
        std::cerr << "violation: " << v.what << " (node " << v.node << ")\n";
      std::string text = tree.serialize();
      if (out.empty())
        std::cout << text;
      else
        write_file(out, text);
      std::cout << "height " << tree.height() << " leaves " << tree.leaf_count() << " nodes "
                << tree.node_count() << (violations.empty() ? " ok" : " INVALID") << '\n';
      return violations.empty() ? 0 : 1;
    }

    if (sim_cmd->parsed()) {
      Hst tree = tree_from_options(graph, hst_file, seed);
      RequestSet reqs = requests_from_options(tree, requests_file, workload, seed);
      DelayPolicy policy = DelayPolicy::parse(sched);
      ExecutionTrace trace = run_async(tree, reqs, policy, derive_seed(seed, 0, "sched"));
      auto lat = latency_costs(trace, reqs);
      std::string log = dump_trace(trace);
      if (out.empty())
        std::cout << log;
      else
        write_file(out, log);
      std::cout << "order:";
      for (int q : trace.order) std::cout << ' ' << q;
      std::cout << "\ntotal latency " << format_double(lat.total) << '\n';
      return 0;
    }

    if (off_cmd->parsed()) {
      Hst tree = tree_from_options(graph, hst_file, seed);
      RequestSet reqs = requests_from_options(tree, requests_file, workload, seed);
      RequestSet cond = condense(tree, reqs);
      OfflineResult lower = opt_lower_bound(tree, cond);
      OfflineResult upper = opt_upper_bound_nn(tree, reqs);
      std::cout << "requests " << reqs.size() << '\n';
      if (reqs.size() <= exact_limit) {
        OfflineResult exact = opt_exact(tree, reqs, exact_limit);
        std::cout << "exact " << format_double(exact.total_cost) << '\n';
      }
      std::cout << "lower-bound " << format_double(lower.total_cost) << '\n';
      std::cout << "upper-bound-nn " << format_double(upper.total_cost) << '\n';
      return 0;
    }

    if (analyze_cmd->parsed()) {
      Hst tree = tree_from_options(graph, hst_file, seed);
      RequestSet reqs = requests_from_options(tree, requests_file, workload, seed);
      PipelineOptions opt;
      opt.exact_limit = exact_limit;
      opt.async_policies = {DelayPolicy::parse(sched)};
      opt.async_seed = derive_seed(seed, 0, "sched");
      InstanceBundle bundle = run_pipeline(tree, reqs, opt);
      auto reports = lemma_suite(bundle);
      int failures = 0;
      for (const auto& rep : reports) {
        std::cout << (rep.pass ? "pass " : "FAIL ") << rep.check;
        if (!rep.note.empty()) std::cout << " (" << rep.note << ")";
        if (!rep.pass) {
          std::cout << " :: " << rep.witness;
          ++failures;
        }
        std::cout << '\n';
      }
      std::cout << "arrow cost " << format_double(bundle.arrow_cost) << '\n';
      if (bundle.exact)
        std::cout << "offline optimum " << format_double(bundle.exact->total_cost) << '\n';
      std::cout << "splits " << bundle.split.records.size() << '\n';
      std::cout << (failures == 0 ? "all checks passed\n" : "CHECK FAILURES\n");
      return failures == 0 ? 0 : 1;
    }

    if (sweep_cmd->parsed()) {
      ExperimentConfig cfg;
      if (!config_file.empty()) cfg = ExperimentConfig::from_json_file(config_file);
      for (const auto* opt_name :
           {"--graph", "--workload", "--sched", "--trials", "--seed", "--exact-limit", "--out",
            "--format"}) {
        if (sweep_cmd->count(opt_name) == 0) continue;
        std::string name = opt_name;
        if (name == "--graph") cfg.graph = GraphSpec::parse(graph);
        if (name == "--workload") cfg.workload = WorkloadSpec::parse(workload);
        if (name == "--sched") cfg.sched = DelayPolicy::parse(sched);
        if (name == "--trials") cfg.trials = trials;
        if (name == "--seed") cfg.master_seed = seed;
        if (name == "--exact-limit") cfg.exact_limit = exact_limit;
        if (name == "--out") cfg.out_prefix = out;
        if (name == "--format") cfg.format = format;
      }
      if (cfg.out_prefix.empty()) cfg.out_prefix = "report";
      ExperimentReport rep = run_experiment(cfg);
      auto files = emit_report(rep, cfg.format, cfg.out_prefix);
      std::cout << rep.summary_text();
      for (const auto& f : files) std::cout << "wrote " << f << '\n';
      return rep.lemma_fail_total == 0 && rep.failed_rows == 0 ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
