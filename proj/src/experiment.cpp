#include "arrowhst/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "arrowhst/hst.hpp"
#include "arrowhst/offline.hpp"
#include "arrowhst/util.hpp"

namespace arrowhst {

WeightedGraph make_path_graph(int n) {
  std::vector<GraphEdge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph make_cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle: need at least 3 nodes");
  std::vector<GraphEdge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph make_grid_graph(int rows, int cols) {
  auto id = [cols](int r, int c) { return r * cols + c; };
  std::vector<GraphEdge> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), 1.0});
    }
  return WeightedGraph(rows * cols, std::move(edges));
}

WeightedGraph make_complete_uniform_graph(int n) {
  std::vector<GraphEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph make_random_geometric_graph(int n, double radius, uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {uni(rng), uni(rng)};
  auto dist = [&](int a, int b) {
    double dx = pts[a].first - pts[b].first, dy = pts[a].second - pts[b].second;
    return std::sqrt(dx * dx + dy * dy);
  };
  std::vector<GraphEdge> edges;
  double min_used = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist(i, j) <= radius) {
        edges.push_back({i, j, dist(i, j)});
        min_used = std::min(min_used, dist(i, j));
      }
  // connect stragglers to their nearest neighbor, then normalize to min 1
  std::vector<int> comp(n);
  for (int i = 0; i < n; ++i) comp[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (const auto& e : edges) comp[find(e.u)] = find(e.v);
  for (int i = 1; i < n; ++i) {
    if (find(i) == find(0)) continue;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (find(j) != find(i) && dist(i, j) < best_d) {
        best_d = dist(i, j);
        best = j;
      }
    edges.push_back({i, best, best_d});
    min_used = std::min(min_used, best_d);
    comp[find(i)] = find(best);
  }
  if (!std::isfinite(min_used) || min_used <= 0.0) min_used = 1.0;
  for (auto& e : edges) e.w = std::max(1.0, e.w / min_used);
  return WeightedGraph(n, std::move(edges));
}

GraphSpec GraphSpec::parse(const std::string& text) {
  GraphSpec spec;
  std::string head = text, args;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    head = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  if (head == "file") {
    spec.kind = Kind::File;
    spec.path = args;
    return spec;
  }
  if (head == "path")
    spec.kind = Kind::Path;
  else if (head == "cycle")
    spec.kind = Kind::Cycle;
  else if (head == "grid")
    spec.kind = Kind::Grid;
  else if (head == "geometric")
    spec.kind = Kind::RandomGeometric;
  else if (head == "complete")
    spec.kind = Kind::CompleteUniform;
  else
    throw std::invalid_argument("graph spec: unknown generator '" + head + "'");
  if (spec.kind == Kind::Grid) {
    auto x = args.find('x');
    if (x == std::string::npos) throw std::invalid_argument("graph spec: grid wants RxC");
    spec.rows = std::stoi(args.substr(0, x));
    spec.cols = std::stoi(args.substr(x + 1));
    spec.n = spec.rows * spec.cols;
  } else if (spec.kind == Kind::RandomGeometric) {
    auto comma = args.find(',');
    spec.n = std::stoi(args.substr(0, comma));
    if (comma != std::string::npos) spec.radius = std::strtod(args.c_str() + comma + 1, nullptr);
  } else if (!args.empty()) {
    spec.n = std::stoi(args);
  }
  return spec;
}

std::string GraphSpec::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::File:
      out << "file:" << path;
      break;
    case Kind::Path:
      out << "path:" << n;
      break;
    case Kind::Cycle:
      out << "cycle:" << n;
      break;
    case Kind::Grid:
      out << "grid:" << rows << 'x' << cols;
      break;
    case Kind::RandomGeometric:
      out << "geometric:" << n << ',' << format_double(radius);
      break;
    case Kind::CompleteUniform:
      out << "complete:" << n;
      break;
  }
  return out.str();
}

WeightedGraph GraphSpec::build(uint64_t seed) const {
  switch (kind) {
    case Kind::File:
      return WeightedGraph::load(path);
    case Kind::Path:
      return make_path_graph(n);
    case Kind::Cycle:
      return make_cycle_graph(n);
    case Kind::Grid:
      return make_grid_graph(rows, cols);
    case Kind::RandomGeometric:
      return make_random_geometric_graph(n, radius, seed);
    case Kind::CompleteUniform:
      return make_complete_uniform_graph(n);
  }
  throw std::logic_error("graph spec: bad kind");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("graph")) cfg.graph = GraphSpec::parse(j["graph"].get<std::string>());
  if (j.contains("workload")) cfg.workload = WorkloadSpec::parse(j["workload"].get<std::string>());
  if (j.contains("sched")) cfg.sched = DelayPolicy::parse(j["sched"].get<std::string>());
  if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
  if (j.contains("seed")) cfg.master_seed = j["seed"].get<uint64_t>();
  if (j.contains("exact_limit")) cfg.exact_limit = j["exact_limit"].get<int>();
  if (j.contains("out")) cfg.out_prefix = j["out"].get<std::string>();
  if (j.contains("format")) cfg.format = j["format"].get<std::string>();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  nlohmann::json j;
  j["graph"] = graph.describe();
  j["workload"] = workload.describe();
  j["sched"] = sched.describe();
  j["trials"] = trials;
  j["seed"] = master_seed;
  j["exact_limit"] = exact_limit;
  j["out"] = out_prefix;
  j["format"] = format;
  return j.dump(2);
}

TrialRow run_trial(const ExperimentConfig& cfg, const WeightedGraph& g, const MetricSpace& m,
                   int trial) {
  TrialRow row;
  row.trial = trial;
  row.request_seed = derive_seed(cfg.master_seed, trial, "workload");
  row.hst_seed = derive_seed(cfg.master_seed, trial, "hst");
  row.sched_seed = derive_seed(cfg.master_seed, trial, "sched");
  try {
    // oblivious adversary: the workload is drawn first, from its own stream,
    // and sees only the point count
    RequestSet requests = generate_requests(m.point_count(), cfg.workload, row.request_seed);
    Hst tree = build_frt_hst(m, row.hst_seed);
    // place requests on the tree's leaves through the point bijection
    for (int i = 0; i < requests.size(); ++i)
      requests.set_leaf(i, tree.leaf_of_point(requests.leaf(i)));
    row.request_count = requests.size();

    Fnv1a digest;
    digest.add(tree.serialize());
    digest.add(requests.serialize());
    row.digest = digest.hex();

    double pairs = 0.0;
    for (int a = 0; a < m.point_count(); ++a)
      for (int b = a + 1; b < m.point_count(); ++b) {
        double s = tree.leaf_distance(tree.leaf_of_point(a), tree.leaf_of_point(b)) / m.dist(a, b);
        row.mean_stretch += s;
        row.max_stretch = std::max(row.max_stretch, s);
        pairs += 1.0;
      }
    if (pairs > 0) row.mean_stretch /= pairs;

    PipelineOptions opt;
    opt.exact_limit = cfg.exact_limit;
    opt.async_policies = {cfg.sched};
    opt.async_seed = row.sched_seed;
    InstanceBundle bundle = run_pipeline(tree, requests, opt);
    row.arrow_cost = bundle.arrow_cost;

    if (bundle.exact) {
      row.opt_value = bundle.exact->total_cost;
      row.opt_kind = "exact";
    } else {
      row.opt_value = bundle.lower_bound.total_cost;
      row.opt_kind = "lower-bound";
    }
    if (row.opt_value <= 0.0) {
      row.degenerate = true;
      row.ratio = 0.0;
    } else {
      row.ratio = row.arrow_cost / row.opt_value;
    }
    for (const auto& rep : lemma_suite(bundle)) {
      if (rep.pass)
        ++row.lemma_pass;
      else {
        ++row.lemma_fail;
        if (row.first_failure.empty()) row.first_failure = rep.check;
      }
    }
  } catch (const std::exception& ex) {
    row.error = ex.what();
  }
  return row;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.config = cfg;
  WeightedGraph g = cfg.graph.build(derive_seed(cfg.master_seed, 0, "graph"));
  MetricSpace m = apsp_metric(g);
  double log_n = std::log2(std::max(2, m.point_count()));
  std::vector<double> ratios;
  double c_num = 0.0, c_den = 0.0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    TrialRow row = run_trial(cfg, g, m, trial);
    if (!row.error.empty()) {
      ++rep.failed_rows;
    } else if (row.degenerate) {
      ++rep.degenerate_rows;
    } else {
      ratios.push_back(row.ratio);
      c_num += row.ratio * log_n;
      c_den += log_n * log_n;
      rep.max_ratio_per_log = std::max(rep.max_ratio_per_log, row.ratio / log_n);
    }
    rep.lemma_fail_total += row.lemma_fail;
    rep.rows.push_back(std::move(row));
  }
  if (!ratios.empty()) {
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    for (double v : ratios) rep.mean_ratio += v;
    rep.mean_ratio /= ratios.size();
    rep.median_ratio = sorted[sorted.size() / 2];
    rep.max_ratio = sorted.back();
    rep.fitted_c = c_den > 0 ? c_num / c_den : 0.0;
  }
  return rep;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "trial,request_seed,hst_seed,sched_seed,digest,requests,arrow_cost,opt_value,"
         "opt_kind,ratio,degenerate,lemma_pass,lemma_fail,first_failure,mean_stretch,"
         "max_stretch,error\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << r.request_seed << ',' << r.hst_seed << ',' << r.sched_seed << ','
        << r.digest << ',' << r.request_count << ',' << format_double(r.arrow_cost) << ','
        << format_double(r.opt_value) << ',' << r.opt_kind << ',' << format_double(r.ratio) << ','
        << (r.degenerate ? 1 : 0) << ',' << r.lemma_pass << ',' << r.lemma_fail << ','
        << r.first_failure << ',' << format_double(r.mean_stretch) << ','
        << format_double(r.max_stretch) << ',' << r.error << '\n';
  }
  return out.str();
}

std::string ExperimentReport::summary_text() const {
  std::ostringstream out;
  out << "graph: " << config.graph.describe() << '\n';
  out << "workload: " << config.workload.describe() << '\n';
  out << "sched: " << config.sched.describe() << '\n';
  out << "trials: " << config.trials << " (degenerate " << degenerate_rows << ", failed "
      << failed_rows << ")\n";
  out << "seed: " << config.master_seed << '\n';
  out << "ratio mean: " << format_double(mean_ratio) << '\n';
  out << "ratio median: " << format_double(median_ratio) << '\n';
  out << "ratio max: " << format_double(max_ratio) << '\n';
  out << "fitted c (ratio <= c*log2 n): " << format_double(fitted_c) << '\n';
  out << "max ratio / log2 n: " << format_double(max_ratio_per_log) << '\n';
  out << "lemma check failures: " << lemma_fail_total << '\n';
  return out.str();
}

std::vector<std::string> emit_report(const ExperimentReport& rep, const std::string& format,
                                     const std::string& out_prefix) {
  std::vector<std::string> written;
  auto write = [&](const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot write '" + path + "'");
    out << content;
    written.push_back(path);
  };
  if (format == "csv" || format == "both") write(out_prefix + ".csv", rep.to_csv());
  if (format == "doc" || format == "both") write(out_prefix + ".txt", rep.summary_text());
  if (written.empty()) throw std::invalid_argument("report: unknown format '" + format + "'");
  return written;
}

}  // namespace arrowhst
