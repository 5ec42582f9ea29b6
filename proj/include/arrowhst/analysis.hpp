#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arrowhst/arrow_sim.hpp"
#include "arrowhst/hst.hpp"
#include "arrowhst/offline.hpp"
#include "arrowhst/requests.hpp"

namespace arrowhst {

// Maximal run of consecutively ordered requests inside one subtree.
// lo/hi are inclusive positions in the queueing order.
struct Block {
  int lo = 0;
  int hi = 0;
  int subtree = -1;  // root node of the level-l subtree holding the run
};

class BlockPartition {
 public:
  BlockPartition(int height, std::vector<int> order, std::vector<std::vector<Block>> by_level)
      : height_(height), order_(std::move(order)), levels_(std::move(by_level)) {}

  int height() const { return height_; }
  const std::vector<int>& order() const { return order_; }
  // level in [-1, height]
  const std::vector<Block>& level(int l) const { return levels_[l + 1]; }
  int block_count(int l) const { return static_cast<int>(levels_[l + 1].size()); }
  // interval structure only (subtree ids are allowed to differ)
  bool same_intervals(const BlockPartition& other) const;

 private:
  int height_;
  std::vector<int> order_;
  std::vector<std::vector<Block>> levels_;
};

BlockPartition block_partition(const Hst& t, const RequestSet& r, const std::vector<int>& order);

// Total synchronous queueing cost from block counts alone:
// sum over l of (n(l) - n(l+1)) * delta(l+1).
double block_cost(const BlockPartition& p);

// Hierarchical spanning tree: child subtrees are wired together bottom-up by
// minimum-Manhattan edge sets (an MST over the contracted child components).
// Expects the tree of a split instance with request leaves attached.
RequestTree build_sstar(const Hst& attached, const RequestSet& r);

// Position (not request index) of the local successor of position i: the
// first later position at minimum tree distance.
int local_successor(const Hst& t, const RequestSet& r, const std::vector<int>& order, int i);

// Spanning tree with one edge from every position to its local successor.
RequestTree build_sbb(const Hst& t, const RequestSet& r, const std::vector<int>& order);

struct LemmaReport {
  std::string check;
  bool pass = true;
  std::string witness;  // reproduces the failure standalone
  double lhs = 0.0;     // extremal compared values (slack diagnostics)
  double rhs = 0.0;
  std::string note;
};

// Order is distance-respecting: earlier requests never trail later ones by
// more than their tree distance.
LemmaReport check_distance_respecting_order(const Hst& t, const RequestSet& r,
                                            const std::vector<int>& order, double tol = 1e-9);

// Latency is distance-respecting: t(i) + L(i) <= t(j) + d(v_j, v_(i-1)) for
// every later position j.
LemmaReport check_distance_respecting_latency(const Hst& t, const RequestSet& r,
                                              const ExecutionTrace& trace, double tol = 1e-9);

using PairCost = std::function<double(int, int)>;

// Cut-hypothesis check between two spanning trees: every tau edge is within
// lambda of the lightest tau_star edge across its induced cut; on success the
// total weights obey w(tau) <= lambda * w(tau_star).
LemmaReport check_mst_approx(const RequestTree& tau, const RequestTree& tau_star,
                             int vertex_count, const PairCost& cost, double lambda,
                             double tol = 1e-9);

struct PipelineOptions {
  int exact_limit = 12;
  bool run_async = true;
  std::vector<DelayPolicy> async_policies;  // defaults to all shipped policies
  uint64_t async_seed = 1;
  int min_path_limit = 13;  // skip the exact Manhattan-path link above this size
};

// Everything the checks consume, produced by one pipeline run:
// simulate -> condense -> resimulate -> split -> attach -> trees -> bounds.
struct InstanceBundle {
  Hst tree;
  RequestSet requests;
  ExecutionTrace sync_trace;
  double arrow_cost = 0.0;

  RequestSet condensed;
  ExecutionTrace condensed_trace;
  BlockPartition blocks{0, {}, {}};

  SplitResult split;
  BlockPartition split_blocks{0, {}, {}};
  ExecutionTrace split_trace;
  Hst attached;  // split tree + level -1 request leaves

  RequestTree mst_original;  // Manhattan MSTs of the condensed set
  RequestTree mst_split;
  RequestTree sstar;
  RequestTree sbb;

  std::optional<OfflineResult> exact;            // original requests
  std::optional<OfflineResult> exact_condensed;  // condensed requests
  std::optional<double> min_manhattan_path;      // condensed, original tree
  OfflineResult lower_bound;                     // condensed
  OfflineResult upper_nn;

  std::vector<ExecutionTrace> async_traces;
  PipelineOptions options;
};

InstanceBundle run_pipeline(const Hst& t, const RequestSet& r, const PipelineOptions& opt = {});

// Runs every structural check on the bundle: block geometry and the cost
// formula, condensing, split preservation and its fixed point, the spanning
// tree chain, distance-respecting orders/latencies, the asynchronous message
// lemmas, and the end-to-end constant-factor bound.
std::vector<LemmaReport> lemma_suite(const InstanceBundle& b, double tol = 1e-9);

// Helpers exposed for focused tests and the experiment harness.
std::vector<LemmaReport> check_block_geometry(const Hst& t, const RequestSet& r,
                                              const BlockPartition& p, double tol = 1e-9);
LemmaReport check_split_fixed_point(const Hst& t, const RequestSet& r,
                                    const std::vector<int>& order);
std::vector<LemmaReport> check_async_lemmas(const Hst& t, const RequestSet& r,
                                            const ExecutionTrace& trace, double tol = 1e-9);
LemmaReport check_subtree_connectivity(const Hst& attached, const RequestSet& r,
                                       const RequestTree& tree, const std::string& name);
LemmaReport check_every_ordering_manhattan_bound(const Hst& t, const RequestSet& r,
                                                 double tol = 1e-9);

}  // namespace arrowhst
