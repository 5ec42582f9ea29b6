#pragma once

#include <string>
#include <vector>

#include "arrowhst/hst.hpp"
#include "arrowhst/requests.hpp"

namespace arrowhst {

enum class OfflineMethod { ExactBruteForce, ExactDp, LowerBoundMst, UpperBoundNn };

// Spanning tree over request indices under the Manhattan cost.
struct RequestTree {
  std::vector<std::pair<int, int>> edges;
  double total_manhattan = 0.0;
};

struct OfflineResult {
  std::vector<int> ordering;  // starts with the dummy; empty for bound-only results
  double total_cost = 0.0;
  OfflineMethod method = OfflineMethod::ExactDp;
  RequestTree certificate;  // MST edges / greedy chain
};

// max{d_T(v_prev, v_next), t_prev - t_next}: latency of enqueueing next after
// prev in a synchronous offline schedule.
double offline_edge_cost(const Hst& t, const RequestSet& r, int prev, int next);
double ordering_cost(const Hst& t, const RequestSet& r, const std::vector<int>& ordering);

// Minimum total offline cost over all orderings that start with the dummy.
// Brute force up to 9 requests, bitmask DP beyond, error above exact_limit.
OfflineResult opt_exact(const Hst& t, const RequestSet& r, int exact_limit = 12);
OfflineResult opt_exact_bruteforce(const Hst& t, const RequestSet& r);
OfflineResult opt_exact_dp(const Hst& t, const RequestSet& r, int limit = 18);

// Minimum spanning tree of the complete request graph under manhattan_cost,
// ties broken by lexicographic edge index.
RequestTree manhattan_mst(const Hst& t, const RequestSet& r);

// Certified lower bound MST/12 (requires a condensed request set).
OfflineResult opt_lower_bound(const Hst& t, const RequestSet& r);

// Greedy chain upper bound: repeatedly append the request with the smallest
// offline edge cost from the current tail.
OfflineResult opt_upper_bound_nn(const Hst& t, const RequestSet& r);

// Minimum total Manhattan cost over orderings starting with the dummy
// (optimal TSP path in the Manhattan metric); DP, exponential in |R|.
double min_manhattan_path_cost(const Hst& t, const RequestSet& r,
                               std::vector<int>* ordering = nullptr);

}  // namespace arrowhst
