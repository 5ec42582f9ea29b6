#include "arrowhst/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace arrowhst {

double offline_edge_cost(const Hst& t, const RequestSet& r, int prev, int next) {
  return std::max(t.request_distance(r, prev, next), r.time(prev) - r.time(next));
}

double ordering_cost(const Hst& t, const RequestSet& r, const std::vector<int>& ordering) {
  double total = 0.0;
  for (size_t i = 1; i < ordering.size(); ++i)
    total += offline_edge_cost(t, r, ordering[i - 1], ordering[i]);
  return total;
}

namespace {

std::vector<std::vector<double>> cost_matrix(const Hst& t, const RequestSet& r) {
  const int m = r.size();
  std::vector<std::vector<double>> c(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) c[i][j] = offline_edge_cost(t, r, i, j);
  return c;
}

std::vector<std::vector<double>> manhattan_matrix(const Hst& t, const RequestSet& r) {
  const int m = r.size();
  std::vector<std::vector<double>> c(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) c[i][j] = c[j][i] = manhattan_cost(t, r, i, j);
  return c;
}

// generic fixed-start path DP over (subset, last); cost matrix is directed
std::pair<double, std::vector<int>> path_dp(const std::vector<std::vector<double>>& c) {
  const int m = static_cast<int>(c.size());
  if (m == 1) return {0.0, {0}};
  const int k = m - 1;  // non-dummy requests, bits 0..k-1 represent 1..m-1
  const size_t states = size_t{1} << k;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(states, std::vector<double>(k, inf));
  std::vector<std::vector<int8_t>> from(states, std::vector<int8_t>(k, -1));
  for (int j = 0; j < k; ++j) best[size_t{1} << j][j] = c[0][j + 1];
  for (size_t s = 1; s < states; ++s) {
    for (int last = 0; last < k; ++last) {
      double cur = best[s][last];
      if (cur == inf || !(s >> last & 1)) continue;
      for (int nxt = 0; nxt < k; ++nxt) {
        if (s >> nxt & 1) continue;
        size_t s2 = s | (size_t{1} << nxt);
        double cand = cur + c[last + 1][nxt + 1];
        if (cand < best[s2][nxt]) {
          best[s2][nxt] = cand;
          from[s2][nxt] = static_cast<int8_t>(last);
        }
      }
    }
  }
  size_t full = states - 1;
  int arg = 0;
  for (int j = 1; j < k; ++j)
    if (best[full][j] < best[full][arg]) arg = j;
  double total = best[full][arg];
  std::vector<int> ordering(m);
  size_t s = full;
  int cur = arg;
  for (int pos = m - 1; pos >= 1; --pos) {
    ordering[pos] = cur + 1;
    int prev = from[s][cur];
    s ^= size_t{1} << cur;
    cur = prev;
  }
  ordering[0] = 0;
  return {total, ordering};
}

}  // namespace

OfflineResult opt_exact_bruteforce(const Hst& t, const RequestSet& r) {
  const int m = r.size();
  if (m > 10) throw std::invalid_argument("offline: brute force limited to 10 requests");
  auto c = cost_matrix(t, r);
  std::vector<int> perm(m - 1);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<int> best_order{0};
  best_order.insert(best_order.end(), perm.begin(), perm.end());
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = perm.empty() ? 0.0 : c[0][perm[0]];
    for (size_t i = 1; i < perm.size(); ++i) total += c[perm[i - 1]][perm[i]];
    if (total < best) {
      best = total;
      best_order.assign(1, 0);
      best_order.insert(best_order.end(), perm.begin(), perm.end());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  OfflineResult res;
  res.ordering = best_order;
  res.total_cost = best;
  res.method = OfflineMethod::ExactBruteForce;
  return res;
}

OfflineResult opt_exact_dp(const Hst& t, const RequestSet& r, int limit) {
  if (r.size() > limit) throw std::invalid_argument("offline: request set above the exact limit");
  auto [total, ordering] = path_dp(cost_matrix(t, r));
  OfflineResult res;
  res.ordering = std::move(ordering);
  res.total_cost = total;
  res.method = OfflineMethod::ExactDp;
  return res;
}

OfflineResult opt_exact(const Hst& t, const RequestSet& r, int exact_limit) {
  if (r.size() > exact_limit)
    throw std::invalid_argument("offline: request set above the exact limit");
  if (r.size() <= 9) return opt_exact_bruteforce(t, r);
  return opt_exact_dp(t, r, exact_limit);
}

RequestTree manhattan_mst(const Hst& t, const RequestSet& r) {
  const int m = r.size();
  RequestTree tree;
  if (m <= 1) return tree;
  struct Cand {
    double w;
    int i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<size_t>(m) * (m - 1) / 2);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) cands.push_back({manhattan_cost(t, r, i, j), i, j});
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.w != b.w) return a.w < b.w;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<int> dsu(m);
  std::iota(dsu.begin(), dsu.end(), 0);
  auto find = [&](int x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };
  for (const auto& cand : cands) {
    int a = find(cand.i), b = find(cand.j);
    if (a == b) continue;
    dsu[a] = b;
    tree.edges.emplace_back(cand.i, cand.j);
    tree.total_manhattan += cand.w;
    if (static_cast<int>(tree.edges.size()) == m - 1) break;
  }
  return tree;
}

OfflineResult opt_lower_bound(const Hst& t, const RequestSet& r) {
  auto witness = is_condensed(t, r);
  if (!witness.condensed)
    throw std::invalid_argument("offline: lower bound requires a condensed request set");
  RequestTree mst = manhattan_mst(t, r);
  OfflineResult res;
  res.total_cost = mst.total_manhattan / 12.0;
  res.method = OfflineMethod::LowerBoundMst;
  res.certificate = std::move(mst);
  return res;
}

OfflineResult opt_upper_bound_nn(const Hst& t, const RequestSet& r) {
  const int m = r.size();
  OfflineResult res;
  res.method = OfflineMethod::UpperBoundNn;
  res.ordering.assign(1, 0);
  std::vector<char> used(m, 0);
  used[0] = 1;
  double total = 0.0;
  int last = 0;
  for (int step = 1; step < m; ++step) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      double c = offline_edge_cost(t, r, last, j);
      if (c < best_cost) {
        best_cost = c;
        best = j;
      }
    }
    used[best] = 1;
    res.ordering.push_back(best);
    res.certificate.edges.emplace_back(last, best);
    res.certificate.total_manhattan += manhattan_cost(t, r, last, best);
    total += best_cost;
    last = best;
  }
  res.total_cost = total;
  return res;
}

double min_manhattan_path_cost(const Hst& t, const RequestSet& r, std::vector<int>* ordering) {
  auto [total, order] = path_dp(manhattan_matrix(t, r));
  if (ordering) *ordering = order;
  return total;
}

}  // namespace arrowhst
