#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace arrowhst {

struct GraphEdge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

// Connected undirected graph with edge weights normalized to w >= 1.
class WeightedGraph {
 public:
  WeightedGraph(int node_count, std::vector<GraphEdge> edges);

  int node_count() const { return n_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const std::vector<std::pair<int, double>>& neighbors(int u) const { return adj_[u]; }

  // Text format: first non-comment line "n m", then m lines "u v w".
  // '#' starts a comment, whitespace-delimited.
  static WeightedGraph parse(const std::string& text);
  static WeightedGraph load(const std::string& path);
  std::string serialize() const;

 private:
  int n_ = 0;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

// Finite metric as a dense symmetric matrix.
class MetricSpace {
 public:
  MetricSpace(int point_count, std::vector<double> dist_row_major);

  int point_count() const { return n_; }
  double dist(int a, int b) const { return d_[static_cast<size_t>(a) * n_ + b]; }
  double diameter() const;
  double min_positive_distance() const;

 private:
  int n_ = 0;
  std::vector<double> d_;
};

// Shortest-path metric of g (Dijkstra from every node).
MetricSpace apsp_metric(const WeightedGraph& g);

struct MetricViolation {
  enum Kind { NonzeroDiagonal, Negative, Asymmetry, Triangle, BelowUnitMin };
  Kind kind = Triangle;
  int i = -1, j = -1, k = -1;
  double lhs = 0.0, rhs = 0.0;
  std::string describe() const;
};

// Empty result iff m satisfies all MetricSpace invariants.
std::vector<MetricViolation> validate_metric(const MetricSpace& m, double tol = 1e-9);

}  // namespace arrowhst
