#include "arrowhst/metric_graph.hpp"

#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "arrowhst/util.hpp"

namespace arrowhst {

WeightedGraph::WeightedGraph(int node_count, std::vector<GraphEdge> edges)
    : n_(node_count), edges_(std::move(edges)) {
  if (n_ <= 0) throw std::invalid_argument("graph: node count must be positive");
  adj_.assign(n_, {});
  for (const auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
      throw std::invalid_argument("graph: edge endpoint out of range");
    if (e.u == e.v) throw std::invalid_argument("graph: self-loops are not allowed");
    if (e.w < 1.0)
      throw std::invalid_argument("graph: edge weight below one (weights are normalized to w >= 1)");
    adj_[e.u].emplace_back(e.v, e.w);
    adj_[e.v].emplace_back(e.u, e.w);
  }
  // connectivity
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (auto [v, w] : adj_[u]) {
      (void)w;
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != n_) throw std::invalid_argument("graph: disconnected input");
}

namespace {

// strips '#' comments, returns whitespace-separated tokens
std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) out.push_back(tok);
  }
  return out;
}

long parse_int(const std::string& tok, const char* what) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("graph: parse error in ") + what + ": '" + tok + "'");
  }
  if (pos != tok.size())
    throw std::invalid_argument(std::string("graph: parse error in ") + what + ": '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, const char* what) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("graph: parse error in ") + what + ": '" + tok + "'");
  }
  if (pos != tok.size())
    throw std::invalid_argument(std::string("graph: parse error in ") + what + ": '" + tok + "'");
  return v;
}

}  // namespace

WeightedGraph WeightedGraph::parse(const std::string& text) {
  auto toks = tokenize(text);
  if (toks.size() < 2) throw std::invalid_argument("graph: parse error: missing 'n m' header");
  int n = static_cast<int>(parse_int(toks[0], "node count"));
  long m = parse_int(toks[1], "edge count");
  if (m < 0 || toks.size() != static_cast<size_t>(2 + 3 * m))
    throw std::invalid_argument("graph: parse error: token count does not match edge count");
  std::vector<GraphEdge> edges;
  edges.reserve(m);
  for (long i = 0; i < m; ++i) {
    GraphEdge e;
    e.u = static_cast<int>(parse_int(toks[2 + 3 * i], "edge endpoint"));
    e.v = static_cast<int>(parse_int(toks[3 + 3 * i], "edge endpoint"));
    e.w = parse_real(toks[4 + 3 * i], "edge weight");
    edges.push_back(e);
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("graph: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string WeightedGraph::serialize() const {
  std::ostringstream out;
  out << n_ << ' ' << edges_.size() << '\n';
  for (const auto& e : edges_)
    out << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
  return out.str();
}

MetricSpace::MetricSpace(int point_count, std::vector<double> dist_row_major)
    : n_(point_count), d_(std::move(dist_row_major)) {
  if (n_ <= 0) throw std::invalid_argument("metric: point count must be positive");
  if (d_.size() != static_cast<size_t>(n_) * n_)
    throw std::invalid_argument("metric: matrix size mismatch");
}

double MetricSpace::diameter() const {
  double m = 0.0;
  for (double v : d_) m = std::max(m, v);
  return m;
}

double MetricSpace::min_positive_distance() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) m = std::min(m, dist(i, j));
  return m;
}

MetricSpace apsp_metric(const WeightedGraph& g) {
  const int n = g.node_count();
  std::vector<double> d(static_cast<size_t>(n) * n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  for (int s = 0; s < n; ++s) {
    auto* row = d.data() + static_cast<size_t>(s) * n;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    row[s] = 0.0;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > row[u]) continue;
      for (auto [v, w] : g.neighbors(u)) {
        double cand = du + w;
        if (cand < row[v]) {
          row[v] = cand;
          pq.emplace(cand, v);
        }
      }
    }
  }
  return MetricSpace(n, std::move(d));
}

std::string MetricViolation::describe() const {
  std::ostringstream out;
  switch (kind) {
    case NonzeroDiagonal:
      out << "dist(" << i << "," << i << ") = " << lhs << " != 0";
      break;
    case Negative:
      out << "dist(" << i << "," << j << ") = " << lhs << " < 0";
      break;
    case Asymmetry:
      out << "dist(" << i << "," << j << ") = " << lhs << " != dist(" << j << "," << i
          << ") = " << rhs;
      break;
    case Triangle:
      out << "dist(" << i << "," << k << ") = " << lhs << " > dist(" << i << "," << j
          << ") + dist(" << j << "," << k << ") = " << rhs;
      break;
    case BelowUnitMin:
      out << "dist(" << i << "," << j << ") = " << lhs << " < 1 (normalization)";
      break;
  }
  return out.str();
}

std::vector<MetricViolation> validate_metric(const MetricSpace& m, double tol) {
  std::vector<MetricViolation> out;
  const int n = m.point_count();
  for (int i = 0; i < n; ++i) {
    if (std::fabs(m.dist(i, i)) > tol)
      out.push_back({MetricViolation::NonzeroDiagonal, i, i, -1, m.dist(i, i), 0.0});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (m.dist(i, j) < -tol)
        out.push_back({MetricViolation::Negative, i, j, -1, m.dist(i, j), 0.0});
      if (std::fabs(m.dist(i, j) - m.dist(j, i)) > tol)
        out.push_back({MetricViolation::Asymmetry, i, j, -1, m.dist(i, j), m.dist(j, i)});
      if (m.dist(i, j) < 1.0 - tol)
        out.push_back({MetricViolation::BelowUnitMin, i, j, -1, m.dist(i, j), 1.0});
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        double lhs = m.dist(i, k);
        double rhs = m.dist(i, j) + m.dist(j, k);
        if (lhs > rhs + tol)
          out.push_back({MetricViolation::Triangle, i, j, k, lhs, rhs});
      }
    }
  return out;
}

}  // namespace arrowhst
