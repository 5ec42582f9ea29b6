#include "arrowhst/hst.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "arrowhst/metric_graph.hpp"
#include "arrowhst/util.hpp"

namespace arrowhst {

namespace {

double schedule_len(int level) {
  return level < 0 ? 0.0 : std::ldexp(1.0, level);  // 2^level, 0 into level -1
}

}  // namespace

int Hst::Builder::add_node(int level, int parent, std::optional<double> up_len) {
  if (level < -1) throw std::invalid_argument("hst: level below -1");
  int id = static_cast<int>(nodes_.size());
  HstNode n;
  n.level = level;
  n.parent = parent;
  n.up_len = up_len.value_or(parent < 0 ? 0.0 : schedule_len(level));
  if (parent >= 0) {
    if (parent >= id) throw std::invalid_argument("hst: parent must be created first");
    nodes_[parent].children.push_back(id);
  }
  nodes_.push_back(std::move(n));
  return id;
}

void Hst::Builder::map_point(int point, int node) { point_map_.emplace_back(point, node); }

void Hst::Builder::map_request(int request, int node) { request_map_.emplace_back(request, node); }

Hst Hst::Builder::build() {
  if (nodes_.empty()) throw std::invalid_argument("hst: empty tree");
  Hst t;
  t.nodes_ = std::move(nodes_);
  t.root_ = -1;
  int max_level = 0;
  for (int id = 0; id < t.node_count(); ++id) {
    const auto& n = t.nodes_[id];
    if (n.parent < 0) {
      if (t.root_ >= 0) throw std::invalid_argument("hst: multiple roots");
      t.root_ = id;
    }
    max_level = std::max(max_level, n.level);
    if (n.level == 0) t.leaf_nodes_.push_back(id);
  }
  if (t.root_ < 0) throw std::invalid_argument("hst: no root");
  t.height_ = t.nodes_[t.root_].level;
  if (t.height_ != max_level) throw std::invalid_argument("hst: root is not the top level");
  if (!point_map_.empty()) {
    int max_point = 0;
    for (auto [p, n] : point_map_) max_point = std::max(max_point, p);
    t.point_leaf_.assign(max_point + 1, -1);
    for (auto [p, node] : point_map_) {
      int li = t.leaf_index_of(node);
      if (li < 0) throw std::invalid_argument("hst: point mapped to a non-leaf node");
      t.point_leaf_[p] = li;
    }
    for (int p = 0; p <= max_point; ++p)
      if (t.point_leaf_[p] < 0) throw std::invalid_argument("hst: point map not total");
  }
  if (!request_map_.empty()) {
    int max_req = 0;
    for (auto [r, n] : request_map_) max_req = std::max(max_req, r);
    t.request_leaf_.assign(max_req + 1, -1);
    for (auto [r, node] : request_map_) {
      if (t.nodes_[node].level != -1)
        throw std::invalid_argument("hst: request mapped to a node not on level -1");
      t.request_leaf_[r] = node;
    }
    for (int r = 0; r <= max_req; ++r)
      if (t.request_leaf_[r] < 0) throw std::invalid_argument("hst: request map not total");
  }
  return t;
}

int Hst::leaf_index_of(int node) const {
  auto it = std::find(leaf_nodes_.begin(), leaf_nodes_.end(), node);
  return it == leaf_nodes_.end() ? -1 : static_cast<int>(it - leaf_nodes_.begin());
}

double Hst::delta(int level) const {
  if (level < 0 || level > height_)
    throw std::out_of_range("hst: delta level out of range [0, height]");
  return delta_unchecked(level);
}

int Hst::ancestor_at_level(int node, int level) const {
  int cur = node;
  while (nodes_[cur].level < level) {
    cur = nodes_[cur].parent;
    if (cur < 0) throw std::out_of_range("hst: ancestor level above root");
  }
  if (nodes_[cur].level != level) throw std::out_of_range("hst: node above requested level");
  return cur;
}

int Hst::lca(int a, int b) const {
  while (a != b) {
    if (nodes_[a].level < nodes_[b].level)
      a = nodes_[a].parent;
    else if (nodes_[b].level < nodes_[a].level)
      b = nodes_[b].parent;
    else {
      a = nodes_[a].parent;
      b = nodes_[b].parent;
    }
    if (a < 0 || b < 0) throw std::logic_error("hst: disjoint nodes in lca");
  }
  return a;
}

double Hst::node_distance(int a, int b) const {
  double d = 0.0;
  while (a != b) {
    if (nodes_[a].level <= nodes_[b].level) {
      d += nodes_[a].up_len;
      a = nodes_[a].parent;
    } else {
      d += nodes_[b].up_len;
      b = nodes_[b].parent;
    }
    if (a < 0 || b < 0) throw std::logic_error("hst: disjoint nodes in distance");
  }
  return d;
}

double Hst::leaf_distance(int leaf_a, int leaf_b) const {
  return node_distance(leaf_nodes_[leaf_a], leaf_nodes_[leaf_b]);
}

double Hst::request_distance(const RequestSet& r, int a, int b) const {
  return leaf_distance(r.leaf(a), r.leaf(b));
}

std::string Hst::serialize() const {
  std::ostringstream out;
  out << "hst " << height_ << ' ' << nodes_.size() << '\n';
  for (int id = 0; id < node_count(); ++id) {
    const auto& n = nodes_[id];
    out << "node " << id << ' ' << n.level << ' ' << n.parent << ' ' << format_double(n.up_len)
        << '\n';
  }
  for (size_t p = 0; p < point_leaf_.size(); ++p)
    out << "point " << p << ' ' << leaf_nodes_[point_leaf_[p]] << '\n';
  for (size_t r = 0; r < request_leaf_.size(); ++r)
    out << "request " << r << ' ' << request_leaf_[r] << '\n';
  return out.str();
}

Hst Hst::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string kw;
  if (!(in >> kw) || kw != "hst") throw std::invalid_argument("hst: bad serialization header");
  int height = 0;
  size_t count = 0;
  if (!(in >> height >> count)) throw std::invalid_argument("hst: bad serialization header");
  Builder b;
  for (size_t i = 0; i < count; ++i) {
    int id, level, parent;
    std::string len_tok;
    if (!(in >> kw >> id >> level >> parent >> len_tok) || kw != "node")
      throw std::invalid_argument("hst: bad node line");
    double len = std::strtod(len_tok.c_str(), nullptr);
    int got = b.add_node(level, parent, len);
    if (got != id) throw std::invalid_argument("hst: node ids must be consecutive");
  }
  std::vector<std::pair<int, int>> points, requests;
  while (in >> kw) {
    int a, node;
    if (!(in >> a >> node)) throw std::invalid_argument("hst: bad map line");
    if (kw == "point")
      points.emplace_back(a, node);
    else if (kw == "request")
      requests.emplace_back(a, node);
    else
      throw std::invalid_argument("hst: unknown record '" + kw + "'");
  }
  for (auto [p, node] : points) b.map_point(p, node);
  for (auto [r, node] : requests) b.map_request(r, node);
  Hst t = b.build();
  if (t.height() != height) throw std::invalid_argument("hst: height mismatch");
  return t;
}

std::vector<HstViolation> verify_hst(const Hst& t) {
  std::vector<HstViolation> out;
  for (int id = 0; id < t.node_count(); ++id) {
    const auto& n = t.node(id);
    if (id == t.root()) {
      if (n.level != t.height())
        out.push_back({"root is not at the top level", id});
      continue;
    }
    if (n.parent < 0 || n.parent >= t.node_count()) {
      out.push_back({"dangling parent link", id});
      continue;
    }
    const auto& p = t.node(n.parent);
    if (p.level != n.level + 1)
      out.push_back({"parent is not exactly one level up", id});
    double want = n.level < 0 ? 0.0 : std::ldexp(1.0, n.level);
    if (n.up_len != want)
      out.push_back({"edge length off the alpha=2 schedule (want " + format_double(want) +
                         ", got " + format_double(n.up_len) + ")",
                     id});
    bool ok_leaf_level = n.level == 0 || (t.has_request_leaves() && n.level == -1);
    if (n.children.empty() && !ok_leaf_level)
      out.push_back({"leaf at the wrong depth", id});
    if (!n.children.empty() && n.level <= -1)
      out.push_back({"level -1 node with children", id});
  }
  // leaf distances must realize delta(lca level)
  for (int a = 0; a < t.leaf_count(); ++a) {
    for (int b = a + 1; b < t.leaf_count(); ++b) {
      int l = t.node(t.lca(t.leaf_node(a), t.leaf_node(b))).level;
      double got = t.leaf_distance(a, b);
      double want = Hst::delta_unchecked(l);
      if (!approx_eq(got, want))
        out.push_back({"leaf distance " + format_double(got) + " != delta(" + std::to_string(l) +
                           ") = " + format_double(want),
                       t.leaf_node(a)});
    }
  }
  if (t.has_point_map()) {
    std::vector<char> used(t.leaf_count(), 0);
    for (int p = 0; p < t.point_count(); ++p) {
      int li = t.leaf_of_point(p);
      if (li < 0 || li >= t.leaf_count()) {
        out.push_back({"point mapped outside the leaf set", p});
        continue;
      }
      if (used[li]) out.push_back({"leaf map not injective", t.leaf_node(li)});
      used[li] = 1;
    }
  }
  return out;
}

Hst build_frt_hst(const MetricSpace& m, uint64_t seed) {
  const int n = m.point_count();
  if (n > 1 && m.min_positive_distance() < 1.0)
    throw std::invalid_argument("frt: minimum distance must be >= 1");

  Hst::Builder b;
  if (n == 1) {
    int root = b.add_node(0, -1);
    b.map_point(0, root);
    return b.build();
  }

  double diam = m.diameter();
  int h = 1;
  while (std::ldexp(1.0, h) < diam) ++h;  // smallest h with 2^h >= diameter

  std::mt19937_64 rng(splitmix64(seed));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[perm[i]] = i;
  // radius multiplier in [1,2) with density 1/(x ln 2)
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double beta = std::exp2(uni(rng));

  // Top-down ball carving: the level-l clusters inside a parent cluster are
  // the groups that share the first permutation point within radius
  // beta * 2^(l-2). At level 1 the radius drops below the minimum distance,
  // so clusters become singletons and level 0 holds one leaf per point.
  int root = b.add_node(h, -1);
  std::vector<std::pair<std::vector<int>, int>> frontier;  // (points, tree node)
  {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    frontier.emplace_back(std::move(all), root);
  }
  for (int level = h - 1; level >= 1; --level) {
    double radius = beta * std::ldexp(1.0, level - 2);
    std::vector<std::pair<std::vector<int>, int>> next;
    for (auto& [pts, parent_node] : frontier) {
      std::map<int, std::vector<int>> groups;  // center rank -> points
      for (int u : pts) {
        int best_rank = rank[u];  // u itself always qualifies (d=0)
        for (int i = 0; i < best_rank; ++i) {
          if (m.dist(u, perm[i]) <= radius) {
            best_rank = i;
            break;
          }
        }
        groups[best_rank].push_back(u);
      }
      for (auto& [center, members] : groups) {
        int node = b.add_node(level, parent_node);
        next.emplace_back(std::move(members), node);
      }
    }
    frontier = std::move(next);
  }
  for (auto& [pts, parent_node] : frontier) {
    for (int u : pts) {
      int leaf = b.add_node(0, parent_node);
      b.map_point(u, leaf);
    }
  }
  return b.build();
}

Hst attach_request_leaves(const Hst& t, const RequestSet& r) {
  if (t.has_request_leaves())
    throw std::invalid_argument("hst: request leaves already attached");
  Hst::Builder b;
  for (int id = 0; id < t.node_count(); ++id) {
    const auto& n = t.node(id);
    int got = b.add_node(n.level, n.parent, n.up_len);
    (void)got;
  }
  for (int p = 0; t.has_point_map() && p < t.point_count(); ++p)
    b.map_point(p, t.leaf_node(t.leaf_of_point(p)));
  for (int i = 0; i < r.size(); ++i) {
    int leaf = r.leaf(i);
    if (leaf < 0 || leaf >= t.leaf_count())
      throw std::invalid_argument("hst: request at unknown leaf");
    int child = b.add_node(-1, t.leaf_node(leaf), 0.0);
    b.map_request(i, child);
  }
  return b.build();
}

}  // namespace arrowhst
