#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "arrowhst/analysis.hpp"
#include "arrowhst/hst.hpp"
#include "arrowhst/requests.hpp"

namespace arrowhst {

namespace {

// Mutable working copy: splitting detaches subtrees and appends clones, the
// final tree is compacted from whatever stays reachable.
struct WorkTree {
  struct Node {
    int level;
    int parent;
    std::vector<int> children;
  };
  std::vector<Node> nodes;
  std::vector<int> req_node;  // request -> level-0 node holding it
  int root = -1;

  int ancestor_at_level(int x, int level) const {
    while (nodes[x].level < level) x = nodes[x].parent;
    return x;
  }

  int clone_subtree(int src, int parent) {
    int id = static_cast<int>(nodes.size());
    nodes.push_back({nodes[src].level, parent, {}});
    auto kids = nodes[src].children;  // copy: nodes may reallocate
    for (int c : kids) {
      int cc = clone_subtree(c, id);
      nodes[id].children.push_back(cc);
    }
    return id;
  }
};

struct Splitter {
  WorkTree wt;
  const RequestSet& reqs;
  const std::vector<int>& order;
  std::vector<SplitRecord> records;

  // blocks at `level` inside the subtree rooted at each child of x, as
  // maximal runs of order positions sharing a level-`level` ancestor
  struct LevelBlock {
    int lo, hi;
    int subtree;
  };

  std::vector<LevelBlock> blocks_at_level(int level) const {
    std::vector<LevelBlock> blocks;
    for (size_t pos = 0; pos < order.size(); ++pos) {
      int anc = wt.ancestor_at_level(wt.req_node[order[pos]], level);
      if (!blocks.empty() && blocks.back().subtree == anc)
        blocks.back().hi = static_cast<int>(pos);
      else
        blocks.push_back({static_cast<int>(pos), static_cast<int>(pos), anc});
    }
    return blocks;
  }

  double block_tmin(const LevelBlock& b) const {
    double v = std::numeric_limits<double>::infinity();
    for (int pos = b.lo; pos <= b.hi; ++pos) v = std::min(v, reqs.time(order[pos]));
    return v;
  }
  double block_tmax(const LevelBlock& b) const {
    double v = -std::numeric_limits<double>::infinity();
    for (int pos = b.lo; pos <= b.hi; ++pos) v = std::max(v, reqs.time(order[pos]));
    return v;
  }

  void run() { process(wt.root); }

  void process(int x) {
    const int l = wt.nodes[x].level;
    if (l <= 0) return;
    const double threshold = Hst::delta_unchecked(l);
    bool changed = true;
    while (changed) {
      changed = false;
      auto blocks = blocks_at_level(l - 1);
      for (int c : wt.nodes[x].children) {
        std::vector<int> own;  // indices into blocks, ascending positions
        for (size_t k = 0; k < blocks.size(); ++k)
          if (blocks[k].subtree == c) own.push_back(static_cast<int>(k));
        for (size_t k = 0; k + 1 < own.size(); ++k) {
          const auto& bi = blocks[own[k]];
          const auto& bj = blocks[own[k + 1]];
          double gap = block_tmin(bj) - block_tmax(bi);
          if (gap >= threshold) {
            split_child(x, c, blocks, own, k, gap);
            changed = true;
            break;
          }
        }
        if (changed) break;
      }
    }
    auto kids = wt.nodes[x].children;
    for (int c : kids) process(c);
  }

  void split_child(int x, int c, const std::vector<LevelBlock>& blocks,
                   const std::vector<int>& own, size_t k, double gap) {
    const LevelBlock& bi = blocks[own[k]];
    const LevelBlock& bj = blocks[own[k + 1]];
    int left_root = wt.clone_subtree(c, x);
    int right_root = wt.clone_subtree(c, x);

    // node correspondence by identical traversal shape
    std::vector<std::pair<int, int>> remap_left = correspondence(c, left_root);
    std::vector<std::pair<int, int>> remap_right = correspondence(c, right_root);
    auto mapped = [](const std::vector<std::pair<int, int>>& m, int node) {
      for (auto [from, to] : m)
        if (from == node) return to;
      throw std::logic_error("split: clone correspondence is incomplete");
    };

    SplitRecord rec;
    rec.level = wt.nodes[x].level;
    rec.subtree_node = c;
    rec.left_root = left_root;
    rec.right_root = right_root;
    rec.left_block_lo = bi.lo;
    rec.left_block_hi = bi.hi;
    rec.right_block_lo = bj.lo;
    rec.right_block_hi = bj.hi;
    rec.time_gap = gap;

    for (size_t idx = 0; idx < own.size(); ++idx) {
      bool left = idx <= k;
      for (int pos = blocks[own[idx]].lo; pos <= blocks[own[idx]].hi; ++pos) {
        int q = order[pos];
        wt.req_node[q] = mapped(left ? remap_left : remap_right, wt.req_node[q]);
        (left ? rec.left_requests : rec.right_requests).push_back(q);
      }
    }
    records.push_back(std::move(rec));

    // c is replaced by its two copies, keeping the sibling position
    auto& kids = wt.nodes[x].children;
    auto it = std::find(kids.begin(), kids.end(), c);
    *it = left_root;
    kids.insert(it + 1, right_root);
  }

  std::vector<std::pair<int, int>> correspondence(int src, int dst) const {
    std::vector<std::pair<int, int>> out;
    std::vector<std::pair<int, int>> stack{{src, dst}};
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      out.emplace_back(a, b);
      for (size_t i = 0; i < wt.nodes[a].children.size(); ++i)
        stack.emplace_back(wt.nodes[a].children[i], wt.nodes[b].children[i]);
    }
    return out;
  }
};

}  // namespace

SplitResult split_hst(const Hst& t, const RequestSet& r, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != r.size() || order.empty() || order[0] != 0)
    throw std::invalid_argument("split: order must cover all requests and start with the dummy");
  if (t.has_request_leaves())
    throw std::invalid_argument("split: operate on the level-0 tree, attach leaves afterwards");

  Splitter sp{.wt = {}, .reqs = r, .order = order, .records = {}};
  sp.wt.nodes.reserve(t.node_count());
  for (int id = 0; id < t.node_count(); ++id)
    sp.wt.nodes.push_back({t.node(id).level, t.node(id).parent, t.node(id).children});
  sp.wt.root = t.root();
  sp.wt.req_node.resize(r.size());
  for (int q = 0; q < r.size(); ++q) sp.wt.req_node[q] = t.leaf_node(r.leaf(q));
  sp.run();

  // compact the working tree into a fresh Hst, dropping detached subtrees
  Hst::Builder b;
  std::vector<int> final_id(sp.wt.nodes.size(), -1);
  std::vector<int> bfs{sp.wt.root};
  final_id[sp.wt.root] = b.add_node(sp.wt.nodes[sp.wt.root].level, -1);
  for (size_t i = 0; i < bfs.size(); ++i) {
    int u = bfs[i];
    for (int c : sp.wt.nodes[u].children) {
      final_id[c] = b.add_node(sp.wt.nodes[c].level, final_id[u]);
      bfs.push_back(c);
    }
  }
  SplitResult res;
  res.tree = b.build();
  res.requests = r;
  for (int q = 0; q < r.size(); ++q) {
    int node = final_id[sp.wt.req_node[q]];
    int leaf = res.tree.leaf_index_of(node);
    if (leaf < 0) throw std::logic_error("split: request landed on a dead node");
    res.requests.set_leaf(q, leaf);
  }
  res.records = std::move(sp.records);
  for (auto& rec : res.records) {
    rec.left_root = rec.left_root >= 0 ? final_id[rec.left_root] : -1;
    rec.right_root = rec.right_root >= 0 ? final_id[rec.right_root] : -1;
  }
  return res;
}

}  // namespace arrowhst
