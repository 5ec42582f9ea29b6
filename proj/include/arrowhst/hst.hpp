#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arrowhst/requests.hpp"

namespace arrowhst {

class MetricSpace;

struct HstNode {
  int level = 0;        // -1 (request leaf) .. height (root)
  int parent = -1;      // node id, -1 at the root
  double up_len = 0.0;  // length of the edge to the parent
  std::vector<int> children;
};

// Leveled rooted tree with parameter alpha = 2: the edge from a level-l node
// to its level-(l+1) parent has length 2^l, level -1 request leaves hang on
// zero-length edges, and two level-0 leaves whose lowest common ancestor sits
// on level l are at distance delta(l) = 2^(l+1) - 2.
class Hst {
 public:
  int height() const { return height_; }
  int root() const { return root_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const HstNode& node(int id) const { return nodes_[id]; }

  int leaf_count() const { return static_cast<int>(leaf_nodes_.size()); }
  int leaf_node(int leaf) const { return leaf_nodes_[leaf]; }
  int leaf_index_of(int node) const;  // -1 when node is not a level-0 leaf

  bool has_point_map() const { return !point_leaf_.empty(); }
  int point_count() const { return static_cast<int>(point_leaf_.size()); }
  int leaf_of_point(int point) const { return point_leaf_[point]; }

  bool has_request_leaves() const { return !request_leaf_.empty(); }
  int request_leaf_count() const { return static_cast<int>(request_leaf_.size()); }
  int request_leaf(int request) const { return request_leaf_[request]; }

  double delta(int level) const;  // validated 0 <= level <= height
  static double delta_unchecked(int level) {
    return std::ldexp(1.0, level + 1) - 2.0;  // 2^(level+1) - 2
  }

  int ancestor_at_level(int node, int level) const;
  int lca(int a, int b) const;
  double node_distance(int a, int b) const;
  double leaf_distance(int leaf_a, int leaf_b) const;
  // distance between the leaves of two requests of r (0 for the same leaf)
  double request_distance(const RequestSet& r, int a, int b) const;

  std::string serialize() const;
  static Hst deserialize(const std::string& text);

  class Builder {
   public:
    // up_len defaults to the alpha=2 schedule (2^level; 0 at level -1)
    int add_node(int level, int parent, std::optional<double> up_len = std::nullopt);
    void map_point(int point, int node);
    void map_request(int request, int node);
    Hst build();

   private:
    std::vector<HstNode> nodes_;
    std::vector<std::pair<int, int>> point_map_;
    std::vector<std::pair<int, int>> request_map_;
  };

 private:
  int height_ = 0;
  int root_ = -1;
  std::vector<HstNode> nodes_;
  std::vector<int> leaf_nodes_;    // leaf index -> node id (level-0 nodes)
  std::vector<int> point_leaf_;    // metric point -> leaf index
  std::vector<int> request_leaf_;  // request -> level -1 node id
};

struct HstViolation {
  std::string what;
  int node = -1;
};

// Structural checks: single root, uniform leaf depth, level consistency,
// edge-length schedule, leaf map injectivity. Empty result iff sound.
std::vector<HstViolation> verify_hst(const Hst& t);

// Randomized low-stretch embedding of m into an HST. Tree distances dominate
// the metric for every pair and every seed; expected stretch is logarithmic.
Hst build_frt_hst(const MetricSpace& m, uint64_t seed);

// Gives every request a private level -1 child of its leaf (edge length 0).
Hst attach_request_leaves(const Hst& t, const RequestSet& r);

struct SplitRecord {
  int level = 0;         // level of the working tree whose child subtree split
  int subtree_node = -1; // pre-split subtree root (working tree id)
  int left_root = -1;    // post-split roots (final tree ids, -1 if split again)
  int right_root = -1;
  int left_block_lo = 0, left_block_hi = 0;  // witness blocks, order positions
  int right_block_lo = 0, right_block_hi = 0;
  std::vector<int> left_requests;   // request indices placed in each copy
  std::vector<int> right_requests;
  double time_gap = 0.0;  // t_min(witness right) - t_max(witness left)
};

struct SplitResult {
  Hst tree;
  RequestSet requests;  // same requests with leaves remapped into tree
  std::vector<SplitRecord> records;
};

// Top-down conversion: whenever a level-(l-1) subtree of a level-l working
// tree holds two neighbor blocks whose time gap reaches delta(l), the subtree
// is duplicated and the early blocks go left, the late blocks right. The
// result admits no such pair at any level; the block partition, the queueing
// order and its total cost are preserved.
SplitResult split_hst(const Hst& t, const RequestSet& r, const std::vector<int>& order);

}  // namespace arrowhst
