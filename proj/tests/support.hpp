// Shared instance generators for the unit and acceptance suites.
#pragma once

#include <random>
#include <vector>

#include "arrowhst/hst.hpp"
#include "arrowhst/requests.hpp"

namespace testsupport {

using namespace arrowhst;

// two leaves u=0, v=1 under one root; d(u,v) = 2
inline Hst two_leaf_tree() {
  Hst::Builder b;
  int root = b.add_node(1, -1);
  int u = b.add_node(0, root);
  int v = b.add_node(0, root);
  b.map_point(0, u);
  b.map_point(1, v);
  return b.build();
}

// worked instance: dummy at u, one request at v at t=0, one at u at t=1
inline RequestSet worked_requests() {
  return RequestSet::from_requests(0, {{1, 0.0}, {0, 1.0}});
}

// random uniform-depth tree of height in [1, max_height], 1..3 children each
inline Hst random_hst(std::mt19937_64& rng, int max_height = 4, int max_leaves = 48) {
  std::uniform_int_distribution<int> hdist(1, max_height);
  int h = hdist(rng);
  Hst::Builder b;
  std::vector<int> frontier{b.add_node(h, -1)};
  for (int level = h - 1; level >= 0; --level) {
    std::vector<int> next;
    for (int parent : frontier) {
      int kids = 1 + static_cast<int>(rng() % 3);
      if (static_cast<int>(next.size()) > max_leaves) kids = 1;  // soft width cap
      for (int k = 0; k < kids; ++k) next.push_back(b.add_node(level, parent));
    }
    frontier = std::move(next);
  }
  Hst t = b.build();
  return t;
}

struct RandomWorkloadOptions {
  int max_requests = 11;  // non-dummy max
  double time_scale = 1.0;
  bool gappy = false;  // inject large gaps to provoke subtree splits
};

inline RequestSet random_requests(std::mt19937_64& rng, const Hst& t,
                                  const RandomWorkloadOptions& opt = {}) {
  std::uniform_int_distribution<int> leaf(0, t.leaf_count() - 1);
  std::uniform_int_distribution<int> count(1, opt.max_requests);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int k = count(rng);
  double horizon = opt.time_scale * Hst::delta_unchecked(t.height());
  std::vector<Request> reqs;
  double now = 0.0;
  for (int i = 0; i < k; ++i) {
    if (opt.gappy && uni(rng) < 0.4) {
      now += Hst::delta_unchecked(1 + static_cast<int>(rng() % t.height()));
    } else {
      now += uni(rng) * horizon / k;
    }
    // dyadic times keep the synchronous arithmetic exact
    now = std::ldexp(std::round(std::ldexp(now, 16)), -16);
    reqs.push_back({leaf(rng), now});
  }
  return RequestSet::from_requests(leaf(rng), std::move(reqs));
}

}  // namespace testsupport
