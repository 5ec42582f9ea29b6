#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arrowhst/hst.hpp"
#include "arrowhst/metric_graph.hpp"
#include "arrowhst/experiment.hpp"
#include "support.hpp"

using namespace arrowhst;

TEST_CASE("delta schedule") {
  Hst t = testsupport::two_leaf_tree();
  CHECK(t.delta(0) == 0.0);
  CHECK(t.delta(1) == 2.0);
  CHECK(Hst::delta_unchecked(2) == 6.0);
  CHECK(Hst::delta_unchecked(3) == 14.0);
  CHECK_THROWS_AS(t.delta(2), std::out_of_range);
  CHECK_THROWS_AS(t.delta(-1), std::out_of_range);
}

TEST_CASE("delta recurrence: delta(l+1) = 2*delta(l) + 2 and <= 3*delta(l) for l >= 1") {
  for (int l = 0; l < 20; ++l) {
    CHECK(Hst::delta_unchecked(l + 1) == 2.0 * Hst::delta_unchecked(l) + 2.0);
    if (l >= 1) CHECK(Hst::delta_unchecked(l + 1) <= 3.0 * Hst::delta_unchecked(l));
  }
}

TEST_CASE("two leaf tree distances") {
  Hst t = testsupport::two_leaf_tree();
  CHECK(t.leaf_distance(0, 1) == 2.0);
  CHECK(t.leaf_distance(0, 0) == 0.0);
  CHECK(verify_hst(t).empty());
}

TEST_CASE("verify flags a leaf at the wrong depth") {
  Hst::Builder b;
  int root = b.add_node(2, -1);
  int mid = b.add_node(1, root);
  b.add_node(0, mid);
  b.add_node(1, root);  // childless level-1 node
  Hst t = b.build();
  bool flagged = false;
  for (const auto& v : verify_hst(t)) flagged |= v.what.find("wrong depth") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("verify flags an off-schedule edge length") {
  Hst::Builder b;
  int root = b.add_node(2, -1);
  int mid = b.add_node(1, root, 3.0);  // schedule wants 2
  b.add_node(0, mid);
  Hst t = b.build();
  bool flagged = false;
  for (const auto& v : verify_hst(t)) flagged |= v.what.find("schedule") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("single point embeds into a single node") {
  MetricSpace m(1, {0.0});
  Hst t = build_frt_hst(m, 42);
  CHECK(t.leaf_count() == 1);
  CHECK(t.node_count() == 1);
  CHECK(t.leaf_of_point(0) == 0);
}

TEST_CASE("two points at distance one land at tree distance two") {
  // possible lca levels give distances {2, 6, 14, ...}; height 1 forces 2
  MetricSpace m(2, {0, 1, 1, 0});
  for (uint64_t seed = 0; seed < 64; ++seed) {
    Hst t = build_frt_hst(m, seed);
    CHECK(t.height() == 1);
    CHECK(t.leaf_distance(t.leaf_of_point(0), t.leaf_of_point(1)) == 2.0);
    CHECK(verify_hst(t).empty());
  }
}

TEST_CASE("embedding minimum distance guard") {
  MetricSpace m(2, {0, 0.5, 0.5, 0});
  CHECK_THROWS_AS(build_frt_hst(m, 1), std::invalid_argument);
}

TEST_CASE("dominance holds for every pair on every seed") {
  auto check_metric = [](const MetricSpace& m, uint64_t seeds) {
    for (uint64_t seed = 0; seed < seeds; ++seed) {
      Hst t = build_frt_hst(m, seed);
      REQUIRE(verify_hst(t).empty());
      for (int a = 0; a < m.point_count(); ++a)
        for (int b = a + 1; b < m.point_count(); ++b) {
          double dt = t.leaf_distance(t.leaf_of_point(a), t.leaf_of_point(b));
          CHECK(dt >= m.dist(a, b) - 1e-12);
        }
    }
  };
  check_metric(apsp_metric(make_cycle_graph(9)), 100);
  check_metric(apsp_metric(make_grid_graph(3, 4)), 100);
  check_metric(apsp_metric(make_random_geometric_graph(12, 0.6, 5)), 100);
}

TEST_CASE("uniform 16-point metric: dominance plus reported mean stretch") {
  auto m = apsp_metric(make_complete_uniform_graph(16));
  double stretch_sum = 0.0;
  int samples = 0;
  const int seeds = 2000;
  for (uint64_t seed = 0; seed < seeds; ++seed) {
    Hst t = build_frt_hst(m, seed);
    for (int a = 0; a < 16; ++a)
      for (int b = a + 1; b < 16; ++b) {
        double dt = t.leaf_distance(t.leaf_of_point(a), t.leaf_of_point(b));
        REQUIRE(dt >= 1.0);
        stretch_sum += dt;
        ++samples;
      }
  }
  double mean = stretch_sum / samples;
  double c = mean / std::log2(16.0);
  MESSAGE("mean stretch ", mean, " fitted c ", c);
  CHECK(c > 0.0);
}

TEST_CASE("frt trees are deterministic per seed") {
  auto m = apsp_metric(make_cycle_graph(12));
  CHECK(build_frt_hst(m, 9).serialize() == build_frt_hst(m, 9).serialize());
  // a different seed virtually always moves some leaf
  CHECK(build_frt_hst(m, 9).serialize() != build_frt_hst(m, 10).serialize());
}

TEST_CASE("serialization round-trips") {
  auto m = apsp_metric(make_cycle_graph(10));
  Hst t = build_frt_hst(m, 3);
  Hst back = Hst::deserialize(t.serialize());
  CHECK(back.serialize() == t.serialize());
  CHECK(back.height() == t.height());
  CHECK(back.leaf_count() == t.leaf_count());
}

TEST_CASE("attach request leaves keeps distances") {
  Hst t = testsupport::two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{0, 0.5}, {0, 2.0}, {1, 1.0}});
  Hst at = attach_request_leaves(t, r);
  CHECK(at.has_request_leaves());
  CHECK(verify_hst(at).empty());
  // same leaf: distance stays 0; across: stays 2
  CHECK(at.node_distance(at.request_leaf(0), at.request_leaf(1)) == 0.0);
  CHECK(at.node_distance(at.request_leaf(0), at.request_leaf(3)) == 2.0);
  CHECK(at.request_distance(r, 1, 3) == 2.0);
  // one level -1 child per request
  int minus_one = 0;
  for (int id = 0; id < at.node_count(); ++id)
    if (at.node(id).level == -1) ++minus_one;
  CHECK(minus_one == r.size());
}

TEST_CASE("attach rejects unknown leaves") {
  Hst t = testsupport::two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{7, 0.0}});
  CHECK_THROWS_WITH_AS(attach_request_leaves(t, r), doctest::Contains("unknown leaf"),
                       std::invalid_argument);
}

TEST_CASE("random trees verify clean") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    Hst t = testsupport::random_hst(rng);
    CHECK(verify_hst(t).empty());
    // lca levels and delta agree with walked distances
    for (int a = 0; a < t.leaf_count(); ++a)
      for (int b = a + 1; b < t.leaf_count(); ++b) {
        int l = t.node(t.lca(t.leaf_node(a), t.leaf_node(b))).level;
        CHECK(t.leaf_distance(a, b) == Hst::delta_unchecked(l));
      }
  }
}
