#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arrowhst/offline.hpp"
#include "support.hpp"

using namespace arrowhst;
using testsupport::two_leaf_tree;
using testsupport::worked_requests;

TEST_CASE("dummy-only instance costs zero") {
  Hst t = two_leaf_tree();
  RequestSet r = RequestSet::with_dummy(0);
  CHECK(opt_exact(t, r).total_cost == 0.0);
  CHECK(opt_upper_bound_nn(t, r).total_cost == 0.0);
  CHECK(opt_lower_bound(t, condense(t, r)).total_cost == 0.0);
}

TEST_CASE("worked instance optimum is 2") {
  Hst t = two_leaf_tree();
  RequestSet r = worked_requests();
  // (r0, r2, r1): max(0,-1) + max(2,1) = 2; (r0, r1, r2): 2 + 2 = 4
  CHECK(ordering_cost(t, r, {0, 2, 1}) == doctest::Approx(2.0));
  CHECK(ordering_cost(t, r, {0, 1, 2}) == doctest::Approx(4.0));
  auto res = opt_exact(t, r);
  CHECK(res.total_cost == doctest::Approx(2.0));
  CHECK(res.ordering == std::vector<int>{0, 2, 1});
}

TEST_CASE("identical requests at the dummy leaf cost zero") {
  Hst t = two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{0, 0.0}, {0, 0.0}, {0, 0.0}});
  CHECK(opt_exact(t, r).total_cost == 0.0);
}

TEST_CASE("exact size limit enforced") {
  Hst t = two_leaf_tree();
  std::vector<Request> many(13, Request{0, 0.0});
  RequestSet r = RequestSet::from_requests(0, std::move(many));
  CHECK_THROWS_WITH_AS(opt_exact(t, r, 12), doctest::Contains("exact limit"),
                       std::invalid_argument);
}

TEST_CASE("brute force and dp agree on random instances") {
  std::mt19937_64 rng(51);
  for (int iter = 0; iter < 60; ++iter) {
    Hst t = testsupport::random_hst(rng);
    RequestSet r = testsupport::random_requests(rng, t, {.max_requests = 8});
    if (r.size() < 5) continue;
    auto bf = opt_exact_bruteforce(t, r);
    auto dp = opt_exact_dp(t, r);
    CHECK(bf.total_cost == doctest::Approx(dp.total_cost).epsilon(1e-12));
    CHECK(ordering_cost(t, r, bf.ordering) == doctest::Approx(bf.total_cost));
    CHECK(ordering_cost(t, r, dp.ordering) == doctest::Approx(dp.total_cost));
  }
}

TEST_CASE("manhattan mst on three collinear-in-time requests") {
  Hst t = two_leaf_tree();
  // all at one leaf at times 0,1,2: chain (0,1),(1,2) with weight 2 beats
  // any tree using the (0,2) edge of weight 2
  RequestSet r = RequestSet::from_requests(0, {{0, 1.0}, {0, 2.0}});
  auto mst = manhattan_mst(t, r);
  CHECK(mst.total_manhattan == doctest::Approx(2.0));
  REQUIRE(mst.edges.size() == 2);
  CHECK(mst.edges[0] == std::pair<int, int>{0, 1});
  CHECK(mst.edges[1] == std::pair<int, int>{1, 2});
}

TEST_CASE("two requests give the single pair edge") {
  Hst t = two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{1, 1.0}});
  auto mst = manhattan_mst(t, r);
  REQUIRE(mst.edges.size() == 1);
  CHECK(mst.total_manhattan == doctest::Approx(3.0));
}

TEST_CASE("mst minimality against spanning chains") {
  std::mt19937_64 rng(53);
  for (int iter = 0; iter < 50; ++iter) {
    Hst t = testsupport::random_hst(rng);
    RequestSet r = testsupport::random_requests(rng, t);
    auto mst = manhattan_mst(t, r);
    // the greedy chain is a spanning path, so it can never undercut the mst
    auto nn = opt_upper_bound_nn(t, r);
    double chain = 0.0;
    for (size_t i = 1; i < nn.ordering.size(); ++i)
      chain += manhattan_cost(t, r, nn.ordering[i - 1], nn.ordering[i]);
    CHECK(mst.total_manhattan <= chain + 1e-9);
  }
}

TEST_CASE("lower bound requires a condensed set") {
  Hst t = two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{1, 50.0}});
  CHECK_THROWS_WITH_AS(opt_lower_bound(t, r), doctest::Contains("condensed"),
                       std::invalid_argument);
}

TEST_CASE("bounds sandwich the exact optimum") {
  std::mt19937_64 rng(59);
  for (int iter = 0; iter < 80; ++iter) {
    Hst t = testsupport::random_hst(rng);
    RequestSet r = testsupport::random_requests(rng, t, {.max_requests = 9, .gappy = true});
    RequestSet c = condense(t, r);
    auto lower = opt_lower_bound(t, c);
    auto exact_orig = opt_exact(t, r);
    auto exact_cond = opt_exact(t, c);
    auto upper = opt_upper_bound_nn(t, r);
    CHECK(lower.total_cost <= exact_cond.total_cost + 1e-9);
    CHECK(exact_cond.total_cost <= exact_orig.total_cost + 1e-9);
    CHECK(exact_orig.total_cost <= upper.total_cost + 1e-9);
  }
}

TEST_CASE("worked instance lower bound stays below 2") {
  Hst t = two_leaf_tree();
  RequestSet c = condense(t, worked_requests());
  auto lower = opt_lower_bound(t, c);
  CHECK(lower.total_cost <= 2.0 + 1e-9);
  CHECK(lower.certificate.edges.size() == 2);
}

TEST_CASE("nn chain on one-shot requests is a nearest-neighbor walk") {
  std::mt19937_64 rng(61);
  for (int iter = 0; iter < 30; ++iter) {
    Hst t = testsupport::random_hst(rng);
    std::uniform_int_distribution<int> leaf(0, t.leaf_count() - 1);
    std::vector<Request> reqs;
    for (int i = 0; i < 6; ++i) reqs.push_back({leaf(rng), 0.0});
    RequestSet r = RequestSet::from_requests(leaf(rng), std::move(reqs));
    auto nn = opt_upper_bound_nn(t, r);
    // with all times zero the edge cost reduces to the tree distance, so each
    // step picks an unvisited request at minimum distance
    std::vector<char> used(r.size(), 0);
    used[0] = 1;
    int last = 0;
    for (size_t step = 1; step < nn.ordering.size(); ++step) {
      double best = 1e18;
      for (int q = 1; q < r.size(); ++q)
        if (!used[q]) best = std::min(best, t.request_distance(r, last, q));
      int got = nn.ordering[step];
      CHECK(t.request_distance(r, last, got) == doctest::Approx(best));
      used[got] = 1;
      last = got;
    }
  }
}

TEST_CASE("min manhattan path sits between mst and twice mst") {
  std::mt19937_64 rng(67);
  for (int iter = 0; iter < 50; ++iter) {
    Hst t = testsupport::random_hst(rng);
    RequestSet r = testsupport::random_requests(rng, t, {.max_requests = 9});
    auto mst = manhattan_mst(t, r);
    double path = min_manhattan_path_cost(t, r);
    CHECK(mst.total_manhattan <= path + 1e-9);
    CHECK(path <= 2.0 * mst.total_manhattan + 1e-9);
  }
}
