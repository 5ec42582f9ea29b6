#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arrowhst/hst.hpp"
#include "arrowhst/requests.hpp"
#include "support.hpp"

using namespace arrowhst;
using testsupport::two_leaf_tree;

TEST_CASE("manhattan cost basics") {
  Hst t = two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{1, 1.0}, {1, 0.0}});
  CHECK(manhattan_cost(t, r, 0, 0) == 0.0);
  CHECK(manhattan_cost(t, r, 0, 1) == 3.0);  // d=2 plus time gap 1
  CHECK(manhattan_cost(t, r, 0, 2) == 2.0);
  CHECK(manhattan_cost(t, r, 1, 0) == manhattan_cost(t, r, 0, 1));
}

TEST_CASE("manhattan cost satisfies the metric axioms") {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 40; ++iter) {
    Hst t = testsupport::random_hst(rng);
    RequestSet r = testsupport::random_requests(rng, t);
    for (int a = 0; a < r.size(); ++a) {
      CHECK(manhattan_cost(t, r, a, a) == 0.0);
      for (int b = 0; b < r.size(); ++b) {
        CHECK(manhattan_cost(t, r, a, b) == manhattan_cost(t, r, b, a));
        for (int c = 0; c < r.size(); ++c)
          CHECK(manhattan_cost(t, r, a, c) <=
                manhattan_cost(t, r, a, b) + manhattan_cost(t, r, b, c) + 1e-9);
      }
    }
  }
}

TEST_CASE("one-shot sets are condensed") {
  Hst t = two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{0, 0.0}, {1, 0.0}, {1, 0.0}});
  CHECK(is_condensed(t, r).condensed);
}

TEST_CASE("dummy-only set is condensed") {
  Hst t = two_leaf_tree();
  CHECK(is_condensed(t, RequestSet::with_dummy(0)).condensed);
}

TEST_CASE("a large gap is detected and closed") {
  Hst t = two_leaf_tree();
  // exhaustive over the 2-element set: slack = 10 - 0 - 2 = 8
  RequestSet r = RequestSet::from_requests(0, {{1, 10.0}});
  auto w = is_condensed(t, r);
  CHECK_FALSE(w.condensed);
  CHECK(w.i == 0);
  CHECK(w.j == 1);
  RequestSet c = condense(t, r);
  CHECK(c.time(1) == doctest::Approx(2.0));
  CHECK(is_condensed(t, c).condensed);
}

TEST_CASE("two independent gaps both close") {
  Hst t = two_leaf_tree();
  RequestSet r = RequestSet::from_requests(0, {{1, 10.0}, {0, 30.0}});
  RequestSet c = condense(t, r);
  CHECK(is_condensed(t, c).condensed);
  CHECK(c.time(1) == doctest::Approx(2.0));
  CHECK(c.time(2) == doctest::Approx(4.0));  // second gap closes to d(v,u) = 2
}

TEST_CASE("condense is idempotent, keeps order, never raises times") {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 60; ++iter) {
    Hst t = testsupport::random_hst(rng);
    RequestSet r = testsupport::random_requests(rng, t, {.max_requests = 10, .gappy = true});
    RequestSet c = condense(t, r);
    CHECK(is_condensed(t, c).condensed);
    for (int i = 0; i < r.size(); ++i) {
      CHECK(c.time(i) <= r.time(i) + 1e-12);
      CHECK(c.time(i) >= -1e-12);
      for (int j = 0; j < r.size(); ++j) {
        // pairwise time differences never grow
        CHECK(std::fabs(c.time(i) - c.time(j)) <= std::fabs(r.time(i) - r.time(j)) + 1e-9);
        if (r.time(i) < r.time(j)) CHECK(c.time(i) <= c.time(j) + 1e-12);
      }
    }
    RequestSet cc = condense(t, c);
    for (int i = 0; i < c.size(); ++i) CHECK(cc.time(i) == doctest::Approx(c.time(i)));
  }
}

TEST_CASE("workload generators") {
  Hst t = two_leaf_tree();
  SUBCASE("one-shot") {
    auto r = generate_requests(t, WorkloadSpec::parse("oneshot:k=5"), 1);
    CHECK(r.size() == 6);
    for (int i = 1; i < r.size(); ++i) CHECK(r.time(i) == 0.0);
  }
  SUBCASE("explicit passthrough") {
    WorkloadSpec spec;
    spec.kind = WorkloadKind::Explicit;
    spec.explicit_requests = {{1, 2.0}, {0, 1.0}};
    auto r = generate_requests(t, spec, 1);
    REQUIRE(r.size() == 3);
    CHECK(r.leaf(0) == 0);
    CHECK(r.leaf(1) == 1);
    CHECK(r.time(2) == 1.0);
  }
  SUBCASE("poisson replays per seed") {
    auto spec = WorkloadSpec::parse("poisson:lambda=1,horizon=10");
    auto a = generate_requests(t, spec, 77);
    auto b = generate_requests(t, spec, 77);
    REQUIRE(a.size() == b.size());
    for (int i = 0; i < a.size(); ++i) {
      CHECK(a.leaf(i) == b.leaf(i));
      CHECK(a.time(i) == b.time(i));
    }
    CHECK(a.serialize() == b.serialize());
  }
  SUBCASE("bursts stay sorted and non-negative") {
    auto r = generate_requests(t, WorkloadSpec::parse("bursts:k=9,bursts=3"), 5);
    for (int i = 2; i < r.size(); ++i) CHECK(r.time(i) >= r.time(i - 1));
  }
  SUBCASE("unknown model rejected") {
    CHECK_THROWS_AS(WorkloadSpec::parse("zipf:k=3"), std::invalid_argument);
  }
}

TEST_CASE("request file round-trip") {
  RequestSet r = RequestSet::from_requests(3, {{0, 0.25}, {2, 1.5}});
  RequestSet back = RequestSet::parse(r.serialize());
  CHECK(back.serialize() == r.serialize());
  CHECK(back.leaf(0) == 3);
  CHECK(back.size() == 3);
  CHECK_THROWS_AS(RequestSet::parse("0 1.0\n"), std::invalid_argument);  // no dummy header
  auto parsed = RequestSet::parse("# comment\ndummy 1\n0 0.5 # trailing\n");
  CHECK(parsed.size() == 2);
}

TEST_CASE("negative times are rejected") {
  CHECK_THROWS_AS(RequestSet::from_requests(0, {{0, -1.0}}), std::invalid_argument);
}
