#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arrowhst {

class Hst;

// A timed queueing request: issued at a level-0 leaf (by leaf index) at time t.
// Index 0 of every RequestSet is the dummy (v0, 0) that seeds the queue tail.
struct Request {
  int leaf = 0;
  double time = 0.0;
};

class RequestSet {
 public:
  RequestSet() = default;

  static RequestSet with_dummy(int dummy_leaf);
  // prepends the dummy at dummy_leaf, time 0
  static RequestSet from_requests(int dummy_leaf, std::vector<Request> others);
  // takes the full list as-is; element 0 must have time 0
  static RequestSet from_full_list(std::vector<Request> all);

  int size() const { return static_cast<int>(reqs_.size()); }
  const Request& at(int i) const { return reqs_[i]; }
  const std::vector<Request>& all() const { return reqs_; }
  double time(int i) const { return reqs_[i].time; }
  int leaf(int i) const { return reqs_[i].leaf; }
  int max_leaf() const;

  void set_time(int i, double t) { reqs_[i].time = t; }
  void set_leaf(int i, int leaf) { reqs_[i].leaf = leaf; }

  // Text format: header "dummy <leaf>", then one "leaf time" line per
  // non-dummy request. '#' comments allowed.
  std::string serialize() const;
  static RequestSet parse(const std::string& text);
  static RequestSet load(const std::string& path);

 private:
  std::vector<Request> reqs_;
};

// Manhattan cost d_T(v_a, v_b) + |t_a - t_b| between requests a and b.
double manhattan_cost(const Hst& t, const RequestSet& r, int a, int b);

struct CondenseWitness {
  bool condensed = true;
  int i = -1;  // violating time-consecutive pair (request indices), set when !condensed
  int j = -1;
};

// tol absorbs float residue from repeated shifts; a gap counts as open only
// when its slack exceeds tol
CondenseWitness is_condensed(const Hst& t, const RequestSet& r, double tol = 1e-9);

// Closes every positive time gap between time-consecutive requests by
// shifting all later requests down; the result passes is_condensed and has
// the same relative time order.
RequestSet condense(const Hst& t, const RequestSet& r, double tol = 1e-9);

enum class WorkloadKind { OneShot, Poisson, Bursts, Explicit };

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::OneShot;
  int count = 8;             // one-shot k, bursts: total requests
  double rate = 1.0;         // poisson arrival rate
  double horizon = 16.0;     // poisson horizon
  int burst_count = 3;       // bursts: number of bursts
  int burst_spread = 2;      // bursts: leaves per burst cluster
  double burst_width = 1.0;  // bursts: time width of one burst
  double burst_gap = 8.0;    // bursts: time gap between bursts
  std::vector<Request> explicit_requests;
  int dummy_leaf = 0;

  // "oneshot:k=8", "poisson:lambda=1,horizon=16", "bursts:k=12,bursts=3,...",
  // "explicit" (requests supplied separately)
  static WorkloadSpec parse(const std::string& text);
  std::string describe() const;
};

// Draws a workload over leaf indices [0, leaf_count). Only the leaf count of
// the target tree is consulted, never its topology, so the request sequence
// is independent of the tree construction's randomness.
RequestSet generate_requests(int leaf_count, const WorkloadSpec& spec, uint64_t seed);
RequestSet generate_requests(const Hst& t, const WorkloadSpec& spec, uint64_t seed);

}  // namespace arrowhst
