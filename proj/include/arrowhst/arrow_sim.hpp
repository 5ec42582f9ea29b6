#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arrowhst/hst.hpp"
#include "arrowhst/requests.hpp"

namespace arrowhst {

enum class MsgKind { Real, Virtual };

enum class TraceAction { Issue, Receive, Forward, Enqueue };

struct TraceEvent {
  double time = 0.0;
  int node = -1;
  int request = -1;
  MsgKind kind = MsgKind::Real;
  TraceAction action = TraceAction::Issue;
  int peer = -1;  // forward target / enqueue predecessor
};

struct ExecutionTrace {
  std::vector<int> order;        // position -> request, order[0] = 0
  std::vector<int> position;     // request -> position
  std::vector<int> predecessor;  // request -> request (-1 for the dummy)
  // arrival of the find-predecessor message at the predecessor's node
  // (issue time for a local enqueue; 0 for the dummy)
  std::vector<double> enqueue_time;
  std::vector<std::vector<int>> path;          // request -> nodes, own leaf first
  std::vector<std::vector<double>> path_time;  // matching arrival times
  std::vector<TraceEvent> events;
  std::string scheduler;
  uint64_t seed = 0;

  int size() const { return static_cast<int>(order.size()); }
};

// Per-hop delay policies. All of them keep delays within (0, w(e)].
struct DelayPolicy {
  enum class Kind { Sync, Scaled, Uniform, AdversarialLatest };
  Kind kind = Kind::Sync;
  double scale = 1.0;    // scaled: delay = scale * w
  double lo = 0.5;       // uniform: delay in [lo, hi] * w
  double hi = 1.0;
  double epsilon = 1.0 / 16.0;  // adversarial: late-half messages get epsilon * w

  static DelayPolicy sync() { return {}; }
  static DelayPolicy scaled(double f);
  static DelayPolicy uniform(double lo, double hi);
  static DelayPolicy adversarial_latest(double eps = 1.0 / 16.0);
  // "sync", "scaled:0.5", "uniform:0.25,1", "adversarial:0.0625"
  static DelayPolicy parse(const std::string& text);
  std::string describe() const;
};

ExecutionTrace run_sync(const Hst& t, const RequestSet& r);
ExecutionTrace run_async(const Hst& t, const RequestSet& r, const DelayPolicy& policy,
                         uint64_t seed);

// Arrival delay of each request's find-predecessor message at every node,
// extended beyond the real path as a broadcast over untraveled edges at full
// edge delay. at(q, u) <= d_T(v_q, u) always; equality on untraveled edges.
class DeltaProfile {
 public:
  DeltaProfile(int requests, int nodes) : nodes_(nodes), d_(static_cast<size_t>(requests) * nodes) {}
  double at(int request, int node) const { return d_[static_cast<size_t>(request) * nodes_ + node]; }
  double& at(int request, int node) { return d_[static_cast<size_t>(request) * nodes_ + node]; }

 private:
  int nodes_;
  std::vector<double> d_;
};

DeltaProfile delta_profile(const ExecutionTrace& trace, const Hst& t, const RequestSet& r);

struct LatencyBreakdown {
  std::vector<double> per_position;  // latency of ordering position i (i >= 1); [0] = 0
  double total = 0.0;
};

// L(i) = max{enqueue_time(i), t(pi(i-1))} - t(pi(i)), summed over positions.
LatencyBreakdown latency_costs(const ExecutionTrace& trace, const RequestSet& r);

// One event per line: time node request kind action [peer].
std::string dump_trace(const ExecutionTrace& trace);

}  // namespace arrowhst
