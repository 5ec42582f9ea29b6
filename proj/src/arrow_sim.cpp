#include "arrowhst/arrow_sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "arrowhst/util.hpp"

namespace arrowhst {

DelayPolicy DelayPolicy::scaled(double f) {
  if (f <= 0.0 || f > 1.0) throw std::invalid_argument("delay: scale must be in (0, 1]");
  DelayPolicy p;
  p.kind = Kind::Scaled;
  p.scale = f;
  return p;
}

DelayPolicy DelayPolicy::uniform(double lo, double hi) {
  if (lo <= 0.0 || hi > 1.0 || lo > hi)
    throw std::invalid_argument("delay: uniform bounds must satisfy 0 < lo <= hi <= 1");
  DelayPolicy p;
  p.kind = Kind::Uniform;
  p.lo = lo;
  p.hi = hi;
  return p;
}

DelayPolicy DelayPolicy::adversarial_latest(double eps) {
  if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("delay: epsilon must be in (0, 1]");
  DelayPolicy p;
  p.kind = Kind::AdversarialLatest;
  p.epsilon = eps;
  return p;
}

DelayPolicy DelayPolicy::parse(const std::string& text) {
  std::string head = text, args;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    head = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  auto nums = [&]() {
    std::vector<double> vals;
    std::istringstream as(args);
    std::string tok;
    while (std::getline(as, tok, ',')) vals.push_back(std::strtod(tok.c_str(), nullptr));
    return vals;
  };
  if (head == "sync") return sync();
  if (head == "scaled") {
    auto v = nums();
    return scaled(v.empty() ? 0.5 : v[0]);
  }
  if (head == "uniform") {
    auto v = nums();
    if (v.size() == 2) return uniform(v[0], v[1]);
    return uniform(0.25, 1.0);
  }
  if (head == "adversarial") {
    auto v = nums();
    return adversarial_latest(v.empty() ? 1.0 / 16.0 : v[0]);
  }
  throw std::invalid_argument("delay: unknown policy '" + head + "'");
}

std::string DelayPolicy::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Sync:
      out << "sync";
      break;
    case Kind::Scaled:
      out << "scaled:" << format_double(scale);
      break;
    case Kind::Uniform:
      out << "uniform:" << format_double(lo) << ',' << format_double(hi);
      break;
    case Kind::AdversarialLatest:
      out << "adversarial:" << format_double(epsilon);
      break;
  }
  return out.str();
}

namespace {

struct Event {
  double time = 0.0;
  double issue_time = 0.0;  // issue time of the request the event belongs to
  uint64_t seq = 0;         // creation order; issues get their request index
  bool is_message = false;
  int request = -1;
  int node = -1;  // where the event happens
  int from = -1;  // sender for messages
};

// Ties at equal event time go to the earlier-issued request: the condensing
// transformation lines requests up exactly, and the order is preserved only
// when simultaneous messages are served in issue order. Creation sequence
// numbers make the order total.
struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.issue_time != b.issue_time) return a.issue_time > b.issue_time;
    return a.seq > b.seq;
  }
};

class Engine {
 public:
  Engine(const Hst& t, const RequestSet& r, const DelayPolicy& policy, uint64_t seed)
      : t_(t), r_(r), policy_(policy), rng_(splitmix64(seed ^ 0x41525257ULL)) {
    if (r_.size() < 1) throw std::invalid_argument("arrow: empty request set");
    for (int i = 0; i < r_.size(); ++i)
      if (r_.leaf(i) < 0 || r_.leaf(i) >= t_.leaf_count())
        throw std::invalid_argument("arrow: request at unknown leaf");
    if (policy_.kind == DelayPolicy::Kind::AdversarialLatest) median_time_ = median_issue_time();
  }

  ExecutionTrace run(const std::string& scheduler, uint64_t seed) {
    const int n = t_.node_count();
    const int m = r_.size();
    arrow_.assign(n, -1);
    last_request_.assign(n, -1);
    init_arrows();

    tr_ = ExecutionTrace{};
    tr_.scheduler = scheduler;
    tr_.seed = seed;
    tr_.order.assign(1, 0);
    tr_.position.assign(m, -1);
    tr_.position[0] = 0;
    tr_.predecessor.assign(m, -1);
    tr_.enqueue_time.assign(m, 0.0);
    tr_.path.assign(m, {});
    tr_.path_time.assign(m, {});
    tr_.path[0] = {t_.leaf_node(r_.leaf(0))};
    tr_.path_time[0] = {0.0};

    seq_ = static_cast<uint64_t>(m);
    for (int q = 1; q < m; ++q) {
      Event e;
      e.time = r_.time(q);
      e.issue_time = r_.time(q);
      e.seq = static_cast<uint64_t>(q);
      e.is_message = false;
      e.request = q;
      e.node = t_.leaf_node(r_.leaf(q));
      queue_.push(e);
    }

    successor_.assign(m, -1);
    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      if (e.is_message)
        handle_message(e);
      else
        handle_issue(e);
    }
    // the queueing order is the predecessor chain, not the chronological
    // order of the enqueue events (a request can be appended behind its
    // predecessor before that predecessor reaches the previous tail)
    tr_.order.assign(1, 0);
    for (int q = successor_[0]; q >= 0; q = successor_[q]) tr_.order.push_back(q);
    if (static_cast<int>(tr_.order.size()) != m)
      throw std::logic_error("arrow: the predecessor chain does not cover every request");
    for (int pos = 0; pos < m; ++pos) tr_.position[tr_.order[pos]] = pos;
    return std::move(tr_);
  }

 private:
  void init_arrows() {
    // quiescent state: everything points toward the dummy's leaf
    int tail = t_.leaf_node(r_.leaf(0));
    arrow_[tail] = tail;
    last_request_[tail] = 0;
    std::vector<int> stack{tail};
    std::vector<char> seen(t_.node_count(), 0);
    seen[tail] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      auto touch = [&](int v) {
        if (v >= 0 && !seen[v]) {
          seen[v] = 1;
          arrow_[v] = u;
          stack.push_back(v);
        }
      };
      touch(t_.node(u).parent);
      for (int c : t_.node(u).children) touch(c);
    }
  }

  double median_issue_time() const {
    std::vector<double> times;
    for (int q = 0; q < r_.size(); ++q) times.push_back(r_.time(q));
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  }

  double edge_weight(int child_side, int parent_side) const {
    const auto& a = t_.node(child_side);
    return a.parent == parent_side ? a.up_len : t_.node(parent_side).up_len;
  }

  double hop_delay(int request, int from, int to) {
    double w = edge_weight(from, to);
    if (w == 0.0) return 0.0;
    switch (policy_.kind) {
      case DelayPolicy::Kind::Sync:
        return w;
      case DelayPolicy::Kind::Scaled:
        return policy_.scale * w;
      case DelayPolicy::Kind::Uniform: {
        std::uniform_real_distribution<double> d(policy_.lo, policy_.hi);
        return d(rng_) * w;
      }
      case DelayPolicy::Kind::AdversarialLatest:
        return r_.time(request) <= median_time_ ? w : policy_.epsilon * w;
    }
    return w;
  }

  void send(int request, int from, int to, double now) {
    Event e;
    e.time = now + hop_delay(request, from, to);
    e.issue_time = r_.time(request);
    e.seq = seq_++;
    e.is_message = true;
    e.request = request;
    e.node = to;
    e.from = from;
    queue_.push(e);
    tr_.events.push_back({now, from, request, MsgKind::Real, TraceAction::Forward, to});
  }

  void enqueue(int request, int pred, double now, int node) {
    if (pred < 0 || successor_[pred] >= 0)
      throw std::logic_error("arrow: predecessor already taken");
    successor_[pred] = request;
    tr_.predecessor[request] = pred;
    tr_.enqueue_time[request] = now;
    tr_.events.push_back({now, node, request, MsgKind::Real, TraceAction::Enqueue, pred});
  }

  void handle_issue(const Event& e) {
    int v = e.node, q = e.request;
    tr_.events.push_back({e.time, v, q, MsgKind::Real, TraceAction::Issue, -1});
    tr_.path[q] = {v};
    tr_.path_time[q] = {e.time};
    if (arrow_[v] == v) {
      enqueue(q, last_request_[v], e.time, v);
      last_request_[v] = q;
    } else {
      int u = arrow_[v];
      arrow_[v] = v;
      last_request_[v] = q;
      send(q, v, u, e.time);
    }
  }

  void handle_message(const Event& e) {
    int u = e.node, q = e.request, w = e.from;
    tr_.events.push_back({e.time, u, q, MsgKind::Real, TraceAction::Receive, w});
    tr_.path[q].push_back(u);
    tr_.path_time[q].push_back(e.time);
    if (arrow_[u] == u) {
      enqueue(q, last_request_[u], e.time, u);
      arrow_[u] = w;
    } else {
      int x = arrow_[u];
      arrow_[u] = w;
      send(q, u, x, e.time);
    }
  }

  const Hst& t_;
  const RequestSet& r_;
  DelayPolicy policy_;
  std::mt19937_64 rng_;
  double median_time_ = 0.0;
  std::vector<int> arrow_;
  std::vector<int> last_request_;
  std::vector<int> successor_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  uint64_t seq_ = 0;
  ExecutionTrace tr_;
};

}  // namespace

ExecutionTrace run_sync(const Hst& t, const RequestSet& r) {
  Engine eng(t, r, DelayPolicy::sync(), 0);
  return eng.run("sync", 0);
}

ExecutionTrace run_async(const Hst& t, const RequestSet& r, const DelayPolicy& policy,
                         uint64_t seed) {
  Engine eng(t, r, policy, seed);
  return eng.run(policy.describe(), seed);
}

DeltaProfile delta_profile(const ExecutionTrace& trace, const Hst& t, const RequestSet& r) {
  if (trace.path.empty() || static_cast<int>(trace.path.size()) != r.size())
    throw std::invalid_argument("delta: trace instrumentation missing");
  const int n = t.node_count();
  DeltaProfile prof(r.size(), n);
  std::vector<int> hop_to(n, -1);          // node -> next node on the real path
  std::vector<double> real_delay(n, 0.0);  // node -> recorded arrival delay
  for (int q = 0; q < r.size(); ++q) {
    const auto& path = trace.path[q];
    const auto& times = trace.path_time[q];
    double t0 = r.time(q);
    for (size_t k = 0; k < path.size(); ++k) {
      hop_to[path[k]] = k + 1 < path.size() ? path[k + 1] : -2;
      real_delay[path[k]] = times[k] - t0;
    }
    // outward sweep from the request's node: traveled edges keep their real
    // delays, untraveled edges continue with the full edge length
    int start = path[0];
    std::vector<int> stack{start};
    std::vector<char> seen(n, 0);
    seen[start] = 1;
    prof.at(q, start) = 0.0;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      auto relax = [&](int b, double w) {
        if (b < 0 || seen[b]) return;
        seen[b] = 1;
        prof.at(q, b) = hop_to[a] == b ? real_delay[b] : prof.at(q, a) + w;
        stack.push_back(b);
      };
      const auto& node = t.node(a);
      relax(node.parent, node.up_len);
      for (int c : node.children) relax(c, t.node(c).up_len);
    }
    for (size_t k = 0; k < path.size(); ++k) hop_to[path[k]] = -1;
  }
  return prof;
}

LatencyBreakdown latency_costs(const ExecutionTrace& trace, const RequestSet& r) {
  LatencyBreakdown out;
  out.per_position.assign(trace.size(), 0.0);
  for (int i = 1; i < trace.size(); ++i) {
    int q = trace.order[i];
    int p = trace.order[i - 1];
    double L = std::max(trace.enqueue_time[q], r.time(p)) - r.time(q);
    out.per_position[i] = L;
    out.total += L;
  }
  return out;
}

std::string dump_trace(const ExecutionTrace& trace) {
  std::ostringstream out;
  auto action_name = [](TraceAction a) {
    switch (a) {
      case TraceAction::Issue:
        return "issue";
      case TraceAction::Receive:
        return "recv";
      case TraceAction::Forward:
        return "fwd";
      case TraceAction::Enqueue:
        return "enqueue";
    }
    return "?";
  };
  for (const auto& e : trace.events) {
    out << format_double(e.time) << ' ' << e.node << ' ' << e.request << ' '
        << (e.kind == MsgKind::Real ? "real" : "virtual") << ' ' << action_name(e.action);
    if (e.peer >= 0) out << ' ' << e.peer;
    out << '\n';
  }
  return out.str();
}

}  // namespace arrowhst
