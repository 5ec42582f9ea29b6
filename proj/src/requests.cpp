#include "arrowhst/requests.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "arrowhst/hst.hpp"
#include "arrowhst/util.hpp"

namespace arrowhst {

RequestSet RequestSet::with_dummy(int dummy_leaf) {
  RequestSet r;
  r.reqs_.push_back({dummy_leaf, 0.0});
  return r;
}

RequestSet RequestSet::from_requests(int dummy_leaf, std::vector<Request> others) {
  RequestSet r = with_dummy(dummy_leaf);
  for (const auto& q : others) {
    if (q.time < 0.0) throw std::invalid_argument("requests: negative issue time");
    r.reqs_.push_back(q);
  }
  return r;
}

RequestSet RequestSet::from_full_list(std::vector<Request> all) {
  if (all.empty()) throw std::invalid_argument("requests: empty set (dummy required)");
  if (all[0].time != 0.0) throw std::invalid_argument("requests: dummy must have time 0");
  RequestSet r;
  r.reqs_ = std::move(all);
  for (const auto& q : r.reqs_)
    if (q.time < 0.0) throw std::invalid_argument("requests: negative issue time");
  return r;
}

int RequestSet::max_leaf() const {
  int m = 0;
  for (const auto& q : reqs_) m = std::max(m, q.leaf);
  return m;
}

std::string RequestSet::serialize() const {
  std::ostringstream out;
  out << "dummy " << reqs_[0].leaf << '\n';
  for (size_t i = 1; i < reqs_.size(); ++i)
    out << reqs_[i].leaf << ' ' << format_double(reqs_[i].time) << '\n';
  return out.str();
}

RequestSet RequestSet::parse(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  std::vector<Request> others;
  int dummy_leaf = -1;
  while (std::getline(lines, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "dummy") {
      if (dummy_leaf >= 0) throw std::invalid_argument("requests: duplicate dummy header");
      if (!(ls >> dummy_leaf)) throw std::invalid_argument("requests: bad dummy header");
      continue;
    }
    Request q;
    try {
      q.leaf = std::stoi(first);
    } catch (const std::exception&) {
      throw std::invalid_argument("requests: bad leaf id '" + first + "'");
    }
    if (!(ls >> q.time)) throw std::invalid_argument("requests: missing time");
    others.push_back(q);
  }
  if (dummy_leaf < 0) throw std::invalid_argument("requests: missing 'dummy <leaf>' header");
  return from_requests(dummy_leaf, std::move(others));
}

RequestSet RequestSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("requests: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

double manhattan_cost(const Hst& t, const RequestSet& r, int a, int b) {
  return t.request_distance(r, a, b) + std::fabs(r.time(a) - r.time(b));
}

namespace {

// request indices sorted by (time, index)
std::vector<int> time_order(const RequestSet& r) {
  std::vector<int> idx(r.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return r.time(a) < r.time(b); });
  return idx;
}

// smallest t_b - t_a - d(v_a, v_b) over t_a <= ti, t_b >= tj
double smallest_gap_slack(const Hst& t, const RequestSet& r, double ti, double tj) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < r.size(); ++a) {
    if (r.time(a) > ti) continue;
    for (int b = 0; b < r.size(); ++b) {
      if (r.time(b) < tj) continue;
      best = std::min(best, r.time(b) - r.time(a) - t.request_distance(r, a, b));
    }
  }
  return best;
}

}  // namespace

CondenseWitness is_condensed(const Hst& t, const RequestSet& r, double tol) {
  auto order = time_order(r);
  for (size_t k = 0; k + 1 < order.size(); ++k) {
    int i = order[k], j = order[k + 1];
    if (r.time(j) <= r.time(i)) continue;  // ties are not gaps
    if (smallest_gap_slack(t, r, r.time(i), r.time(j)) > tol) return {false, i, j};
  }
  return {true, -1, -1};
}

RequestSet condense(const Hst& t, const RequestSet& r, double tol) {
  RequestSet out = r;
  auto order = time_order(out);
  for (size_t k = 0; k + 1 < order.size(); ++k) {
    int i = order[k], j = order[k + 1];
    double ti = out.time(i), tj = out.time(j);
    if (tj <= ti) continue;
    double slack = smallest_gap_slack(t, out, ti, tj);
    if (slack > tol) {
      for (int q = 0; q < out.size(); ++q)
        if (out.time(q) >= tj) out.set_time(q, out.time(q) - slack);
    }
  }
  return out;
}

WorkloadSpec WorkloadSpec::parse(const std::string& text) {
  WorkloadSpec spec;
  std::string head = text, args;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    head = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  if (head == "oneshot")
    spec.kind = WorkloadKind::OneShot;
  else if (head == "poisson")
    spec.kind = WorkloadKind::Poisson;
  else if (head == "bursts")
    spec.kind = WorkloadKind::Bursts;
  else if (head == "explicit")
    spec.kind = WorkloadKind::Explicit;
  else
    throw std::invalid_argument("workload: unknown model '" + head + "'");
  std::istringstream as(args);
  std::string kv;
  while (std::getline(as, kv, ',')) {
    if (kv.empty()) continue;
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("workload: bad option '" + kv + "'");
    std::string key = kv.substr(0, eq);
    double val = std::strtod(kv.c_str() + eq + 1, nullptr);
    if (key == "k")
      spec.count = static_cast<int>(val);
    else if (key == "lambda")
      spec.rate = val;
    else if (key == "horizon")
      spec.horizon = val;
    else if (key == "bursts")
      spec.burst_count = static_cast<int>(val);
    else if (key == "spread")
      spec.burst_spread = static_cast<int>(val);
    else if (key == "width")
      spec.burst_width = val;
    else if (key == "gap")
      spec.burst_gap = val;
    else if (key == "dummy")
      spec.dummy_leaf = static_cast<int>(val);
    else
      throw std::invalid_argument("workload: unknown option '" + key + "'");
  }
  return spec;
}

std::string WorkloadSpec::describe() const {
  std::ostringstream out;
  switch (kind) {
    case WorkloadKind::OneShot:
      out << "oneshot:k=" << count;
      break;
    case WorkloadKind::Poisson:
      out << "poisson:lambda=" << format_double(rate) << ",horizon=" << format_double(horizon);
      break;
    case WorkloadKind::Bursts:
      out << "bursts:k=" << count << ",bursts=" << burst_count << ",spread=" << burst_spread
          << ",width=" << format_double(burst_width) << ",gap=" << format_double(burst_gap);
      break;
    case WorkloadKind::Explicit:
      out << "explicit:k=" << explicit_requests.size();
      break;
  }
  if (dummy_leaf != 0) out << ",dummy=" << dummy_leaf;
  return out.str();
}

// Issue times snap to multiples of 2^-16. Tree distances are even integers,
// so condensing shifts and synchronous arrival sums stay exact in doubles and
// the ties the condensing transformation creates stay exact ties.
static double snap_time(double t) { return std::ldexp(std::round(std::ldexp(t, 16)), -16); }

RequestSet generate_requests(int leaf_count, const WorkloadSpec& spec, uint64_t seed) {
  if (leaf_count <= 0) throw std::invalid_argument("workload: no leaves");
  if (spec.dummy_leaf < 0 || spec.dummy_leaf >= leaf_count)
    throw std::invalid_argument("workload: dummy leaf out of range");
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_int_distribution<int> leaf_dist(0, leaf_count - 1);
  std::vector<Request> reqs;
  switch (spec.kind) {
    case WorkloadKind::OneShot: {
      for (int i = 0; i < spec.count; ++i) reqs.push_back({leaf_dist(rng), 0.0});
      break;
    }
    case WorkloadKind::Poisson: {
      std::exponential_distribution<double> gap(spec.rate);
      double now = 0.0;
      while (true) {
        now += gap(rng);
        if (now > spec.horizon) break;
        reqs.push_back({leaf_dist(rng), snap_time(now)});
      }
      break;
    }
    case WorkloadKind::Bursts: {
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      int bursts = std::max(1, spec.burst_count);
      int per = std::max(1, spec.count / bursts);
      double start = 0.0;
      for (int bi = 0; bi < bursts; ++bi) {
        std::vector<int> cluster;
        for (int s = 0; s < std::max(1, spec.burst_spread); ++s) cluster.push_back(leaf_dist(rng));
        for (int q = 0; q < per; ++q) {
          int leaf = cluster[static_cast<size_t>(uni(rng) * cluster.size()) % cluster.size()];
          reqs.push_back({leaf, snap_time(start + uni(rng) * spec.burst_width)});
        }
        start += spec.burst_width + spec.burst_gap * (0.5 + uni(rng));
      }
      std::sort(reqs.begin(), reqs.end(),
                [](const Request& a, const Request& b) { return a.time < b.time; });
      break;
    }
    case WorkloadKind::Explicit: {
      reqs = spec.explicit_requests;
      for (const auto& q : reqs)
        if (q.leaf < 0 || q.leaf >= leaf_count)
          throw std::invalid_argument("workload: explicit request at unknown leaf");
      break;
    }
  }
  return RequestSet::from_requests(spec.dummy_leaf, std::move(reqs));
}

RequestSet generate_requests(const Hst& t, const WorkloadSpec& spec, uint64_t seed) {
  return generate_requests(t.leaf_count(), spec, seed);
}

}  // namespace arrowhst
