#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <string>
#include <string_view>

namespace arrowhst {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent seed stream from a master seed. Streams for
// different purposes (workload, tree, scheduler) never overlap, which is
// what keeps the request sequence independent of the tree's coins.
inline uint64_t derive_seed(uint64_t master, uint64_t stream, std::string_view purpose) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ h) + stream);
}

// Stable shortest-round-trip formatting for doubles (report/serialization).
inline std::string format_double(double v) {
  char best[40];
  std::snprintf(best, sizeof(best), "%.17g", v);
  for (int prec = 1; prec <= 17; ++prec) {
    char cand[40];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    if (std::strtod(cand, nullptr) == v && std::strlen(cand) < std::strlen(best))
      std::snprintf(best, sizeof(best), "%s", cand);
  }
  return best;
}

// a <= b up to a mixed absolute/relative tolerance
inline bool approx_le(double a, double b, double tol = 1e-9) {
  return a <= b + tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool approx_eq(double a, double b, double tol = 1e-9) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

struct Fnv1a {
  uint64_t h = 0xcbf29ce484222325ULL;
  void add(std::string_view s) {
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  void add(uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  void add(double d) {
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    __builtin_memcpy(&bits, &d, sizeof(bits));
    add(bits);
  }
  std::string hex() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

}  // namespace arrowhst
