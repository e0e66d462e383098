#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

// Shared numeric helpers: extended-real arithmetic in the log domain,
// deterministic grids, and bracketed 1-D optimization. Everything here is
// a pure function.

namespace jscc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(sum(exp(a_i))) tolerating -inf entries; returns -inf for an empty or
// all -inf input.
inline double log_sum_exp(std::span<const double> a) {
  double m = -kInf;
  for (double v : a) m = std::max(m, v);
  if (m == -kInf) return -kInf;
  if (m == kInf) return kInf;
  double s = 0.0;
  for (double v : a) {
    if (v == -kInf) continue;
    s += std::exp(v - m);
  }
  return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& a) {
  return log_sum_exp(std::span<const double>(a));
}

// x*log(y) with the 0*log(0) = 0 convention (weight exactly zero wins).
inline double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(y);
}

inline std::vector<double> lin_space(double lo, double hi, int n) {
  std::vector<double> g(static_cast<size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < n; ++i)
    g[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  g.back() = hi;
  return g;
}

// Log-spaced grid on [lo, hi], lo > 0; endpoints exact.
inline std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> g(static_cast<size_t>(n));
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[static_cast<size_t>(i)] =
        std::exp(llo + (lhi - llo) * static_cast<double>(i) / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct Bracket1D {
  double arg = 0.0;
  double value = -kInf;
};

// Golden-section maximization of a unimodal f on [lo, hi].
template <typename F>
Bracket1D golden_max(F&& f, double lo, double hi, double tol_x = 1e-12,
                     int max_iter = 200) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol_x * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  Bracket1D r;
  r.arg = 0.5 * (a + b);
  r.value = f(r.arg);
  if (fc > r.value) {
    r.arg = c;
    r.value = fc;
  }
  if (fd > r.value) {
    r.arg = d;
    r.value = fd;
  }
  return r;
}

// Bisection for a root of a nonincreasing function g on [lo, hi].
// Assumes g(lo) >= 0 >= g(hi); returns the midpoint of the final bracket.
template <typename G>
double bisect_decreasing(G&& g, double lo, double hi, double tol,
                         int max_iter = 200) {
  double a = lo, b = hi;
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    double m = 0.5 * (a + b);
    if (g(m) >= 0.0)
      a = m;
    else
      b = m;
  }
  return 0.5 * (a + b);
}

enum class RayFlag : uint8_t { kInterior = 0, kLeftEdge = 1, kTruncated = 2 };

struct RaySup {
  double value = -kInf;
  double arg = 0.0;
  RayFlag flag = RayFlag::kInterior;
  double resolution = 0.0;  // width of the final bracket around the argmax
};

// Maximize f on the ray [lo, inf): log-spaced grid on [lo, hi], golden-section
// refinement around the best grid point, and adaptive extension (up to cap)
// while the maximum sits on the right edge. Truncation at the cap is flagged,
// never silent.
template <typename F>
RaySup ray_max(F&& f, double lo, double hi, double cap, int points) {
  std::vector<double> grid;
  if (lo < 1e-4) {
    grid.push_back(lo);
    const auto tail = log_space(1e-4, hi, points - 1);
    grid.insert(grid.end(), tail.begin(), tail.end());
  } else {
    grid = log_space(lo, hi, points);
  }
  std::vector<double> vals(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);

  size_t best = 0;
  for (;;) {
    best = 0;
    for (size_t i = 1; i < grid.size(); ++i)
      if (vals[i] > vals[best]) best = i;
    if (best + 1 < grid.size() || grid.back() >= cap * 0.999) break;
    const double old_hi = grid.back();
    const double new_hi = std::min(cap, old_hi * 16.0);
    const auto ext = log_space(old_hi * 1.3, new_hi, 8);
    for (double x : ext) {
      grid.push_back(x);
      vals.push_back(f(x));
    }
  }

  const size_t n = grid.size();
  const double a = grid[best > 0 ? best - 1 : 0];
  const double b = grid[best + 1 < n ? best + 1 : n - 1];
  RaySup out;
  out.value = vals[best];
  out.arg = grid[best];
  if (b > a) {
    const Bracket1D r = golden_max(f, a, b);
    if (r.value > out.value) {
      out.value = r.value;
      out.arg = r.arg;
    }
  }
  out.resolution = b - a;
  if (best + 1 == n && grid.back() >= cap * 0.999)
    out.flag = RayFlag::kTruncated;
  else if (out.arg <= lo + 1e-12 * (1.0 + std::abs(lo)))
    out.flag = RayFlag::kLeftEdge;
  else
    out.flag = RayFlag::kInterior;
  return out;
}

// SplitMix64-style counter PRNG: a pure function of (key, counter), so any
// partition of work across threads reproduces the same stream.
struct CounterRng {
  uint64_t key = 0;
  uint64_t counter = 0;

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static CounterRng keyed(uint64_t seed, uint64_t stream) {
    CounterRng r;
    r.key = mix(seed ^ mix(stream));
    return r;
  }

  uint64_t next_u64() { return mix(key ^ mix(counter++)); }

  // Uniform in [0, n) by rejection (exactly uniform).
  uint64_t next_below(uint64_t n) {
    const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = next_u64();
    while (v >= lim) v = next_u64();
    return v % n;
  }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
};

}  // namespace jscc
