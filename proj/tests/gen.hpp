#pragma once

// Hand-rolled random generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "iterfunc/grid_function.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t count(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Sorted, strictly increasing knots on [lo, hi] with both ends included.
inline std::vector<double> knots(Rng& rng, double lo, double hi, std::size_t n) {
  std::vector<double> k{lo, hi};
  while (k.size() < n) k.push_back(uniform(rng, lo, hi));
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

/// Random piecewise-linear map of I onto itself with slopes inside [delta, M].
/// Slopes are 1 + t c_i with mean-zero c_i, so both endpoints stay fixed.
inline iterfunc::GridFunction member(Rng& rng, iterfunc::Interval I, double delta, double M, std::size_t n) {
  const auto x = knots(rng, I.lo, I.hi, n);
  std::vector<double> c(x.size() - 1);
  double mean = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = uniform(rng, -1.0, 1.0);
    mean += c[i] * (x[i + 1] - x[i]);
  }
  mean /= I.length();
  double lo = 0.0, hi = 0.0;
  for (double& v : c) {
    v -= mean;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double t = 1.0;
  if (lo < 0.0) t = std::min(t, (1.0 - delta) / -lo);
  if (hi > 0.0) t = std::min(t, (M - 1.0) / hi);
  t *= 0.95;
  std::vector<double> v{I.lo};
  for (std::size_t i = 0; i < c.size(); ++i) v.push_back(v.back() + (1.0 + t * c[i]) * (x[i + 1] - x[i]));
  v.back() = I.hi;
  return iterfunc::GridFunction(x, v, iterfunc::Extension::ClampToEndpointValues, true);
}

/// Random strictly increasing piecewise-linear function on [lo, hi] (no fixed points imposed).
inline iterfunc::GridFunction increasing(Rng& rng, double lo, double hi, std::size_t n) {
  const auto x = knots(rng, lo, hi, n);
  std::vector<double> v{uniform(rng, -2.0, 2.0)};
  for (std::size_t i = 1; i < x.size(); ++i) v.push_back(v.back() + uniform(rng, 0.1, 3.0) * (x[i] - x[i - 1]));
  return iterfunc::GridFunction(x, v, iterfunc::Extension::ClampToEndpointValues, true);
}

}  // namespace gen
