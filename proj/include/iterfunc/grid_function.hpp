#pragma once

// Monotone piecewise-linear functions on a compact core interval, with a
// declared rule for evaluation outside it. Every function the solvers touch
// (unknowns, targets, iterates) is carried by a GridFunction.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "iterfunc/error.hpp"

namespace iterfunc {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// J on the positive half-line and its log image I.
struct IntervalPair {
  Interval I;
  Interval J;

  static IntervalPair from_positive(Interval J) {
    if (!(J.lo > 0.0)) throw Error(ErrorCode::NonPositiveValues, "interval J must lie in (0, inf)");
    return {{std::log(J.lo), std::log(J.hi)}, J};
  }
};

enum class Extension { ClampToEndpointValues, Undefined };

inline constexpr std::size_t kDefaultGridSize = 1025;
inline constexpr std::size_t kDefaultProbeCount = 8193;
inline constexpr double kMonotoneTolerance = 1e-13;

/// Uniformly spaced points on [lo, hi], endpoints exact.
inline std::vector<double> uniform_knots(double lo, double hi, std::size_t count) {
  if (count < 2) throw Error(ErrorCode::InvalidGrid, "a grid needs at least two points");
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

/// Sorted union of two knot sets, collapsing points closer than `merge_tol`
/// relative to the span. Points of `pinned` win over points of `base`.
inline std::vector<double> merge_knots(std::span<const double> base, std::span<const double> pinned,
                                       double merge_tol = 1e-12) {
  std::vector<double> all(base.begin(), base.end());
  all.insert(all.end(), pinned.begin(), pinned.end());
  std::sort(all.begin(), all.end());
  if (all.empty()) return all;
  const double scale = std::max(1.0, std::abs(all.back() - all.front()));
  auto is_pinned = [&](double v) { return std::find(pinned.begin(), pinned.end(), v) != pinned.end(); };
  std::vector<double> out;
  out.reserve(all.size());
  for (double v : all) {
    if (!out.empty() && v - out.back() <= merge_tol * scale) {
      if (is_pinned(v)) out.back() = v;
      continue;
    }
    out.push_back(v);
  }
  return out;
}

/// Keeps the endpoints and an evenly spaced subset so that at most `cap`
/// points remain.
inline std::vector<double> thin_knots(std::vector<double> knots, std::size_t cap) {
  if (cap < 2 || knots.size() <= cap) return knots;
  std::vector<double> out;
  out.reserve(cap);
  const double stride = static_cast<double>(knots.size() - 1) / static_cast<double>(cap - 1);
  for (std::size_t i = 0; i < cap; ++i) {
    const auto idx = static_cast<std::size_t>(std::llround(stride * static_cast<double>(i)));
    out.push_back(knots[std::min(idx, knots.size() - 1)]);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class GridFunction {
 public:
  GridFunction(std::vector<double> knots, std::vector<double> values,
               Extension extension = Extension::ClampToEndpointValues, bool monotone = false)
      : knots_(std::move(knots)), values_(std::move(values)), extension_(extension), monotone_(monotone) {
    if (knots_.size() < 2 || knots_.size() != values_.size())
      throw Error(ErrorCode::InvalidGrid, "need matching knots/values with at least two entries");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
        throw Error(ErrorCode::InvalidGrid, "non-finite knot or value at index " + std::to_string(i));
      if (i > 0 && !(knots_[i] > knots_[i - 1]))
        throw Error(ErrorCode::InvalidGrid, "knots must be strictly increasing (index " + std::to_string(i) + ")");
    }
    if (monotone_ && !values_increasing(values_))
      throw Error(ErrorCode::NotMonotone, "declared monotone but values are not strictly increasing");
  }

  /// Builds a function from samples, detecting monotonicity.
  template <typename Fn>
  static GridFunction sampled(Fn&& fn, std::vector<double> knots,
                              Extension extension = Extension::ClampToEndpointValues) {
    std::vector<double> values(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) values[i] = fn(knots[i]);
    const bool mono = values_increasing(values);
    return GridFunction(std::move(knots), std::move(values), extension, mono);
  }

  static GridFunction identity(double lo, double hi, Extension extension = Extension::ClampToEndpointValues) {
    return GridFunction({lo, hi}, {lo, hi}, extension, true);
  }

  static GridFunction identity_on(std::vector<double> knots, Extension extension = Extension::ClampToEndpointValues) {
    auto values = knots;
    return GridFunction(std::move(knots), std::move(values), extension, true);
  }

  static bool values_increasing(std::span<const double> values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double scale = std::max(1.0, std::abs(values[i]));
      if (!(values[i] - values[i - 1] > -kMonotoneTolerance * scale)) return false;
      if (values[i] == values[i - 1]) return false;
    }
    return true;
  }

  double domain_lo() const { return knots_.front(); }
  double domain_hi() const { return knots_.back(); }
  Interval domain() const { return {domain_lo(), domain_hi()}; }
  Interval value_span() const {
    auto [mn, mx] = std::minmax_element(values_.begin(), values_.end());
    return {*mn, *mx};
  }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  Extension extension() const { return extension_; }
  bool monotone() const { return monotone_; }
  std::size_t size() const { return knots_.size(); }

  double eval(double x) const {
    if (!std::isfinite(x)) throw Error(ErrorCode::OutOfDomain, "non-finite argument");
    if (x <= knots_.front() || x >= knots_.back()) {
      if (x == knots_.front()) return values_.front();
      if (x == knots_.back()) return values_.back();
      if (extension_ == Extension::Undefined)
        throw Error(ErrorCode::OutOfDomain, "x = " + fmt(x) + " outside [" + fmt(domain_lo()) + ", " +
                                                fmt(domain_hi()) + "]");
      return x < knots_.front() ? values_.front() : values_.back();
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    const double t = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return std::fma(t, values_[i + 1], std::fma(-t, values_[i], values_[i]));
  }

  double operator()(double x) const { return eval(x); }

  /// The unique core point mapped to y. Requires a monotone function.
  double inverse_eval(double y) const {
    if (!monotone_) throw Error(ErrorCode::NotMonotone, "inverse of a non-monotone function");
    const double lo = values_.front();
    const double hi = values_.back();
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (!(y >= lo - slack && y <= hi + slack))
      throw Error(ErrorCode::OutOfRange, "y = " + fmt(y) + " outside value span [" + fmt(lo) + ", " + fmt(hi) + "]");
    if (y <= lo) return knots_.front();
    if (y >= hi) return knots_.back();
    const auto it = std::upper_bound(values_.begin(), values_.end(), y);
    const auto i = static_cast<std::size_t>(it - values_.begin()) - 1;
    if (values_[i] == y) return knots_[i];
    const double dv = values_[i + 1] - values_[i];
    if (!(dv > 0.0)) return knots_[i];
    const double t = (y - values_[i]) / dv;
    return std::fma(t, knots_[i + 1], std::fma(-t, knots_[i], knots_[i]));
  }

  /// Exact min and max slope over the core (piecewise-linear, so consecutive
  /// knots suffice).
  std::pair<double, double> lipschitz_bounds() const {
    if (!monotone_) throw Error(ErrorCode::NotMonotone, "Lipschitz bounds requested for a non-monotone function");
    return slope_range();
  }

  /// Min and max segment slope, no monotonicity requirement.
  std::pair<double, double> slope_range() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
      const double s = slope(i);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return {lo, hi};
  }

  double slope(std::size_t segment) const {
    return (values_[segment + 1] - values_[segment]) / (knots_[segment + 1] - knots_[segment]);
  }

  /// Same knots, values mapped through `op`.
  template <typename Op>
  GridFunction map_values(Op&& op, Extension extension) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(values_[i]);
    const bool mono = values_increasing(v);
    return GridFunction(knots_, std::move(v), extension, mono);
  }

  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  Extension extension_;
  bool monotone_;
};

inline double eval(const GridFunction& f, double x) { return f.eval(x); }
inline double inverse_eval(const GridFunction& f, double y) { return f.inverse_eval(y); }
inline std::pair<double, double> lipschitz_bounds(const GridFunction& f) { return f.lipschitz_bounds(); }

/// Default resampling knots for outer∘inner: inner's knots plus preimages of
/// outer's knots under inner, thinned to `cap`.
inline std::vector<double> default_compose_knots(const GridFunction& outer, const GridFunction& inner,
                                                 std::size_t cap = 4 * kDefaultGridSize) {
  std::vector<double> pre;
  if (inner.monotone()) {
    const auto span = inner.value_span();
    for (double k : outer.knots())
      if (k > span.lo && k < span.hi) pre.push_back(inner.inverse_eval(k));
  }
  auto knots = merge_knots(inner.knots(), pre);
  return thin_knots(std::move(knots), cap);
}

inline GridFunction compose(const GridFunction& outer, const GridFunction& inner,
                            std::span<const double> resample_knots) {
  if (outer.extension() == Extension::Undefined) {
    const auto span = inner.value_span();
    const double slack = 1e-12 * std::max(1.0, std::abs(span.hi));
    if (span.lo < outer.domain_lo() - slack || span.hi > outer.domain_hi() + slack)
      throw Error(ErrorCode::DomainMismatch, "inner range [" + GridFunction::fmt(span.lo) + ", " +
                                                 GridFunction::fmt(span.hi) + "] leaves outer domain");
  }
  if (inner.extension() == Extension::Undefined && !resample_knots.empty() &&
      (resample_knots.front() < inner.domain_lo() || resample_knots.back() > inner.domain_hi()))
    throw Error(ErrorCode::DomainMismatch, "resample knots leave inner domain");
  std::vector<double> knots(resample_knots.begin(), resample_knots.end());
  std::vector<double> values(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double y = inner.eval(knots[i]);
    values[i] = outer.eval(outer.extension() == Extension::Undefined
                               ? std::clamp(y, outer.domain_lo(), outer.domain_hi())
                               : y);
  }
  const bool mono = outer.monotone() && inner.monotone() && GridFunction::values_increasing(values);
  return GridFunction(std::move(knots), std::move(values), inner.extension(), mono);
}

inline GridFunction compose(const GridFunction& outer, const GridFunction& inner) {
  const auto knots = default_compose_knots(outer, inner);
  return compose(outer, inner, knots);
}

/// f^k; f^0 is the identity on the resampling knots (or f's own knots).
inline GridFunction iterate_k(const GridFunction& f, std::size_t k, std::span<const double> resample_knots = {}) {
  std::vector<double> knots = resample_knots.empty() ? f.knots()
                                                     : std::vector<double>(resample_knots.begin(), resample_knots.end());
  if (k == 0) return GridFunction::identity_on(std::move(knots), f.extension());
  GridFunction acc = compose(f, GridFunction::identity_on(knots, f.extension()), knots);
  for (std::size_t j = 1; j < k; ++j) acc = compose(f, acc, knots);
  return acc;
}

/// Pointwise k-fold iterate without resampling.
/// Knots and values of `exact` on `grid`, each cell bisected until linear
/// interpolation matches `exact` at its midpoint and quarter points to `tol`.
/// Appends to `knots`/`values`, skipping points not beyond the last knot.
template <typename Fn>
void refine_into(Fn&& exact, std::span<const double> grid, double tol, std::vector<double>& knots,
                 std::vector<double>& values, std::size_t cap = 2000000) {
  auto push = [&](double x, double v) {
    if (!knots.empty() && x <= knots.back()) return;
    knots.push_back(x);
    values.push_back(v);
  };
  auto refine = [&](auto&& self, double x0, double v0, double x1, double v1, int depth) -> void {
    const double xm = 0.5 * (x0 + x1);
    const double vm = exact(xm);
    const double q1 = exact(0.25 * (3 * x0 + x1)), q3 = exact(0.25 * (x0 + 3 * x1));
    const bool ok = std::abs(vm - 0.5 * (v0 + v1)) <= tol && std::abs(q1 - (0.75 * v0 + 0.25 * v1)) <= tol &&
                    std::abs(q3 - (0.25 * v0 + 0.75 * v1)) <= tol;
    if (ok || depth >= 40 || knots.size() > cap || !(xm > x0 && xm < x1)) {
      push(x1, v1);
      return;
    }
    self(self, x0, v0, xm, vm, depth + 1);
    self(self, xm, vm, x1, v1, depth + 1);
  };
  if (grid.empty()) return;
  double v = exact(grid[0]);
  push(grid[0], v);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double next = exact(grid[i + 1]);
    refine(refine, grid[i], v, grid[i + 1], next, 0);
    v = next;
  }
}

inline double iterate_at(const GridFunction& f, std::size_t k, double x) {
  for (std::size_t j = 0; j < k; ++j) x = f.eval(x);
  return x;
}

inline std::vector<double> probe_points(double lo, double hi, std::size_t count = kDefaultProbeCount) {
  return uniform_knots(lo, hi, std::max<std::size_t>(count, 2));
}

/// Max |f - g| over the probes; a lower bound on the true sup norm.
template <typename F, typename G>
double sup_norm_diff(const F& f, const G& g, std::span<const double> probes) {
  double worst = 0.0;
  for (double x : probes) worst = std::max(worst, std::abs(f(x) - g(x)));
  return worst;
}

inline double sup_norm_diff(const GridFunction& f, const GridFunction& g, std::span<const double> probes) {
  return sup_norm_diff<GridFunction, GridFunction>(f, g, probes);
}

// --- CSV (two columns, header comment with metadata) ---

inline std::string to_csv(const GridFunction& f) {
  std::ostringstream out;
  out << "# iterfunc-grid domain=" << GridFunction::fmt(f.domain_lo()) << ',' << GridFunction::fmt(f.domain_hi())
      << " extension=" << (f.extension() == Extension::ClampToEndpointValues ? "clamp" : "undefined")
      << " monotone=" << (f.monotone() ? 1 : 0) << '\n';
  out << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    out << GridFunction::fmt(f.knots()[i]) << ',' << GridFunction::fmt(f.values()[i]) << '\n';
  return out.str();
}

inline GridFunction from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Extension ext = Extension::ClampToEndpointValues;
  bool mono = false;
  bool mono_declared = false;
  std::vector<double> xs, vs;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("extension=undefined") != std::string::npos) ext = Extension::Undefined;
      if (line.find("monotone=1") != std::string::npos) mono = mono_declared = true;
      if (line.find("monotone=0") != std::string::npos) mono_declared = true;
      continue;
    }
    if (line.rfind("x,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::SchemaViolation, "csv line " + std::to_string(lineno) + ": expected two columns");
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(line.substr(0, comma), &used));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::SchemaViolation, "csv line " + std::to_string(lineno) + ": not a number");
    }
  }
  if (!mono_declared) mono = GridFunction::values_increasing(vs);
  return GridFunction(std::move(xs), std::move(vs), ext, mono);
}

inline void write_csv(const GridFunction& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << to_csv(f);
}

inline GridFunction read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

}  // namespace iterfunc
