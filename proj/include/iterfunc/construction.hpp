#pragma once

// Piecewise ("sewing") construction for f^n = sum_{k<n} lambda_k f^k + F with
// lambda = sum lambda_k in [0, 1).
//
// AtLeft (anchor a, f(a) = a): choose x0 in (a, b] and decreasing seeds
// x1 > ... > x_{n-1} in (a, x0). The sequence
//   x_{n+m} = sum_{j=1}^{n-1} lambda_j x_{j+m} + F(x_m)
// decreases to a, and f is assembled from pieces f_m : [x_m, x_{m-1}] -> [x_{m+1}, x_m].
// The first n-1 pieces are free; for m >= n, with z_0 = x and z_j = f_{m-j}^{-1}(z_{j-1}),
//   f_m(x) = sum_{j=0}^{n-2} lambda_{n-1-j} z_j + F(z_{n-1}).
// AtRight (anchor b) is the mirror image under x -> -x and is reduced to AtLeft.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iterfunc/classes.hpp"
#include "iterfunc/error.hpp"
#include "iterfunc/expression.hpp"
#include "iterfunc/grid_function.hpp"
#include "iterfunc/problem.hpp"
#include "iterfunc/report.hpp"

namespace iterfunc {

enum class Side { AtLeft, AtRight };

inline std::string to_string(Side s) { return s == Side::AtLeft ? "AtLeft" : "AtRight"; }

/// Normalized initial-piece shapes: increasing maps of [0,1] onto itself.
inline GridFunction linear_shape() { return GridFunction::identity(0.0, 1.0); }

inline GridFunction quadratic_shape(std::size_t knots = 1025) {
  return GridFunction::sampled([](double t) { return 0.5 * (t + t * t); }, uniform_knots(0.0, 1.0, knots));
}

inline void validate_shape(const GridFunction& s) {
  const double tol = 1e-12;
  if (std::abs(s.domain_lo()) > tol || std::abs(s.domain_hi() - 1.0) > tol)
    throw Error(ErrorCode::SchemaViolation, "initial piece shape must be defined on [0, 1]");
  if (std::abs(s.values().front()) > tol || std::abs(s.values().back() - 1.0) > tol)
    throw Error(ErrorCode::SchemaViolation, "initial piece shape must map 0 to 0 and 1 to 1");
  if (!GridFunction::values_increasing(s.values()))
    throw Error(ErrorCode::SchemaViolation, "initial piece shape must be strictly increasing");
}

struct SewingPlan {
  std::size_t n = 2;
  /// lambda_1 .. lambda_{n-1}
  std::vector<double> lambda;
  Side side = Side::AtLeft;
  /// Compact working interval.
  Interval interval;
  double x0 = kNaN;
  std::vector<double> seeds;
  /// One shape for every free piece, or one per free piece. Empty means linear.
  std::vector<GridFunction> initial_shapes;
  std::string shape_label = "linear";
  std::size_t piece_knots = 513;
  double eps_seq = 1e-8;
  std::size_t max_terms = 100000;
  /// Seed mesh: candidate ratios rho^1 .. rho^mesh.
  double mesh_ratio = 0.9;
  std::size_t mesh_size = 64;

  double lambda_sum() const { return std::accumulate(lambda.begin(), lambda.end(), 0.0); }
  double anchor() const { return side == Side::AtLeft ? interval.lo : interval.hi; }

  const GridFunction* shape(std::size_t j) const {
    if (initial_shapes.empty()) return nullptr;
    return &initial_shapes[std::min(j, initial_shapes.size() - 1)];
  }
};

struct SewnSolution {
  Side side = Side::AtLeft;
  double anchor = kNaN;
  double x0 = kNaN;
  std::vector<double> seeds;
  std::vector<double> sequence;
  /// pieces[m-1] is f_m.
  std::vector<GridFunction> pieces;
  /// Sewn function on [a, x0] (AtLeft) or [x0, b] (AtRight), closed linearly near the anchor.
  GridFunction assembled = GridFunction::identity(0.0, 1.0);
  std::size_t piece_knots = 0;
};

inline void validate_plan(const SewingPlan& p) {
  if (p.n < 2) throw Error(ErrorCode::HypothesisViolation, "the construction needs n >= 2");
  if (p.lambda.size() != p.n - 1)
    throw Error(ErrorCode::HypothesisViolation, "need n - 1 = " + std::to_string(p.n - 1) + " coefficients lambda_k");
  const double l = p.lambda_sum();
  if (!(l >= 0.0 && l < 1.0))
    throw Error(ErrorCode::HypothesisViolation,
                "lambda = " + GridFunction::fmt(l) + " outside [0, 1); the construction does not apply");
  if (!std::isfinite(p.interval.lo) || !std::isfinite(p.interval.hi) || !(p.interval.lo < p.interval.hi))
    throw Error(ErrorCode::HypothesisViolation, "working interval must be compact and nondegenerate");
  const bool left = p.side == Side::AtLeft;
  if (left ? !(p.x0 > p.interval.lo && p.x0 <= p.interval.hi) : !(p.x0 >= p.interval.lo && p.x0 < p.interval.hi))
    throw Error(ErrorCode::HypothesisViolation, "x0 = " + GridFunction::fmt(p.x0) + " must lie in " +
                                                    (left ? "(a, b]" : "[a, b)"));
  for (const auto& s : p.initial_shapes) validate_shape(s);
}

namespace detail {

inline GridFunction mirror(const GridFunction& f) {
  const std::size_t n = f.size();
  std::vector<double> k(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = -f.knots()[n - 1 - i];
    v[i] = -f.values()[n - 1 - i];
  }
  return GridFunction(std::move(k), std::move(v), f.extension(), f.monotone());
}

inline Target mirror(const Target& F) {
  std::vector<double> seams;
  for (auto it = F.seams.rbegin(); it != F.seams.rend(); ++it) seams.push_back(-*it);
  auto fn = F.fn;
  return {[fn](double x) { return -fn(-x); }, std::move(seams), "-(" + F.label + ")(-x)"};
}

/// psi(s) = 1 - phi(1 - s), the shape seen in mirrored coordinates.
inline GridFunction mirror_shape(const GridFunction& phi) {
  const std::size_t n = phi.size();
  std::vector<double> k(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = 1.0 - phi.knots()[n - 1 - i];
    v[i] = 1.0 - phi.values()[n - 1 - i];
  }
  k.front() = 0.0;
  k.back() = 1.0;
  return GridFunction(std::move(k), std::move(v), phi.extension(), phi.monotone());
}

inline SewingPlan mirror(const SewingPlan& p) {
  SewingPlan m = p;
  m.side = p.side == Side::AtLeft ? Side::AtRight : Side::AtLeft;
  m.interval = {-p.interval.hi, -p.interval.lo};
  m.x0 = -p.x0;
  for (double& s : m.seeds) s = -s;
  m.initial_shapes.clear();
  for (const auto& s : p.initial_shapes) m.initial_shapes.push_back(mirror_shape(s));
  return m;
}

inline SewnSolution mirror(const SewnSolution& s) {
  SewnSolution m;
  m.side = s.side == Side::AtLeft ? Side::AtRight : Side::AtLeft;
  m.anchor = -s.anchor;
  m.x0 = -s.x0;
  for (double v : s.seeds) m.seeds.push_back(-v);
  for (double v : s.sequence) m.sequence.push_back(-v);
  for (const auto& p : s.pieces) m.pieces.push_back(mirror(p));
  m.assembled = mirror(s.assembled);
  m.piece_knots = s.piece_knots;
  return m;
}

/// Does x_next continue the sequence towards the anchor?
inline bool steps_inward(Side side, double anchor, double prev, double next) {
  return side == Side::AtLeft ? (next > anchor && next < prev) : (next < anchor && next > prev);
}

}  // namespace detail

/// x0, seeds, then the recursion until within eps_seq of the anchor.
inline std::vector<double> generate_sequence(const SewingPlan& plan, const Target& F, std::size_t max_terms = 0) {
  validate_plan(plan);
  if (plan.seeds.size() != plan.n - 1)
    throw Error(ErrorCode::SeedRejected, "need n - 1 = " + std::to_string(plan.n - 1) + " seeds");
  if (max_terms == 0) max_terms = plan.max_terms;
  const double a = plan.anchor();
  std::vector<double> x{plan.x0};
  for (std::size_t j = 0; j < plan.seeds.size(); ++j) {
    if (!detail::steps_inward(plan.side, a, x.back(), plan.seeds[j]))
      throw Error(ErrorCode::SeedRejected, "seed x_" + std::to_string(j + 1) + " = " +
                                               GridFunction::fmt(plan.seeds[j]) + " is not strictly between " +
                                               "the anchor and x_" + std::to_string(j))
          .with_index(j + 1);
    x.push_back(plan.seeds[j]);
  }
  const std::size_t n = plan.n;
  while (std::abs(x.back() - a) > plan.eps_seq) {
    if (x.size() >= max_terms)
      throw Error(ErrorCode::AnchorNotApproached, "sequence still " + GridFunction::fmt(std::abs(x.back() - a)) +
                                                      " away from the anchor after " + std::to_string(max_terms) +
                                                      " terms");
    const std::size_t m = x.size() - n;
    double next = F(x[m]);
    for (std::size_t j = 1; j < n; ++j) next += plan.lambda[j - 1] * x[j + m];
    if (!detail::steps_inward(plan.side, a, x.back(), next))
      throw Error(ErrorCode::SeedRejected, "x_" + std::to_string(x.size()) + " = " + GridFunction::fmt(next) +
                                               " leaves (anchor, x_" + std::to_string(x.size() - 1) +
                                               "); the seeds violate monotone containment")
          .with_index(x.size());
    x.push_back(next);
  }
  return x;
}

/// First seed tuple on a geometric mesh whose sequence reaches the anchor.
inline std::vector<double> default_seeds(const SewingPlan& plan, const Target& F) {
  validate_plan(plan);
  const std::size_t dims = plan.n - 1;
  const double a = plan.anchor();
  // Per-dimension mesh shrinks with n so the tuple count stays bounded.
  const double cap = 20000.0;
  const auto per_dim = static_cast<std::size_t>(
      std::clamp(std::floor(std::pow(cap, 1.0 / static_cast<double>(dims))), 2.0, static_cast<double>(plan.mesh_size)));
  std::vector<double> ratios;
  for (std::size_t k = 1; k <= per_dim; ++k)
    ratios.push_back(std::pow(plan.mesh_ratio, static_cast<double>(k) * static_cast<double>(plan.mesh_size) /
                                                   static_cast<double>(per_dim)));
  // Slowly contracting targets only accept seeds close to x0; fill (mesh_ratio, 1) last.
  const std::size_t fill = std::max<std::size_t>(2, per_dim / 4);
  for (std::size_t k = 1; k <= fill; ++k)
    ratios.push_back(plan.mesh_ratio + (1.0 - plan.mesh_ratio) * static_cast<double>(k) / static_cast<double>(fill + 1));
  std::vector<std::size_t> idx(dims, 0);
  SewingPlan trial = plan;
  while (true) {
    trial.seeds.assign(dims, 0.0);
    double prev = plan.x0;
    for (std::size_t j = 0; j < dims; ++j) {
      trial.seeds[j] = a + (prev - a) * ratios[idx[j]];
      prev = trial.seeds[j];
    }
    try {
      (void)generate_sequence(trial, F);
      return trial.seeds;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SeedRejected && e.code() != ErrorCode::AnchorNotApproached) throw;
    }
    std::size_t d = 0;
    while (d < dims && ++idx[d] == ratios.size()) idx[d++] = 0;
    if (d == dims) break;
  }
  throw Error(ErrorCode::NoValidSeeds, "no valid seed tuple on a mesh of " + std::to_string(per_dim) +
                                           " ratios per seed");
}

namespace detail {

inline GridFunction initial_piece(const GridFunction* shape, double lo, double hi, double vlo, double vhi,
                                  std::size_t knots, std::size_t m) {
  auto k = uniform_knots(lo, hi, shape ? knots : 2);
  std::vector<double> v(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double t = std::clamp((k[i] - lo) / (hi - lo), 0.0, 1.0);
    v[i] = vlo + (vhi - vlo) * (shape ? shape->eval(t) : t);
  }
  v.front() = vlo;
  v.back() = vhi;
  if (!GridFunction::values_increasing(v))
    throw Error(ErrorCode::PieceNotMonotone, "initial piece f_" + std::to_string(m) + " is not increasing")
        .with_index(m);
  return GridFunction(std::move(k), std::move(v), Extension::ClampToEndpointValues, true);
}

/// AtLeft pieces f_1 .. f_{K-1} for the sequence x_0 .. x_K.
inline std::vector<GridFunction> build_pieces_left(const SewingPlan& plan, const Target& F,
                                                   const std::vector<double>& x, std::size_t knots) {
  const std::size_t n = plan.n;
  std::vector<GridFunction> pieces;
  for (std::size_t m = 1; m + 1 < x.size(); ++m) {
    const double lo = x[m], hi = x[m - 1];
    if (m < n) {
      pieces.push_back(initial_piece(plan.shape(m - 1), lo, hi, x[m + 1], x[m], knots, m));
      continue;
    }
    auto k = uniform_knots(lo, hi, knots);
    std::vector<double> v(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) {
      double z = k[i];
      double acc = plan.lambda[n - 2] * z;
      for (std::size_t j = 1; j < n; ++j) {
        const auto& prev = pieces[m - j - 1];
        const auto span = prev.value_span();
        z = prev.inverse_eval(std::clamp(z, span.lo, span.hi));
        if (j <= n - 2) acc += plan.lambda[n - 2 - j] * z;
      }
      v[i] = acc + F(z);
    }
    const double scale = std::max(1.0, std::abs(x[m]));
    if (std::abs(v.front() - x[m + 1]) > 1e-9 * scale || std::abs(v.back() - x[m]) > 1e-9 * scale)
      throw Error(ErrorCode::RangeMismatch, "piece f_" + std::to_string(m) + " does not map onto [x_" +
                                                std::to_string(m + 1) + ", x_" + std::to_string(m) + "]")
          .with_index(m);
    v.front() = x[m + 1];
    v.back() = x[m];
    if (!GridFunction::values_increasing(v))
      throw Error(ErrorCode::PieceNotMonotone, "piece f_" + std::to_string(m) + " is not strictly increasing")
          .with_index(m);
    pieces.emplace_back(std::move(k), std::move(v), Extension::ClampToEndpointValues, true);
  }
  return pieces;
}

inline GridFunction assemble_left(double anchor, const std::vector<double>& x, const std::vector<GridFunction>& pieces) {
  std::vector<double> knots{anchor}, values{anchor};
  for (std::size_t p = pieces.size(); p-- > 0;) {
    const auto& f = pieces[p];
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.knots()[i] <= knots.back()) continue;
      knots.push_back(f.knots()[i]);
      values.push_back(f.values()[i]);
    }
  }
  if (pieces.empty()) {
    knots.push_back(x.front());
    values.push_back(x.size() > 1 ? x[1] : anchor);
  }
  const bool mono = GridFunction::values_increasing(values);
  return GridFunction(std::move(knots), std::move(values), Extension::ClampToEndpointValues, mono);
}

inline SewnSolution sew_left(const SewingPlan& plan, const Target& F) {
  SewingPlan p = plan;
  if (p.seeds.empty()) p.seeds = default_seeds(p, F);
  SewnSolution s;
  s.side = Side::AtLeft;
  s.anchor = p.anchor();
  s.x0 = p.x0;
  s.seeds = p.seeds;
  s.sequence = generate_sequence(p, F);
  std::size_t knots = p.piece_knots;
  try {
    s.pieces = build_pieces_left(p, F, s.sequence, knots);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PieceNotMonotone) throw;
    knots = 2 * (knots - 1) + 1;
    s.pieces = build_pieces_left(p, F, s.sequence, knots);
  }
  s.piece_knots = knots;
  s.assembled = assemble_left(s.anchor, s.sequence, s.pieces);
  return s;
}

}  // namespace detail

/// Pieces for a given sequence (either side).
inline std::vector<GridFunction> build_pieces(const SewingPlan& plan, const Target& F, const std::vector<double>& x) {
  if (plan.side == Side::AtLeft) return detail::build_pieces_left(plan, F, x, plan.piece_knots);
  std::vector<double> mx;
  for (double v : x) mx.push_back(-v);
  auto pieces = detail::build_pieces_left(detail::mirror(plan), detail::mirror(F), mx, plan.piece_knots);
  for (auto& p : pieces) p = detail::mirror(p);
  return pieces;
}

/// Seeds (searched when absent), sequence, pieces, assembly.
inline SewnSolution sew(const SewingPlan& plan, const Target& F) {
  validate_plan(plan);
  if (plan.side == Side::AtLeft) return detail::sew_left(plan, F);
  return detail::mirror(detail::sew_left(detail::mirror(plan), detail::mirror(F)));
}

/// sup over probes of |f^n - sum lambda_k f^k - F|.
template <typename Fn>
double residual_lcp(const GridFunction& f, const std::vector<double>& lambda, Fn&& F, std::span<const double> probes) {
  double worst = 0.0;
  for (double x : probes) {
    double it = x, acc = 0.0;
    for (std::size_t k = 1; k <= lambda.size(); ++k) {
      it = f.eval(it);
      acc += lambda[k - 1] * it;
    }
    it = f.eval(it);
    worst = std::max(worst, std::abs(it - acc - F(x)));
  }
  return worst;
}

/// Probes on the sewn interval minus the eps_seq neighbourhood of the anchor.
inline std::vector<double> sewn_probes(const SewnSolution& s, double eps_seq, std::size_t count) {
  if (s.side == Side::AtLeft) return probe_points(s.anchor + eps_seq, s.x0, count);
  return probe_points(s.x0, s.anchor - eps_seq, count);
}

/// Exact evaluator x -> phi(F1^{-1}(F(x))) where phi is the sewn solution on the core I1.
inline std::function<double(double)> line_extension(const SewnSolution& sewn, const Target& F) {
  const Interval core = sewn.assembled.domain();
  const double Flo = F(core.lo), Fhi = F(core.hi);
  auto phi = std::make_shared<const GridFunction>(sewn.assembled);
  auto fn = F.fn;
  return [phi, fn, core, Flo, Fhi](double x) {
    if (x >= core.lo && x <= core.hi) return phi->eval(x);
    const double y = fn(x);
    const double slack = 1e-12 * std::max(1.0, std::abs(Fhi - Flo));
    if (y < Flo - slack || y > Fhi + slack)
      throw Error(ErrorCode::RangeHypothesisViolated,
                  "F(" + GridFunction::fmt(x) + ") = " + GridFunction::fmt(y) + " outside R(F|I1) = [" +
                      GridFunction::fmt(Flo) + ", " + GridFunction::fmt(Fhi) + "]");
    if (y <= Flo) return phi->eval(core.lo);
    if (y >= Fhi) return phi->eval(core.hi);
    double lo = core.lo, hi = core.hi;
    for (int i = 0; i < 200; ++i) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      (fn(mid) < y ? lo : hi) = mid;
    }
    return phi->eval(lo + 0.5 * (hi - lo));
  };
}

/// Samples the whole-line extension on `window`, refining adaptively off the core
/// until linear interpolation matches the exact extension to `interp_tol`.
inline GridFunction extend_to_line(const SewnSolution& sewn, const Target& F, const GridFunction& F_core,
                                   Interval window, std::size_t base_knots = 4097, double interp_tol = 1e-10) {
  const Interval core = sewn.assembled.domain();
  if (!GridFunction::values_increasing(F_core.values()))
    throw Error(ErrorCode::HypothesisViolation, "F must be strictly increasing on the core interval");
  const auto exact = line_extension(sewn, F);

  std::vector<double> knots, values;
  auto push = [&](double x, double v) {
    if (!knots.empty() && x <= knots.back()) return;
    knots.push_back(x);
    values.push_back(v);
  };
  auto outside = [&](double lo, double hi) {
    if (!(lo < hi)) return;
    std::vector<double> seams;
    for (double s : F.seams)
      if (s > lo && s < hi) seams.push_back(s);
    const auto count = std::max<std::size_t>(
        2, static_cast<std::size_t>(static_cast<double>(base_knots) * (hi - lo) / window.length()) + 1);
    const auto grid = merge_knots(uniform_knots(lo, hi, count), seams, 0.0);
    refine_into(exact, grid, interp_tol, knots, values);
  };

  outside(window.lo, std::min(window.hi, core.lo));
  for (std::size_t i = 0; i < sewn.assembled.size(); ++i) {
    const double x = sewn.assembled.knots()[i];
    if (x >= window.lo && x <= window.hi) push(x, sewn.assembled.values()[i]);
  }
  outside(std::max(window.lo, core.hi), window.hi);
  if (knots.size() < 2) {
    push(window.lo, exact(window.lo));
    push(window.hi, exact(window.hi));
  }
  const bool mono = GridFunction::values_increasing(values);
  return GridFunction(std::move(knots), std::move(values), Extension::ClampToEndpointValues, mono);
}

/// Finite working interval for an interval with infinite ends: the span outside of
/// which F stays within 1e-12 of its asymptotic value.
inline Interval working_window(const Target& F, Interval I) {
  auto settle = [&](double from, double dir) {
    double step = 1.0, prev = F(from);
    for (int i = 0; i < 60; ++i) {
      const double x = from + dir * step;
      const double v = F(x);
      if (std::abs(v - prev) <= 1e-12 * std::max(1.0, std::abs(v))) return from + dir * step / 2.0;
      prev = v;
      step *= 2.0;
    }
    throw Error(ErrorCode::HypothesisViolation, "target does not settle towards an infinite end of the interval");
  };
  Interval w = I;
  if (std::isinf(w.lo) && std::isinf(w.hi)) {
    w.lo = settle(0.0, -1.0);
    w.hi = settle(0.0, 1.0);
  } else if (std::isinf(w.lo)) {
    w.lo = settle(w.hi, -1.0);
  } else if (std::isinf(w.hi)) {
    w.hi = settle(w.lo, 1.0);
  }
  return w;
}

/// Plan from options: x0 defaults to the end opposite the anchor, shapes from a CSV.
inline SewingPlan make_plan(const std::vector<double>& lambda, Interval interval, Side side,
                            const SolverOptions& opts) {
  SewingPlan p;
  p.n = lambda.size() + 1;
  p.lambda = lambda;
  p.side = side;
  p.interval = interval;
  p.x0 = opts.x0.value_or(side == Side::AtLeft ? interval.hi : interval.lo);
  p.seeds = opts.seeds;
  p.piece_knots = opts.piece_knots;
  p.eps_seq = opts.eps_seq;
  if (!opts.initial_pieces.empty()) {
    p.initial_shapes.push_back(read_csv(opts.initial_pieces));
    p.shape_label = opts.initial_pieces;
  }
  return p;
}

/// R-class membership for the target on I with anchor at the chosen end.
inline ClassCertificate certify_R_target(const Target& F, const std::vector<double>& lambda, Interval I, Side side,
                                         std::size_t grid) {
  std::vector<double> seams;
  for (double s : F.seams)
    if (s > I.lo && s < I.hi) seams.push_back(s);
  auto knots = merge_knots(uniform_knots(I.lo, I.hi, grid), seams, 0.0);
  const auto Fg = GridFunction::sampled(F, std::move(knots));
  const double l = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  return check_R_class(Fg, side == Side::AtLeft ? I.lo : I.hi, l, I);
}

/// Candidate check for lambda <= 0: target in A_{1-lambda}, candidate in A_1, residual of the equation.
inline SolveReport verify_candidate_lambda_nonpos(const GridFunction& f, const std::vector<double>& lambda,
                                                  const Target& F, Interval I, const SolverOptions& opts,
                                                  std::optional<Interval> window = std::nullopt) {
  const double l = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  if (!(l <= 0.0))
    throw Error(ErrorCode::HypothesisViolation,
                "candidate verification covers lambda <= 0 only, got lambda = " + GridFunction::fmt(l));
  SolveReport rep;
  rep.route = "verify";
  rep.probes = opts.probes;
  const auto Fg = GridFunction::sampled(F, uniform_knots(I.lo, I.hi, opts.grid));
  rep.certificates.push_back({"target F in A_{1-lambda}", check_AB_class(Fg, 1.0 - l, I)});
  rep.certificates.push_back({"candidate f in A_1", check_AB_class(f, 1.0, I)});
  const Interval win = window.value_or(I);
  rep.window = rep.window_line = win;
  const auto probes = probe_points(win.lo, win.hi, opts.probes);
  rep.residual_poly = residual_lcp(f, lambda, F, probes);
  rep.bound_checks.push_back({"residual <= residual_tol", rep.residual_poly, opts.residual_tol,
                              rep.residual_poly <= opts.residual_tol});
  rep.solution = rep.solution_line = f;
  rep.converged = rep.residual_poly <= opts.residual_tol && rep.certificates.back().cert.is_member();
  return rep;
}

}  // namespace iterfunc
