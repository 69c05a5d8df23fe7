#pragma once

// Fixed-point solver for sum_k alpha_k f^k = F on the line.
//
// With L_f = sum_k alpha_k f^{k-1} the equation reads L_f(f(x)) = F(x), so a
// solution is a fixed point of T f = L_f^{-1} o F. For f in F_I(delta, M),
//   K0 (x-y) <= L_f(x) - L_f(y) <= K1 (x-y),   |L_f1 - L_f2| <= K2 |f1 - f2|,
// and T contracts with factor K2/K0 whenever K2 < K0.

#include <algorithm>
#include <cmath>
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

inline constexpr double kClassTolerance = 1e-9;
inline constexpr double kContractionSlack = 0.05;

namespace detail {

[[noreturn]] inline void hypothesis(const std::string& what) { throw Error(ErrorCode::HypothesisViolation, what); }

}  // namespace detail

inline Constants compute_constants(const std::vector<double>& alpha, double delta, double M) {
  if (alpha.empty()) detail::hypothesis("no exponents given");
  for (std::size_t k = 0; k < alpha.size(); ++k)
    if (!(alpha[k] >= 0.0))
      detail::hypothesis("alpha_" + std::to_string(k + 1) + " = " + GridFunction::fmt(alpha[k]) +
                         " is negative; the contraction route needs alpha_k >= 0");
  const double sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12)
    detail::hypothesis("sum of alpha_k is " + GridFunction::fmt(sum) + ", not 1; normalize the exponents first");
  if (!(delta > 0.0 && delta <= 1.0)) detail::hypothesis("need 0 < delta <= 1, got delta = " + GridFunction::fmt(delta));
  if (!(M >= 1.0 && std::isfinite(M))) detail::hypothesis("need M >= 1, got M = " + GridFunction::fmt(M));

  Constants c;
  c.K0 = 0.0;
  c.K1 = 0.0;
  c.K2 = 0.0;
  double dpow = 1.0, mpow = 1.0, geo = 0.0;  // delta^{k-1}, M^{k-1}, sum_{j<k-1} M^j
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    c.K0 += alpha[k] * dpow;
    c.K1 += alpha[k] * mpow;
    if (k >= 1) c.K2 += alpha[k] * geo;
    geo += mpow;
    dpow *= delta;
    mpow *= M;
  }
  c.contraction_factor = c.K2 / c.K0;
  return c;
}

/// Checks everything the fixed-point theorem needs and returns the constants.
inline Constants require_contraction(const std::vector<double>& alpha, double delta, double M) {
  if (alpha.size() >= 2 && alpha[0] == 0.0)
    detail::hypothesis(
        "alpha_1 = 0: then K2 >= K0 for every admissible delta, M, so the contraction argument cannot solve "
        "the iterative root problem g^n = G; use the root construction instead");
  auto c = compute_constants(alpha, delta, M);
  if (!(c.K2 < c.K0))
    detail::hypothesis("K2 = " + GridFunction::fmt(c.K2) + " is not below K0 = " + GridFunction::fmt(c.K0) +
                       "; T is not a contraction");
  return c;
}

/// L_f(x) = sum_k alpha_k f^{k-1}(x).
inline double apply_Lf(const GridFunction& f, const std::vector<double>& alpha, double x) {
  double acc = 0.0, it = x;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (k > 0) it = f.eval(it);
    acc += alpha[k] * it;
  }
  return acc;
}

/// The x in I with L_f(x) = y, by bisection on the monotone map L_f.
inline double invert_Lf(const GridFunction& f, const std::vector<double>& alpha, double y, Interval I) {
  double lo = I.lo, hi = I.hi;
  const double Llo = apply_Lf(f, alpha, lo), Lhi = apply_Lf(f, alpha, hi);
  const double slack = 1e-12 * std::max(1.0, std::abs(y));
  if (y < Llo - slack || y > Lhi + slack)
    throw Error(ErrorCode::NotBracketed, "y = " + GridFunction::fmt(y) + " outside [L_f(a), L_f(b)] = [" +
                                             GridFunction::fmt(Llo) + ", " + GridFunction::fmt(Lhi) + "]");
  if (y <= Llo) return lo;
  if (y >= Lhi) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (apply_Lf(f, alpha, mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return lo + 0.5 * (hi - lo);
}

/// Knots on I: uniform plus every seam of F inside I.
inline std::vector<double> core_knots(const Target& F, Interval I, std::size_t grid) {
  std::vector<double> seams;
  for (double s : F.seams)
    if (s > I.lo && s < I.hi) seams.push_back(s);
  return merge_knots(uniform_knots(I.lo, I.hi, grid), seams, 0.25 * I.length() / static_cast<double>(grid));
}

/// F(x) for x in I, checked to stay inside I.
inline double target_in_I(const Target& F, double x, Interval I) {
  const double y = F(x);
  const double slack = kClassTolerance * std::max(1.0, I.length());
  if (!(y >= I.lo - slack && y <= I.hi + slack))
    detail::hypothesis("F(" + GridFunction::fmt(x) + ") = " + GridFunction::fmt(y) + " leaves I = [" +
                       GridFunction::fmt(I.lo) + ", " + GridFunction::fmt(I.hi) + "]; the range of F must be I");
  return std::clamp(y, I.lo, I.hi);
}

struct PicardRun {
  GridFunction f;
  std::vector<double> gaps;
  std::vector<SweepRecord> sweeps;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Plain Picard sweeps f_{m+1} = L_{f_m}^{-1} o F on fixed knots.
/// Throws CertificateLost when an iterate stops fixing the endpoints or stops increasing.
inline PicardRun picard_iterate(const Target& F, const std::vector<double>& alpha, double delta, double M, Interval I,
                                const std::vector<double>& knots, GridFunction f0, const SolverOptions& opts) {
  std::vector<double> y(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) y[i] = target_in_I(F, knots[i], I);
  const auto probes = probe_points(I.lo, I.hi, opts.probes);

  PicardRun run{std::move(f0), {}, {}, 0, false};
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    std::vector<double> v(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) v[i] = invert_Lf(run.f, alpha, y[i], I);
    const bool mono = GridFunction::values_increasing(v);
    GridFunction next(knots, std::move(v), Extension::ClampToEndpointValues, mono);
    if (std::abs(next.values().front() - I.lo) > kClassTolerance ||
        std::abs(next.values().back() - I.hi) > kClassTolerance)
      throw Error(ErrorCode::CertificateLost, "iterate " + std::to_string(it) + " no longer fixes the endpoints of I");
    if (!mono) throw Error(ErrorCode::CertificateLost, "iterate " + std::to_string(it) + " is not strictly increasing");

    const double gap = sup_norm_diff(next, run.f, probes);
    const auto cert = check_F_class(next, delta, M, I, kClassTolerance);
    const auto [slo, shi] = next.lipschitz_bounds();
    run.sweeps.push_back({it, gap, cert.is_member(), slo, shi});
    run.gaps.push_back(gap);
    run.f = std::move(next);
    run.iterations = it;
    if (gap <= opts.tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

/// sup over probes of |sum_k alpha_k f^k(x) - F(x)|.
template <typename Fn>
double residual_polynomial(const GridFunction& f, const std::vector<double>& alpha, Fn&& F,
                           std::span<const double> probes) {
  double worst = 0.0;
  for (double x : probes) {
    double acc = 0.0, it = x;
    for (double a : alpha) {
      it = f.eval(it);
      acc += a * it;
    }
    worst = std::max(worst, std::abs(acc - F(x)));
  }
  return worst;
}

/// Largest ratio gap[m+1]/gap[m] for m >= 1, skipping gaps lost in rounding noise.
inline double max_gap_ratio(const std::vector<double>& gaps, double floor = 1e-13) {
  double worst = 0.0;
  for (std::size_t m = 1; m + 1 < gaps.size(); ++m)
    if (gaps[m] > floor && gaps[m + 1] > floor) worst = std::max(worst, gaps[m + 1] / gaps[m]);
  return worst;
}

/// Evaluates the fixed point off I: f(x) = L_f^{-1}(F(x)) with f the core solution.
inline GridFunction extend_fixed_point(const GridFunction& core, const Target& F, const std::vector<double>& alpha,
                                       Interval I, Interval window) {
  if (window.lo >= I.lo && window.hi <= I.hi) return core;
  const double h = I.length() / static_cast<double>(std::max<std::size_t>(core.size() - 1, 1));
  std::vector<double> knots, values;
  auto side = [&](double lo, double hi) {
    const auto count = static_cast<std::size_t>(std::clamp((hi - lo) / h, 2.0, static_cast<double>(core.size())));
    auto k = uniform_knots(lo, hi, count + 1);
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
      knots.push_back(k[i]);
      values.push_back(invert_Lf(core, alpha, target_in_I(F, k[i], I), I));
    }
  };
  if (window.lo < I.lo) side(window.lo, I.lo);
  for (std::size_t i = 0; i < core.size(); ++i) {
    knots.push_back(core.knots()[i]);
    values.push_back(core.values()[i]);
  }
  if (window.hi > I.hi) {
    const auto before = knots.size();
    side(I.hi, window.hi);
    // side() emitted [I.hi, ..., last) with I.hi duplicated; drop it and close with the end point.
    knots.erase(knots.begin() + static_cast<std::ptrdiff_t>(before));
    values.erase(values.begin() + static_cast<std::ptrdiff_t>(before));
    knots.push_back(window.hi);
    values.push_back(invert_Lf(core, alpha, target_in_I(F, window.hi, I), I));
  }
  const bool mono = GridFunction::values_increasing(values);
  return GridFunction(std::move(knots), std::move(values), Extension::ClampToEndpointValues, mono);
}

enum class InitialIterate { Identity, TargetInterpolant, Bent };

/// a + L (t + s t (1 - t)) with t = (x - a)/L: fixes a and b, slopes in [1 - s, 1 + s] within [delta, M].
inline GridFunction bent_member(const std::vector<double>& knots, Interval I, double delta, double M) {
  const double s = 0.9 * std::min(1.0 - delta, M - 1.0);
  return GridFunction::sampled(
      [&](double x) {
        const double t = (x - I.lo) / I.length();
        return I.lo + I.length() * (t + s * t * (1.0 - t));
      },
      knots);
}

/// Solves sum_k alpha_k f^k = F with f in F_I(delta, M).
/// `window` is where the returned solution is tabulated; it defaults to I.
inline SolveReport picard_solve(const Target& F, const std::vector<double>& alpha, double delta, double M,
                                Interval I, const SolverOptions& opts, std::optional<Interval> window = std::nullopt,
                                bool check_uniqueness = true) {
  SolveReport rep;
  rep.route = "contraction";
  const Constants c = require_contraction(alpha, delta, M);
  rep.constants = c;
  rep.stability_constant = 1.0 / (c.K0 - c.K2);
  rep.probes = opts.probes;

  const double Fa = F(I.lo), Fb = F(I.hi);
  if (std::abs(Fa - I.lo) > kClassTolerance || std::abs(Fb - I.hi) > kClassTolerance)
    detail::hypothesis("F must fix the endpoints of I, got F(a) = " + GridFunction::fmt(Fa) +
                       ", F(b) = " + GridFunction::fmt(Fb));

  std::size_t grid = opts.grid;
  auto run_from = [&](InitialIterate start, std::size_t g) {
    const auto knots = core_knots(F, I, g);
    GridFunction f0 = start == InitialIterate::Identity ? GridFunction::identity_on(knots)
                      : start == InitialIterate::Bent
                          ? bent_member(knots, I, delta, M)
                          : GridFunction::sampled([&](double x) { return target_in_I(F, x, I); }, knots);
    return picard_iterate(F, alpha, delta, M, I, knots, std::move(f0), opts);
  };

  std::optional<PicardRun> run;
  try {
    run = run_from(InitialIterate::Identity, grid);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CertificateLost) throw;
    rep.warnings.push_back(std::string(e.what()) + "; refining the grid once");
    grid = 2 * (grid - 1) + 1;
    run = run_from(InitialIterate::Identity, grid);
  }
  rep.grid = grid;
  rep.iterations = run->iterations;
  rep.converged = run->converged;
  rep.gap_trace = run->gaps;
  rep.sweeps = run->sweeps;
  if (!run->converged) {
    std::string trace;
    for (std::size_t i = run->gaps.size() > 5 ? run->gaps.size() - 5 : 0; i < run->gaps.size(); ++i)
      trace += " " + GridFunction::fmt(run->gaps[i]);
    throw Error(ErrorCode::NoConvergence, "no convergence after " + std::to_string(run->iterations) +
                                              " iterations; last gaps:" + trace);
  }

  // Record (not enforce) the class memberships the theorem assumes.
  {
    const auto Fcore = GridFunction::sampled([&](double x) { return F(x); }, core_knots(F, I, grid));
    rep.certificates.push_back({"target F in F_I(K1*delta, K0*M)", check_F_class(Fcore, c.K1 * delta, c.K0 * M, I)});
    const auto& fc = rep.certificates.back().cert;
    if (!fc.is_member())
      rep.warnings.push_back("target is not certified in F_I(K1*delta, K0*M); contraction verified empirically instead");
  }
  rep.certificates.push_back({"solution f in F_I(delta, M)", check_F_class(run->f, delta, M, I)});
  if (!rep.certificates.back().cert.is_member())
    rep.warnings.push_back("solution is outside F_I(delta, M) (slopes [" +
                           GridFunction::fmt(run->f.lipschitz_bounds().first) + ", " +
                           GridFunction::fmt(run->f.lipschitz_bounds().second) + "])");

  const double ratio = max_gap_ratio(run->gaps);
  rep.bound_checks.push_back(
      {"gap ratio <= K2/K0 + 0.05", ratio, c.contraction_factor + kContractionSlack,
       ratio <= c.contraction_factor + kContractionSlack});

  if (check_uniqueness) {
    // The F interpolant is T(id) and would retrace the same orbit, so start from a bent member.
    const auto other = run_from(InitialIterate::Bent, grid);
    const auto probes = probe_points(I.lo, I.hi, opts.probes);
    rep.uniqueness_gap = sup_norm_diff(run->f, other.f, probes);
    rep.bound_checks.push_back({"uniqueness: |f(id start) - f(bent start)| <= 10 tol", *rep.uniqueness_gap,
                                10.0 * opts.tol, *rep.uniqueness_gap <= 10.0 * opts.tol});
  }

  const Interval win = window.value_or(I);
  rep.window_line = win;
  rep.window = win;
  rep.solution_line = extend_fixed_point(run->f, F, alpha, I, win);
  rep.solution = rep.solution_line;
  const auto probes = probe_points(win.lo, win.hi, opts.probes);
  rep.residual_poly = residual_polynomial(*rep.solution_line, alpha, F, probes);
  return rep;
}

inline double stability_bound(double c, double d, const Constants& k) {
  if (!(c > 0.0 && d >= c)) detail::hypothesis("stability bound needs 0 < c <= d");
  if (!(k.K0 > k.K2)) detail::hypothesis("stability bound needs K2 < K0");
  return d / (c * (k.K0 - k.K2));
}

/// ||g - g1|| <= d/(c(K0-K2)) ||G - G1|| on probes of J = [c, d].
template <typename G1Fn, typename G2Fn>
BoundCheck stability_check(const SolveReport& r1, const SolveReport& r2, G1Fn&& G1, G2Fn&& G2, Interval J,
                           std::size_t probe_count = kDefaultProbeCount) {
  if (!r1.solution || !r2.solution || !r1.constants) detail::hypothesis("both problems must be solved first");
  const double bound = stability_bound(J.lo, J.hi, *r1.constants);
  const auto probes = probe_points(J.lo, J.hi, probe_count);
  const double lhs = sup_norm_diff(*r1.solution, *r2.solution, probes);
  const double dG = sup_norm_diff(G1, G2, probes);
  const double rhs = bound * dG;
  return {"stability: |g - g1| <= d/(c(K0-K2)) |G - G1|", lhs, rhs, lhs <= rhs + 1e-8};
}

}  // namespace iterfunc
