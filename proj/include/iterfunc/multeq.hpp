#pragma once

// End-to-end solve of prod_k (g^k)^{alpha_k} = G on (0, inf), of the
// polynomial-like form on the line, and of iterative roots g^n = G.
//
// Stages: Normalize, ConjugateExpLog, CertifyClasses, Solve(Contraction|Sew|Verify),
// ExtendToLine, ConjugateBack, VerifyMultiplicative, NegationExtend.
//
// Routing: contraction when alpha >= 0, 0 < alpha_1/sum < 1 and the scaled F
// fixes both ends of I; sewing when the normal form f^n = sum lambda_k f^k + H
// has lambda in [0, 1) and H is in R_{a,lambda} or R_{b,lambda}; verification
// of a supplied candidate otherwise.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iterfunc/classes.hpp"
#include "iterfunc/conjugation.hpp"
#include "iterfunc/construction.hpp"
#include "iterfunc/contraction.hpp"
#include "iterfunc/error.hpp"
#include "iterfunc/expression.hpp"
#include "iterfunc/grid_function.hpp"
#include "iterfunc/problem.hpp"
#include "iterfunc/report.hpp"

namespace iterfunc {

/// max over probes of |prod_k (g^k(x))^{alpha_k} - G(x)|. Nonpositive iterates are
/// allowed only under integer exponents (the mirrored half-line).
template <typename Gf, typename Fn>
double residual_multiplicative(const Gf& g, const std::vector<double>& alpha, Fn&& G, std::span<const double> probes) {
  double worst = 0.0;
  for (double x : probes) {
    double it = x, prod = 1.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      it = g(it);
      if (!(it > 0.0) && (!is_integer(alpha[k]) || (it == 0.0 && alpha[k] < 0.0)))
        throw Error(ErrorCode::NonPositiveIterate, "g^" + std::to_string(k + 1) + "(" + GridFunction::fmt(x) +
                                                       ") = " + GridFunction::fmt(it) + " is not positive");
      if (alpha[k] != 0.0) prod *= std::pow(it, alpha[k]);
    }
    worst = std::max(worst, std::abs(prod - G(x)));
  }
  return worst;
}

/// h(x) = -g(-x) on the mirrored window.
inline GridFunction extend_to_negative(const GridFunction& g, const std::vector<double>& exponents) {
  return conj_negation(g, exponents);
}

/// g = exp o f o log on `window`, sampled densely enough in x that linear
/// interpolation tracks the exact conjugate to 1e-10.
inline GridFunction conj_back_sampled(const GridFunction& f, Interval window, std::size_t grid) {
  auto exact = [&](double x) { return std::exp(f.eval(std::log(x))); };
  std::vector<double> base;
  for (double k : f.knots()) {
    const double x = std::exp(k);
    if (x > window.lo && x < window.hi) base.push_back(x);
  }
  const auto knots0 = merge_knots(uniform_knots(window.lo, window.hi, std::max<std::size_t>(grid, 2)), base, 0.0);
  std::vector<double> knots, values;
  refine_into(exact, knots0, 1e-10, knots, values);
  const bool mono = GridFunction::values_increasing(values);
  return GridFunction(std::move(knots), std::move(values), Extension::ClampToEndpointValues, mono);
}

namespace detail {

inline std::function<double(double)> pointwise_line(const GridFunction& f, std::vector<double> alpha, Target F,
                                                    double scale) {
  return [f, alpha = std::move(alpha), F = std::move(F), scale](double x) {
    const double p[1] = {x};
    return scale * residual_polynomial(f, alpha, F, p);
  };
}

template <typename Gf>
std::function<double(double)> pointwise_mult(Gf g, std::vector<double> alpha, Target G) {
  return [g = std::move(g), alpha = std::move(alpha), G = std::move(G)](double x) {
    const double p[1] = {x};
    try {
      return residual_multiplicative(g, alpha, G, p);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

}  // namespace detail

/// Runtime form of a problem with evaluable targets.
struct PipelineInput {
  EquationForm form = EquationForm::Multiplicative;
  /// Coefficients of sum alpha_k f^k = F (exponents for the multiplicative form).
  std::vector<double> alpha;
  /// G on (0, inf) for half-line forms, F on the line otherwise.
  Target target;
  /// Pre-computed log o G o exp; derived from `target` when empty.
  std::optional<Target> line_target;
  Interval interval;
  std::optional<double> delta;
  std::optional<double> M;
  std::optional<double> anchor;
  SolverKind solver = SolverKind::Auto;
  SolverOptions options;
  /// Candidate for verification, on the problem's own axis.
  std::optional<GridFunction> candidate;
  /// Skip the second (uniqueness) contraction run.
  bool check_uniqueness = true;
};

namespace detail {

template <typename Fn>
auto staged(SolveReport& rep, const std::string& name, Fn&& fn) -> decltype(fn()) {
  rep.stages.push_back(name);
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(name);
  }
}

inline Target scaled(const Target& F, double s) {
  if (s == 1.0) return F;
  auto fn = F.fn;
  return {[fn, s](double x) { return fn(x) / s; }, F.seams, "(" + F.label + ")/" + GridFunction::fmt(s)};
}

inline std::vector<double> lambdas_from(const std::vector<double>& alpha) {
  std::vector<double> l;
  for (std::size_t k = 0; k + 1 < alpha.size(); ++k) l.push_back(-alpha[k] / alpha.back());
  return l;
}

struct Route {
  SolverKind kind = SolverKind::VerifyOnly;
  Side side = Side::AtLeft;
  std::string reason;
};

inline bool contraction_eligible(const std::vector<double>& alpha, const Target& F, Interval I, std::string& why) {
  for (double a : alpha)
    if (a < 0.0) {
      why = "negative exponent";
      return false;
    }
  const double s = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  if (s == 0.0) {
    why = "exponents sum to zero";
    return false;
  }
  const double a1 = alpha.front() / s;
  if (alpha.size() > 1 && !(a1 > 0.0 && a1 < 1.0)) {
    why = "alpha_1/sum = " + GridFunction::fmt(a1) + " outside (0, 1)";
    return false;
  }
  if (std::abs(F(I.lo) / s - I.lo) > kClassTolerance || std::abs(F(I.hi) / s - I.hi) > kClassTolerance) {
    why = "scaled F does not fix the endpoints of I";
    return false;
  }
  return true;
}

}  // namespace detail

/// Sewing on the line: returns a report with the core sewn solution extended to `window_line`.
inline SolveReport sew_on_line(const Target& H, const std::vector<double>& lambda, Interval I, Side side,
                               Interval window_line, const SolverOptions& opts, std::optional<double> x0_line,
                               const std::vector<double>& seeds_line) {
  SolveReport rep;
  rep.route = "sew";
  rep.probes = opts.probes;
  const Interval core = working_window(H, I);
  SolverOptions o = opts;
  o.x0 = x0_line;
  o.seeds = seeds_line;
  auto plan = make_plan(lambda, core, side, o);
  if (core.lo != I.lo || core.hi != I.hi)
    rep.warnings.push_back("interval clipped to the working window [" + GridFunction::fmt(core.lo) + ", " +
                           GridFunction::fmt(core.hi) + "]");

  rep.certificates.push_back({"target in R_{anchor,lambda}", certify_R_target(H, lambda, core, side, opts.grid)});
  if (!rep.certificates.back().cert.is_member())
    throw Error(ErrorCode::HypothesisViolation, "target is not in R_{" +
                                                    GridFunction::fmt(side == Side::AtLeft ? core.lo : core.hi) +
                                                    ", lambda} on the interval");
  const auto sewn = detail::staged(rep, "Solve(Sew)", [&] { return sew(plan, H); });
  const Interval sewn_dom = sewn.assembled.domain();
  rep.certificates.push_back(
      {"solution in R_{anchor,0}", check_R_class(sewn.assembled, sewn.anchor, 0.0, sewn_dom)});
  const auto core_probes = sewn_probes(sewn, plan.eps_seq, opts.probes);
  const double core_res = residual_lcp(sewn.assembled, lambda, H, core_probes);
  rep.bound_checks.push_back({"sewn residual on the core <= residual_tol", core_res, opts.residual_tol,
                              core_res <= opts.residual_tol});

  SewingSummary sum;
  sum.side = to_string(side);
  sum.x0 = sewn.x0;
  sum.seeds = sewn.seeds;
  sum.sequence = sewn.sequence;
  sum.pieces = sewn.pieces.size();
  sum.anchor = sewn.anchor;
  sum.working_window = core;
  sum.initial_pieces = plan.shape_label;
  rep.sewing = sum;

  const auto line = detail::staged(rep, "ExtendToLine", [&] {
    std::vector<double> seams;
    for (double s : H.seams)
      if (s > sewn_dom.lo && s < sewn_dom.hi) seams.push_back(s);
    const auto Fcore =
        GridFunction::sampled(H, merge_knots(uniform_knots(sewn_dom.lo, sewn_dom.hi, opts.grid), seams, 0.0));
    return extend_to_line(sewn, H, Fcore, window_line, std::max<std::size_t>(opts.grid, 4097));
  });
  rep.window = rep.window_line = window_line;
  rep.solution = rep.solution_line = line;
  rep.residual_poly = residual_lcp(line, lambda, H, probe_points(window_line.lo, window_line.hi, opts.probes));
  rep.grid = sewn.piece_knots;
  rep.converged = true;
  return rep;
}

inline SolveReport run_pipeline(const PipelineInput& in) {
  SolveReport rep;
  const bool half = in.form != EquationForm::PolynomialLike;
  const SolverOptions& opts = in.options;
  rep.probes = opts.probes;

  const auto alpha = detail::staged(rep, "Normalize", [&] {
    if (in.alpha.empty()) throw Error(ErrorCode::SchemaViolation, "no exponents");
    if (in.alpha.back() == 0.0) throw Error(ErrorCode::HypothesisViolation, "leading exponent alpha_n must be nonzero");
    if (half && !(in.interval.lo > 0.0))
      throw Error(ErrorCode::NonPositiveValues, "J must lie in (0, inf)");
    return in.alpha;
  });

  const Interval I = half ? Interval{std::log(in.interval.lo), std::log(in.interval.hi)} : in.interval;
  const Target F = detail::staged(rep, "ConjugateExpLog", [&] {
    if (!half) return in.target;
    return in.line_target ? *in.line_target : conj_explog_target(in.target);
  });
  const Interval window = opts.window.value_or(half ? Interval{in.interval.lo / 2.0, 2.0 * in.interval.hi} : I);
  if (half && !(window.lo > 0.0)) throw Error(ErrorCode::NonPositiveValues, "window must lie in (0, inf)");
  const Interval window_line = half ? Interval{std::log(window.lo), std::log(window.hi)} : window;
  auto to_line = [&](double v) { return half ? std::log(v) : v; };

  // Route selection.
  detail::Route route;
  const auto lambda = detail::lambdas_from(alpha);
  const double lsum = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  const Target H = detail::scaled(F, alpha.back());
  detail::staged(rep, "CertifyClasses", [&] {
    std::string why;
    SolverKind kind = in.solver;
    if (in.form == EquationForm::RootProblem && kind == SolverKind::Auto) kind = SolverKind::ConstructAtLeft;
    if (kind == SolverKind::Auto) {
      if (detail::contraction_eligible(alpha, F, I, why)) {
        route = {SolverKind::Contraction, Side::AtLeft, "exponents and target meet the contraction hypotheses"};
        return 0;
      }
      if (alpha.size() >= 2 && lsum >= 0.0 && lsum < 1.0) {
        for (Side s : {Side::AtLeft, Side::AtRight}) {
          if (in.anchor && to_line(*in.anchor) != (s == Side::AtLeft ? I.lo : I.hi)) continue;
          if (certify_R_target(H, lambda, I, s, opts.grid).is_member()) {
            route = {s == Side::AtLeft ? SolverKind::ConstructAtLeft : SolverKind::ConstructAtRight, s,
                     "contraction not applicable (" + why + "); target in R class with lambda in [0, 1)"};
            return 0;
          }
        }
      }
      route = {SolverKind::VerifyOnly, Side::AtLeft, "no constructive route applies (" + why + ")"};
      return 0;
    }
    route.kind = kind;
    if (kind == SolverKind::ConstructAtLeft || kind == SolverKind::ConstructAtRight) {
      route.side = kind == SolverKind::ConstructAtLeft ? Side::AtLeft : Side::AtRight;
      if (in.form == EquationForm::RootProblem && in.solver == SolverKind::Auto) {
        // A fixed point at the left or right end picks the side.
        const double Fa = F(I.lo), Fb = F(I.hi);
        if (std::abs(Fa - I.lo) <= kEndpointTolerance)
          route.side = Side::AtLeft;
        else if (std::abs(Fb - I.hi) <= kEndpointTolerance)
          route.side = Side::AtRight;
        else
          throw Error(ErrorCode::HypothesisViolation, "root problem: G fixes neither end of J");
        route.kind = route.side == Side::AtLeft ? SolverKind::ConstructAtLeft : SolverKind::ConstructAtRight;
      }
    }
    route.reason = "requested";
    return 0;
  });
  rep.warnings.push_back("route: " + to_string(route.kind) + " (" + route.reason + ")");

  std::vector<double> seeds_line;
  for (double s : opts.seeds) seeds_line.push_back(to_line(s));
  std::optional<double> x0_line;
  if (opts.x0) x0_line = to_line(*opts.x0);

  // h(x) = -g(-x) on the mirrored window, only under odd-integer exponents.
  auto extend_negative = [&](Interval win) {
    try {
      require_odd_integer_exponents(alpha);
    } catch (const Error&) {
      return;
    }
    detail::staged(rep, "NegationExtend", [&] {
      rep.solution_negative = extend_to_negative(*rep.solution, alpha);
      auto Gneg = [&](double x) { return -in.target(-x); };
      const auto probes = probe_points(-win.hi, -win.lo, opts.probes);
      rep.residual_negative = residual_multiplicative(*rep.solution_negative, alpha, Gneg, probes);
      return 0;
    });
  };

  std::vector<double> solve_alpha = alpha;  // coefficients the line solution satisfies
  Target solve_target = F;
  switch (route.kind) {
    case SolverKind::Contraction: {
      const auto norm = normalize_exponents(alpha);
      if (!in.delta || !in.M)
        throw Error(ErrorCode::HypothesisViolation, "the contraction route needs delta and M").with_stage("Solve");
      const Target Fn = detail::scaled(F, norm.scale);
      auto r = detail::staged(rep, "Solve(Contraction)", [&] {
        return picard_solve(Fn, norm.alpha, *in.delta, *in.M, I, opts, window_line, in.check_uniqueness);
      });
      r.stages = rep.stages;
      r.warnings.insert(r.warnings.begin(), rep.warnings.begin(), rep.warnings.end());
      rep = std::move(r);
      rep.normalization_scale = norm.scale;
      if (norm.scale != 1.0)
        rep.warnings.push_back("exponents divided by " + GridFunction::fmt(norm.scale) +
                               (half ? "; target replaced by G^(1/scale)" : "; target replaced by F/scale"));
      if (half) rep.stability_constant = stability_bound(in.interval.lo, in.interval.hi, *rep.constants);
      solve_alpha = norm.alpha;
      solve_target = Fn;
      break;
    }
    case SolverKind::ConstructAtLeft:
    case SolverKind::ConstructAtRight: {
      if (in.form == EquationForm::RootProblem) {
        // Root conditions on G, checked in log space (equivalent under exp).
        detail::staged(rep, "CertifyClasses", [&] {
          const auto pts = probe_points(I.lo, I.hi, opts.probes);
          const bool left = route.side == Side::AtLeft;
          const double Fa = F(I.lo), Fb = F(I.hi);
          auto fail = [&](const std::string& c) { throw Error(ErrorCode::HypothesisViolation, "root problem: " + c); };
          if (left && std::abs(Fa - I.lo) > kEndpointTolerance) fail("G(c) = c fails");
          if (!left && std::abs(Fb - I.hi) > kEndpointTolerance) fail("G(d) = d fails");
          if (left && !(Fb < I.hi)) fail("G(d) < d fails");
          if (!left && !(Fa > I.lo)) fail("G(c) > c fails");
          for (std::size_t i = 1; i < pts.size(); ++i)
            if (!(F(pts[i]) > F(pts[i - 1]))) fail("G is not strictly increasing on J near x = " + GridFunction::fmt(half ? std::exp(pts[i]) : pts[i]));
          for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            const double v = F(pts[i]);
            if (left ? !(v < pts[i]) : !(v > pts[i]))
              fail(std::string(left ? "G(x) < x" : "G(x) > x") + " fails at x = " +
                   GridFunction::fmt(half ? std::exp(pts[i]) : pts[i]));
          }
          const Interval range = left ? Interval{Fa, Fb} : Interval{Fa, Fb};
          for (double x : probe_points(window_line.lo, window_line.hi, opts.probes)) {
            const double v = F(x);
            if (v < range.lo - kEndpointTolerance || v > range.hi + kEndpointTolerance)
              fail("range of G differs from G(J) at x = " + GridFunction::fmt(half ? std::exp(x) : x));
          }
          return 0;
        });
      }
      if (!(lsum >= 0.0 && lsum < 1.0))
        throw Error(ErrorCode::HypothesisViolation, "lambda = " + GridFunction::fmt(lsum) +
                                                        " outside [0, 1); the construction does not apply")
            .with_stage("Solve(Sew)");
      auto r = sew_on_line(H, lambda, I, route.side, window_line, opts, x0_line, seeds_line);
      auto stages = rep.stages;
      stages.insert(stages.end(), r.stages.begin(), r.stages.end());
      r.stages = std::move(stages);
      r.warnings.insert(r.warnings.begin(), rep.warnings.begin(), rep.warnings.end());
      rep = std::move(r);
      rep.route = in.form == EquationForm::RootProblem ? "root" : "sew";
      rep.normalization_scale = alpha.back();
      // The sewn line solution satisfies f^n = sum lambda_k f^k + H, i.e. the lcp form.
      solve_alpha.assign(lambda.size() + 1, 0.0);
      for (std::size_t k = 0; k < lambda.size(); ++k) solve_alpha[k] = -lambda[k];
      solve_alpha.back() = 1.0;
      solve_target = H;
      break;
    }
    case SolverKind::VerifyOnly:
    case SolverKind::Auto: {
      if (!in.candidate)
        throw Error(ErrorCode::HypothesisViolation,
                    "no constructive route applies (lambda = " + GridFunction::fmt(lsum) +
                        "); supply a candidate solution to verify")
            .with_stage("Solve(Verify)");
      const GridFunction f = half ? conj_explog_fn(*in.candidate) : *in.candidate;
      const Interval vwin = opts.window ? window_line : I;
      auto r = detail::staged(rep, "Solve(Verify)", [&] {
        if (lsum <= 0.0) return verify_candidate_lambda_nonpos(f, lambda, H, I, opts, vwin);
        SolveReport v;
        v.route = "verify";
        v.window = v.window_line = vwin;
        v.solution = v.solution_line = f;
        v.residual_poly = residual_lcp(f, lambda, H, probe_points(vwin.lo, vwin.hi, opts.probes));
        v.bound_checks.push_back(
            {"residual <= residual_tol", v.residual_poly, opts.residual_tol, v.residual_poly <= opts.residual_tol});
        v.converged = v.residual_poly <= opts.residual_tol;
        v.warnings.push_back("lambda > 0: residual check only, no class certificate");
        return v;
      });
      r.stages = rep.stages;
      r.warnings.insert(r.warnings.begin(), rep.warnings.begin(), rep.warnings.end());
      rep = std::move(r);
      rep.normalization_scale = alpha.back();
      if (half) {
        rep.certificates.push_back({"target G^(1/alpha_n) in B_{1-lambda}",
                                    check_AB_class(GridFunction::sampled(
                                                       [&](double x) { return std::pow(in.target(x), 1.0 / alpha.back()); },
                                                       uniform_knots(in.interval.lo, in.interval.hi, opts.grid)),
                                                   1.0 - lsum, in.interval, true)});
        rep.certificates.push_back({"candidate g in B_1", check_AB_class(*in.candidate, 1.0, in.interval, true)});
      }
      rep.window = opts.window ? window : in.interval;
      solve_alpha.assign(lambda.size() + 1, 0.0);
      for (std::size_t k = 0; k < lambda.size(); ++k) solve_alpha[k] = -lambda[k];
      solve_alpha.back() = 1.0;
      solve_target = H;
      rep.residual_line_at = detail::pointwise_line(*rep.solution_line, solve_alpha, solve_target, 1.0);
      if (!half) {
        rep.residual_at = rep.residual_line_at;
        return rep;
      }
      rep.solution = *in.candidate;
      rep.residual_at = detail::pointwise_mult(*in.candidate, alpha, in.target);
      rep.stages.push_back("VerifyMultiplicative");
      const Interval mwin = opts.window ? window : in.interval;
      rep.residual_mult = residual_multiplicative(*in.candidate, alpha, in.target,
                                                  probe_points(mwin.lo, mwin.hi, opts.probes));
      extend_negative(mwin);
      return rep;
    }
  }

  rep.residual_line_at = detail::pointwise_line(*rep.solution_line, solve_alpha, solve_target, 1.0);
  if (!half) {
    rep.residual_at = rep.residual_line_at;
    return rep;
  }

  // Back to the half-line.
  const GridFunction line = *rep.solution_line;
  rep.window = window;
  rep.solution = detail::staged(rep, "ConjugateBack", [&] { return conj_back_sampled(line, window, opts.grid); });
  detail::staged(rep, "VerifyMultiplicative", [&] {
    const auto probes = probe_points(window.lo, window.hi, opts.probes);
    rep.residual_mult = residual_multiplicative(*rep.solution, alpha, in.target, probes);
    rep.residual_at = detail::pointwise_mult(*rep.solution, alpha, in.target);
    // Transport: |exp A - exp B| <= e^{max(A, B)} |A - B| with A - B = scale * (polynomial residual).
    const double s = std::abs(rep.normalization_scale);
    auto g_exact = [&](double x) { return std::exp(line.eval(std::log(x))); };
    const double lhs = residual_multiplicative(g_exact, alpha, in.target, probes);
    double logG = -std::numeric_limits<double>::infinity();
    std::vector<double> log_probes;
    for (double x : probes) {
      logG = std::max(logG, std::log(in.target(x)));
      log_probes.push_back(std::log(x));
    }
    const double r = residual_polynomial(line, solve_alpha, solve_target, log_probes) * s;
    const double rhs = std::exp(logG + r) * r;
    rep.bound_checks.push_back({"transport: multiplicative residual <= e^max(log G) * polynomial residual", lhs,
                                rhs + 1e-12, lhs <= rhs + 1e-12});
    rep.certificates.push_back({"solution g class", [&] {
                                  if (rep.route == "contraction")
                                    return check_G_class(*rep.solution, *in.delta, *in.M, in.interval);
                                  const double eta = rep.sewing ? std::exp(rep.sewing->anchor) : in.interval.lo;
                                  const Interval dom{std::exp(rep.solution_line->domain_lo()),
                                                     std::exp(rep.solution_line->domain_hi())};
                                  const Interval core{std::max(in.interval.lo, dom.lo), std::min(in.interval.hi, dom.hi)};
                                  return check_S_class(*rep.solution, eta, 0.0, core);
                                }()});
    return 0;
  });

  extend_negative(window);
  return rep;
}

/// Relative paths inside the problem (candidate, initial pieces) resolve against `base_dir`.
inline PipelineInput pipeline_input(const ProblemSpec& spec, const std::string& base_dir = "") {
  PipelineInput in;
  in.form = spec.form;
  in.alpha = spec.alphas();
  in.target = Target::from(spec.target);
  if (spec.on_half_line()) in.line_target = Target::from(conj_explog_target(spec.target));
  in.interval = spec.interval;
  in.delta = spec.delta;
  in.M = spec.M;
  in.anchor = spec.anchor;
  in.solver = spec.solver;
  in.options = spec.options;
  auto resolve = [&](const std::string& p) {
    if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
    return (std::filesystem::path(base_dir) / p).string();
  };
  in.options.initial_pieces = resolve(spec.options.initial_pieces);
  in.options.candidate = resolve(spec.options.candidate);
  if (!in.options.candidate.empty()) in.candidate = read_csv(in.options.candidate);
  return in;
}

inline SolveReport solve(const ProblemSpec& spec, const std::string& base_dir = "") {
  return run_pipeline(pipeline_input(spec, base_dir));
}

/// G1(x) = G(x) exp(eps sin(pi (log x - log c) / (log d - log c))) on J = [c, d], G elsewhere.
/// The factor is 1 at both ends, so G1 keeps the fixed points of G.
inline Target perturb_multiplicative(const Target& G, Interval J, double eps) {
  const double a = std::log(J.lo), b = std::log(J.hi);
  auto fn = G.fn;
  auto bump = [a, b, eps](double t) { return t > a && t < b ? eps * std::sin(std::numbers::pi * (t - a) / (b - a)) : 0.0; };
  return {[fn, bump](double x) { return fn(x) * std::exp(bump(std::log(x))); }, G.seams,
          "(" + G.label + ") * exp(" + GridFunction::fmt(eps) + " sin)"};
}

struct StabilityResult {
  SolveReport base;
  SolveReport perturbed;
  double eps = 0.0;
  BoundCheck check;
};

/// Solves the problem and its multiplicative eps-perturbation by contraction and
/// checks ||g - g1|| <= d/(c(K0-K2)) ||G - G1|| on J.
inline StabilityResult stability_run(PipelineInput in, double eps) {
  if (in.form != EquationForm::Multiplicative)
    throw Error(ErrorCode::HypothesisViolation, "the stability bound is stated for the multiplicative form");
  in.solver = SolverKind::Contraction;
  in.check_uniqueness = false;
  StabilityResult out;
  out.eps = eps;
  out.base = run_pipeline(in);
  PipelineInput p = in;
  p.target = perturb_multiplicative(in.target, in.interval, eps);
  const Target F = in.line_target ? *in.line_target : conj_explog_target(in.target);
  const double a = std::log(in.interval.lo), b = std::log(in.interval.hi);
  auto fn = F.fn;
  p.line_target = Target{[fn, a, b, eps](double t) {
                           return fn(t) + (t > a && t < b ? eps * std::sin(std::numbers::pi * (t - a) / (b - a)) : 0.0);
                         },
                         F.seams, "perturbed " + F.label};
  out.perturbed = run_pipeline(p);
  out.check = stability_check(out.base, out.perturbed, in.target, p.target, in.interval, in.options.probes);
  return out;
}

/// g^n = G on (0, inf) under the fixed-point conditions at c (AtLeft) or d (AtRight).
inline SolveReport solve_root(const Target& G, std::size_t n, Side side, Interval J, const SolverOptions& opts) {
  if (n < 2) throw Error(ErrorCode::HypothesisViolation, "root order must be at least 2");
  PipelineInput in;
  in.form = EquationForm::RootProblem;
  in.alpha.assign(n, 0.0);
  in.alpha.back() = 1.0;
  in.target = G;
  in.interval = J;
  in.solver = side == Side::AtLeft ? SolverKind::ConstructAtLeft : SolverKind::ConstructAtRight;
  in.options = opts;
  return run_pipeline(in);
}

}  // namespace iterfunc
