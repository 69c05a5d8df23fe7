#pragma once

// Membership certificates for the function classes used by the solvers.
//
//   F_I(delta, M)   range I, fixes a and b, delta*(x-y) <= f(x)-f(y) <= M*(x-y) on I
//   G_J(delta, M)   the multiplicative analogue on J, checked in log space
//   R_{zeta,lambda} strictly increasing on the interval, sign conditions (A1), (A2)
//   S_{eta,lambda}  the half-line analogue (B1), (B2), checked in log space
//   A_lambda        strictly increasing, f(a) = lambda*a, f(b) = lambda*b
//   B_lambda        strictly increasing, g(c) = c^lambda, g(d) = d^lambda
//
// Candidates are piecewise linear, so the two-sided Lipschitz conditions are
// exact when checked on consecutive knot pairs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "iterfunc/error.hpp"
#include "iterfunc/grid_function.hpp"

namespace iterfunc {

enum class ClassKind { F_I, G_J, R_zeta_lambda, S_eta_lambda, A_lambda, B_lambda };
enum class Verdict { Member, NotMember, Degenerate };
enum class Degeneracy { Empty, IdentityOnly, Proper };

inline std::string to_string(ClassKind k) {
  switch (k) {
    case ClassKind::F_I: return "F_I";
    case ClassKind::G_J: return "G_J";
    case ClassKind::R_zeta_lambda: return "R_zeta_lambda";
    case ClassKind::S_eta_lambda: return "S_eta_lambda";
    case ClassKind::A_lambda: return "A_lambda";
    case ClassKind::B_lambda: return "B_lambda";
  }
  return "?";
}

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Member: return "Member";
    case Verdict::NotMember: return "NotMember";
    case Verdict::Degenerate: return "Degenerate";
  }
  return "?";
}

inline std::string to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::Empty: return "Empty";
    case Degeneracy::IdentityOnly: return "IdentityOnly";
    case Degeneracy::Proper: return "Proper";
  }
  return "?";
}

struct ClassSpec {
  ClassKind kind = ClassKind::F_I;
  Interval interval;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double M = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double anchor = std::numeric_limits<double>::quiet_NaN();
};

struct Witness {
  double x = 0.0;
  /// Second point of a violated pair; NaN for point conditions.
  double y = std::numeric_limits<double>::quiet_NaN();
  std::string condition;
  double measured = 0.0;
  /// Within the strictness margin rather than clearly on the wrong side.
  bool boundary = false;
};

struct ClassCertificate {
  ClassSpec spec;
  Verdict verdict = Verdict::Member;
  Degeneracy degeneracy = Degeneracy::Proper;
  std::vector<Witness> witnesses;
  std::size_t probes = 0;

  bool is_member() const { return verdict == Verdict::Member; }
};

inline constexpr double kEndpointTolerance = 1e-10;
inline constexpr double kStrictMargin = 1e-12;
inline constexpr std::size_t kMaxWitnesses = 8;

/// Emptiness and identity-only rules for G_J(delta, M) (and F_I).
inline Degeneracy degenerate_rule(double delta, double M) {
  if (M < 1.0 || delta > 1.0) return Degeneracy::Empty;
  if (M == 1.0 || delta == 1.0) return Degeneracy::IdentityOnly;
  return Degeneracy::Proper;
}

namespace detail {

inline void add_witness(ClassCertificate& cert, Witness w) {
  cert.verdict = Verdict::NotMember;
  if (cert.witnesses.size() < kMaxWitnesses) cert.witnesses.push_back(std::move(w));
}

/// Knots of f inside the interval plus the interval endpoints.
inline std::vector<double> probes_in(const GridFunction& f, Interval I) {
  std::vector<double> pts{I.lo, I.hi};
  for (double k : f.knots())
    if (k > I.lo && k < I.hi) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  return pts;
}

inline bool covers(const GridFunction& f, Interval I) {
  return f.extension() == Extension::ClampToEndpointValues ||
         (f.domain_lo() <= I.lo && f.domain_hi() >= I.hi);
}

inline void check_strictly_increasing(ClassCertificate& cert, const GridFunction& f, const std::vector<double>& pts) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d = f.eval(pts[i + 1]) - f.eval(pts[i]);
    if (!(d > 0.0))
      add_witness(cert, {pts[i], pts[i + 1], "strictly increasing: f(y) - f(x) > 0", d, d > -kStrictMargin});
  }
}

}  // namespace detail

inline ClassCertificate check_F_class(const GridFunction& f, double delta, double M, Interval I,
                                      double tol = kEndpointTolerance) {
  ClassCertificate cert;
  cert.spec = {ClassKind::F_I, I, delta, M};
  cert.degeneracy = degenerate_rule(delta, M);
  if (cert.degeneracy == Degeneracy::Empty) {
    cert.verdict = Verdict::Degenerate;
    cert.witnesses.push_back({delta, M, "class is empty: M < 1 or delta > 1", M < 1.0 ? M : delta, false});
    return cert;
  }
  if (!detail::covers(f, I)) {
    detail::add_witness(cert, {I.lo, I.hi, "function is not defined on all of I", 0.0, false});
    return cert;
  }
  const auto pts = detail::probes_in(f, I);
  cert.probes = pts.size();

  const double fa = f.eval(I.lo), fb = f.eval(I.hi);
  if (std::abs(fa - I.lo) > tol) detail::add_witness(cert, {I.lo, NAN, "f(a) = a", fa, false});
  if (std::abs(fb - I.hi) > tol) detail::add_witness(cert, {I.hi, NAN, "f(b) = b", fb, false});

  // Range over the whole line, using the declared extension.
  const auto span = f.value_span();
  if (span.lo < I.lo - tol || span.hi > I.hi + tol)
    detail::add_witness(cert, {span.lo, span.hi, "range of f equals I", span.lo < I.lo - tol ? span.lo : span.hi,
                               false});

  const double slope_tol = 1e-9;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double dx = pts[i + 1] - pts[i];
    const double s = (f.eval(pts[i + 1]) - f.eval(pts[i])) / dx;
    if (s < delta - slope_tol)
      detail::add_witness(cert, {pts[i], pts[i + 1], "delta*(x-y) <= f(x)-f(y)", s, s > delta - 2 * slope_tol});
    if (s > M + slope_tol)
      detail::add_witness(cert, {pts[i], pts[i + 1], "f(x)-f(y) <= M*(x-y)", s, s < M + 2 * slope_tol});
  }
  return cert;
}

/// Conjugates to log space: knots log x, values log g(x).
inline GridFunction log_conjugate(const GridFunction& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(g.knots()[i] > 0.0) || !(g.values()[i] > 0.0))
      throw Error(ErrorCode::NonPositiveValues, "log conjugation needs positive knots and values (index " +
                                                    std::to_string(i) + ")");
  std::vector<double> k, v;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = std::log(g.knots()[i]);
    if (!k.empty() && !(x > k.back())) continue;  // log collapsed two knots near 1
    k.push_back(x);
    v.push_back(std::log(g.values()[i]));
  }
  return GridFunction(std::move(k), std::move(v), g.extension(), g.monotone());
}

inline ClassCertificate check_G_class(const GridFunction& g, double delta, double M, Interval J,
                                      double tol = kEndpointTolerance) {
  if (!(J.lo > 0.0)) throw Error(ErrorCode::NonPositiveValues, "J must lie in (0, inf)");
  auto cert = check_F_class(log_conjugate(g), delta, M, {std::log(J.lo), std::log(J.hi)}, tol);
  cert.spec.kind = ClassKind::G_J;
  cert.spec.interval = J;
  return cert;
}

enum class AnchorSide { Left, Right };

/// R_{anchor,lambda} on the line: strictly increasing on the interval and (A1), (A2).
inline ClassCertificate check_R_class(const GridFunction& f, double anchor, double lambda, Interval interval,
                                      std::size_t extra_probes = 0) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw Error(ErrorCode::HypothesisViolation,
                "lambda = " + GridFunction::fmt(lambda) + " outside [0, 1); the class may be empty for lambda >= 1");
  if (!(anchor >= interval.lo && anchor <= interval.hi))
    throw Error(ErrorCode::HypothesisViolation, "anchor outside the closure of the interval");
  ClassCertificate cert;
  cert.spec = {ClassKind::R_zeta_lambda, interval, NAN, NAN, lambda, anchor};
  if (!detail::covers(f, interval)) {
    detail::add_witness(cert, {interval.lo, interval.hi, "function is not defined on the interval", 0.0, false});
    return cert;
  }
  auto pts = detail::probes_in(f, interval);
  if (extra_probes > 1) {
    auto dense = uniform_knots(interval.lo, interval.hi, extra_probes);
    pts = merge_knots(pts, dense, 0.0);
  }
  cert.probes = pts.size();
  detail::check_strictly_increasing(cert, f, pts);
  const double slope_line = 1.0 - lambda;
  for (double x : pts) {
    if (std::abs(x - anchor) <= kStrictMargin) continue;
    const double fx = f.eval(x);
    const double side = anchor - x;
    // (A1): f(x) - (1-lambda) x has the sign of (anchor - x).
    const double a1 = (fx - slope_line * x) * (side > 0 ? 1.0 : -1.0);
    if (!(a1 > kStrictMargin))
      detail::add_witness(cert, {x, NAN, "(f(x) - (1-lambda) x)(zeta - x) > 0", a1, a1 > -kStrictMargin});
    // (A2): f(x) - (1-lambda) anchor has the sign of (x - anchor).
    const double a2 = (fx - slope_line * anchor) * (side > 0 ? -1.0 : 1.0);
    if (!(a2 > kStrictMargin))
      detail::add_witness(cert, {x, NAN, "(f(x) - (1-lambda) zeta)(zeta - x) < 0", a2, a2 > -kStrictMargin});
  }
  return cert;
}

/// S_{anchor,lambda} on the half-line, via log conjugation.
inline ClassCertificate check_S_class(const GridFunction& g, double anchor, double lambda, Interval J,
                                      std::size_t extra_probes = 0) {
  if (!(J.lo > 0.0) || !(anchor > 0.0)) throw Error(ErrorCode::NonPositiveValues, "J and anchor must be positive");
  auto cert = check_R_class(log_conjugate(g), std::log(anchor), lambda, {std::log(J.lo), std::log(J.hi)},
                            extra_probes);
  cert.spec.kind = ClassKind::S_eta_lambda;
  cert.spec.interval = J;
  cert.spec.anchor = anchor;
  return cert;
}

/// Dispatches R (line) or S (half-line) checks.
inline ClassCertificate check_RS_class(const GridFunction& f, double anchor, double lambda, Interval interval,
                                       bool half_line = false) {
  return half_line ? check_S_class(f, anchor, lambda, interval) : check_R_class(f, anchor, lambda, interval);
}

/// A_lambda on the line (half_line = false) or B_lambda on the half-line.
inline ClassCertificate check_AB_class(const GridFunction& f, double lambda, Interval interval, bool half_line = false,
                                       double tol = kEndpointTolerance) {
  ClassCertificate cert;
  cert.spec = {half_line ? ClassKind::B_lambda : ClassKind::A_lambda, interval, NAN, NAN, lambda, NAN};
  if (half_line && !(interval.lo > 0.0)) throw Error(ErrorCode::NonPositiveValues, "J must lie in (0, inf)");
  if (!detail::covers(f, interval)) {
    detail::add_witness(cert, {interval.lo, interval.hi, "function is not defined on the interval", 0.0, false});
    return cert;
  }
  const auto pts = detail::probes_in(f, interval);
  cert.probes = pts.size();
  detail::check_strictly_increasing(cert, f, pts);
  auto target = [&](double x) { return half_line ? std::pow(x, lambda) : lambda * x; };
  const char* lo_cond = half_line ? "g(c) = c^lambda" : "f(a) = lambda*a";
  const char* hi_cond = half_line ? "g(d) = d^lambda" : "f(b) = lambda*b";
  const double flo = f.eval(interval.lo), fhi = f.eval(interval.hi);
  if (std::abs(flo - target(interval.lo)) > tol) detail::add_witness(cert, {interval.lo, NAN, lo_cond, flo, false});
  if (std::abs(fhi - target(interval.hi)) > tol) detail::add_witness(cert, {interval.hi, NAN, hi_cond, fhi, false});
  return cert;
}

}  // namespace iterfunc
