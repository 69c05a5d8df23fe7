#pragma once

// Changes of variable between the equation forms.
//
//   exp/log:  f = log o g o exp  turns prod (g^k)^{a_k} = G on (0,inf) into
//             sum a_k f^k = F on the line with F = log o G o exp
//   negation: h(x) = -g(-x) carries solutions on (0,inf) to (-inf,0) when the
//             exponents are integers with an odd sum
//   scaling:  a -> a / sum(a) together with G -> G^{1/sum(a)}

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "iterfunc/error.hpp"
#include "iterfunc/expression.hpp"
#include "iterfunc/grid_function.hpp"

namespace iterfunc {

enum class ConjugationKind { ExpLog, Negation };
enum class Direction { Forward, Backward };

/// Forward: knots and values go through log (g on J -> f on log J).
/// Backward: both go through exp.
inline GridFunction conj_explog_fn(const GridFunction& g, Direction dir = Direction::Forward) {
  std::vector<double> k, v;
  k.reserve(g.size());
  v.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x, y;
    if (dir == Direction::Forward) {
      if (!(g.knots()[i] > 0.0) || !(g.values()[i] > 0.0))
        throw Error(ErrorCode::NonPositiveValues,
                    "g must be positive on J (knot " + GridFunction::fmt(g.knots()[i]) + ")");
      x = std::log(g.knots()[i]);
      y = std::log(g.values()[i]);
    } else {
      x = std::exp(g.knots()[i]);
      y = std::exp(g.values()[i]);
    }
    // Knots closer than one ulp of the image collapse; keep the first.
    if (!k.empty() && !(x > k.back())) continue;
    k.push_back(x);
    v.push_back(y);
  }
  return GridFunction(std::move(k), std::move(v), g.extension(), g.monotone());
}

namespace detail {

inline double log_bound(double v) {
  if (v == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(v);
}

/// Points inside a guard at which a transformed body is spot-checked.
inline std::vector<double> guard_probes(const Guard& g) {
  double lo = std::isfinite(g.lo) ? g.lo : (std::isfinite(g.hi) ? std::min(g.hi, 0.0) - 40.0 : -40.0);
  double hi = std::isfinite(g.hi) ? g.hi : std::max(lo, 0.0) + 40.0;
  std::vector<double> out;
  for (int i = 0; i <= 32; ++i) {
    const double x = lo + (hi - lo) * i / 32.0;
    if (g.contains(x)) out.push_back(x);
  }
  return out;
}

}  // namespace detail

/// F(x) = log G(exp x) at the AST level. Pieces of G living on (-inf, 0] are
/// dropped, a piece straddling 0 is clipped to (0, hi].
inline PiecewiseExpr conj_explog_target(const PiecewiseExpr& G) {
  std::vector<Piece> out;
  const auto ex = ast::unary(Op::Exp, ast::var());
  for (const auto& p : G.pieces()) {
    if (p.guard.hi < 0.0 || (p.guard.hi == 0.0)) continue;
    Guard g;
    const bool clipped = p.guard.lo <= 0.0;
    g.lo = clipped ? -std::numeric_limits<double>::infinity() : detail::log_bound(p.guard.lo);
    g.lo_closed = !clipped && p.guard.lo_closed;
    g.hi = std::isinf(p.guard.hi) ? p.guard.hi : std::log(p.guard.hi);
    g.hi_closed = std::isfinite(g.hi) && p.guard.hi_closed;
    auto body = ast::simplify(ast::unary(Op::Log, ast::substitute(p.body, ex)));
    for (double x : detail::guard_probes(g)) {
      try {
        (void)ast::evaluate(*body, x);
      } catch (const Error&) {
        throw Error(ErrorCode::MathDomain, "G is not positive at x = " + GridFunction::fmt(std::exp(x)) +
                                               "; log G(exp x) is undefined");
      }
    }
    out.push_back({g, std::move(body)});
  }
  if (out.empty()) throw Error(ErrorCode::MathDomain, "G has no piece on (0, inf)");
  return PiecewiseExpr(std::move(out));
}

/// Same transform for an opaque target.
inline Target conj_explog_target(const Target& G) {
  std::vector<double> seams;
  for (double s : G.seams)
    if (s > 0.0) seams.push_back(std::log(s));
  auto fn = G.fn;
  return {[fn](double x) {
            const double v = fn(std::exp(x));
            if (!(v > 0.0))
              throw Error(ErrorCode::MathDomain, "G is not positive at " + GridFunction::fmt(std::exp(x)));
            return std::log(v);
          },
          std::move(seams), "log o (" + G.label + ") o exp"};
}

/// G(x) = exp F(log x), the inverse of conj_explog_target on opaque targets.
inline Target conj_explog_target_back(const Target& F) {
  std::vector<double> seams;
  for (double s : F.seams) seams.push_back(std::exp(s));
  auto fn = F.fn;
  return {[fn](double x) {
            if (!(x > 0.0)) throw Error(ErrorCode::OutOfDomain, "x must be positive");
            return std::exp(fn(std::log(x)));
          },
          std::move(seams), "exp o (" + F.label + ") o log"};
}

inline bool is_integer(double v) { return std::isfinite(v) && v == std::round(v); }

/// Prop-style gate: integer exponents with an odd sum.
inline void require_odd_integer_exponents(const std::vector<double>& exponents) {
  for (double a : exponents)
    if (!is_integer(a))
      throw Error(ErrorCode::ParityViolation,
                  "exponent " + GridFunction::fmt(a) +
                      " is not an integer; negative arguments would need complex powers");
  const double sum = std::accumulate(exponents.begin(), exponents.end(), 0.0);
  if (std::fmod(std::abs(sum), 2.0) != 1.0)
    throw Error(ErrorCode::ParityViolation, "sum of exponents " + GridFunction::fmt(sum) + " is even");
}

/// h(x) = -g(-x) on -J.
inline GridFunction conj_negation(const GridFunction& g, const std::vector<double>& exponents) {
  require_odd_integer_exponents(exponents);
  const std::size_t n = g.size();
  std::vector<double> k(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = -g.knots()[n - 1 - i];
    v[i] = -g.values()[n - 1 - i];
  }
  return GridFunction(std::move(k), std::move(v), g.extension(), g.monotone());
}

struct NormalizedExponents {
  std::vector<double> alpha;
  double scale = 1.0;
};

inline NormalizedExponents normalize_exponents(const std::vector<double>& alpha) {
  const double sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  if (sum == 0.0 || !std::isfinite(sum)) throw Error(ErrorCode::ZeroSum, "sum of exponents is zero");
  NormalizedExponents out{alpha, sum};
  if (sum != 1.0)
    for (double& a : out.alpha) a /= sum;
  return out;
}

/// G -> G^{1/scale} on each piece.
inline PiecewiseExpr scale_target_multiplicative(const PiecewiseExpr& G, double scale) {
  if (scale == 1.0) return G;
  std::vector<Piece> out;
  for (const auto& p : G.pieces())
    out.push_back({p.guard, ast::simplify(ast::binary(Op::Pow, p.body, ast::constant(1.0 / scale)))});
  return PiecewiseExpr(std::move(out));
}

/// F -> F / scale on each piece.
inline PiecewiseExpr scale_target_additive(const PiecewiseExpr& F, double scale) {
  if (scale == 1.0) return F;
  std::vector<Piece> out;
  for (const auto& p : F.pieces())
    out.push_back({p.guard, ast::simplify(ast::binary(Op::Div, p.body, ast::constant(scale)))});
  return PiecewiseExpr(std::move(out));
}

}  // namespace iterfunc
