#pragma once

// Piecewise analytic expressions in one variable x:
//
//   target  := piece (';' piece)* [';']
//   piece   := 'on' open lo ',' hi close ':' expr
//   open    := '(' | '['        close := ')' | ']'
//   lo, hi  := constant expression, or inf / -inf
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ['^' unary]
//   primary := number | 'x' | 'e' | 'inf' | 'exp' '(' expr ')' | 'log' '(' expr ')' | '(' expr ')'

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "iterfunc/error.hpp"
#include "iterfunc/grid_function.hpp"

namespace iterfunc {

enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  double value = 0.0;
  NodePtr lhs;
  NodePtr rhs;
};

namespace ast {

inline NodePtr constant(double v) { return std::make_shared<const Node>(Node{Op::Const, v, nullptr, nullptr}); }
inline NodePtr var() { return std::make_shared<const Node>(Node{Op::Var, 0.0, nullptr, nullptr}); }
inline NodePtr unary(Op op, NodePtr a) { return std::make_shared<const Node>(Node{op, 0.0, std::move(a), nullptr}); }
inline NodePtr binary(Op op, NodePtr a, NodePtr b) {
  return std::make_shared<const Node>(Node{op, 0.0, std::move(a), std::move(b)});
}

inline bool is_const(const NodePtr& n) { return n->op == Op::Const; }
inline bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

inline bool equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  if (a->op == Op::Const) return a->value == b->value || (std::isnan(a->value) && std::isnan(b->value));
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

inline bool uses_var(const NodePtr& n) {
  if (!n) return false;
  if (n->op == Op::Var) return true;
  return uses_var(n->lhs) || uses_var(n->rhs);
}

[[noreturn]] inline void math_domain(const std::string& what) { throw Error(ErrorCode::MathDomain, what); }

inline double power(double base, double exponent) {
  if (base == 0.0 && exponent < 0.0) math_domain("0 raised to a negative power");
  if (base < 0.0 && exponent != std::floor(exponent)) math_domain("negative base with non-integer exponent");
  return std::pow(base, exponent);
}

inline double evaluate(const Node& n, double x) {
  double r = 0.0;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Add: r = evaluate(*n.lhs, x) + evaluate(*n.rhs, x); break;
    case Op::Sub: r = evaluate(*n.lhs, x) - evaluate(*n.rhs, x); break;
    case Op::Mul: r = evaluate(*n.lhs, x) * evaluate(*n.rhs, x); break;
    case Op::Div: {
      const double d = evaluate(*n.rhs, x);
      if (d == 0.0) math_domain("division by zero");
      r = evaluate(*n.lhs, x) / d;
      break;
    }
    case Op::Pow: r = power(evaluate(*n.lhs, x), evaluate(*n.rhs, x)); break;
    case Op::Neg: return -evaluate(*n.lhs, x);
    case Op::Exp: r = std::exp(evaluate(*n.lhs, x)); break;
    case Op::Log: {
      const double a = evaluate(*n.lhs, x);
      if (!(a > 0.0)) math_domain("log of nonpositive value " + GridFunction::fmt(a));
      r = std::log(a);
      break;
    }
  }
  if (std::isnan(r)) math_domain("undefined result");
  return r;
}

inline std::string render_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "(-inf)";
  const std::string s = GridFunction::fmt(v);
  return v < 0 || (v == 0.0 && std::signbit(v)) ? "(" + s + ")" : s;
}

/// Fully parenthesized infix form; parse(render(n)) reproduces n.
inline std::string render(const NodePtr& n) {
  switch (n->op) {
    case Op::Const: return render_number(n->value);
    case Op::Var: return "x";
    case Op::Add: return "(" + render(n->lhs) + " + " + render(n->rhs) + ")";
    case Op::Sub: return "(" + render(n->lhs) + " - " + render(n->rhs) + ")";
    case Op::Mul: return "(" + render(n->lhs) + " * " + render(n->rhs) + ")";
    case Op::Div: return "(" + render(n->lhs) + " / " + render(n->rhs) + ")";
    case Op::Pow: return "(" + render(n->lhs) + "^" + render(n->rhs) + ")";
    case Op::Neg: return "(-" + render(n->lhs) + ")";
    case Op::Exp: return "exp(" + render(n->lhs) + ")";
    case Op::Log: return "log(" + render(n->lhs) + ")";
  }
  return "?";
}

/// Replaces every x by `repl`.
inline NodePtr substitute(const NodePtr& n, const NodePtr& repl) {
  switch (n->op) {
    case Op::Const: return n;
    case Op::Var: return repl;
    case Op::Neg:
    case Op::Exp:
    case Op::Log: return unary(n->op, substitute(n->lhs, repl));
    default: return binary(n->op, substitute(n->lhs, repl), substitute(n->rhs, repl));
  }
}

/// Positive wherever it is defined: exp(.), positive constants, and products,
/// quotients and powers built from those.
inline bool provably_positive(const NodePtr& n) {
  switch (n->op) {
    case Op::Const: return n->value > 0.0;
    case Op::Exp: return true;
    case Op::Mul:
    case Op::Div: return provably_positive(n->lhs) && provably_positive(n->rhs);
    case Op::Pow: return provably_positive(n->lhs);
    case Op::Add: return provably_positive(n->lhs) && provably_positive(n->rhs);
    default: return false;
  }
}

/// Constant folding plus the log/exp identities valid on positive arguments.
inline NodePtr simplify(const NodePtr& n) {
  switch (n->op) {
    case Op::Const:
    case Op::Var: return n;
    case Op::Neg: {
      auto a = simplify(n->lhs);
      if (is_const(a)) return constant(-a->value);
      if (a->op == Op::Neg) return a->lhs;
      return unary(Op::Neg, a);
    }
    case Op::Exp: {
      auto a = simplify(n->lhs);
      if (is_const(a)) return constant(std::exp(a->value));
      if (a->op == Op::Log) return a->lhs;
      return unary(Op::Exp, a);
    }
    case Op::Log: {
      auto a = simplify(n->lhs);
      if (is_const(a) && a->value > 0.0) return constant(std::log(a->value));
      if (a->op == Op::Exp) return a->lhs;
      if (a->op == Op::Pow && provably_positive(a->lhs))
        return simplify(binary(Op::Mul, a->rhs, unary(Op::Log, a->lhs)));
      if ((a->op == Op::Mul) && provably_positive(a->lhs) && provably_positive(a->rhs))
        return simplify(binary(Op::Add, unary(Op::Log, a->lhs), unary(Op::Log, a->rhs)));
      if ((a->op == Op::Div) && provably_positive(a->lhs) && provably_positive(a->rhs))
        return simplify(binary(Op::Sub, unary(Op::Log, a->lhs), unary(Op::Log, a->rhs)));
      return unary(Op::Log, a);
    }
    default: break;
  }
  auto a = simplify(n->lhs);
  auto b = simplify(n->rhs);
  if (is_const(a) && is_const(b)) {
    try {
      return constant(evaluate(Node{n->op, 0.0, a, b}, 0.0));
    } catch (const Error&) {
      return binary(n->op, a, b);
    }
  }
  switch (n->op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Mul:
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
      break;
    case Op::Div:
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Pow:
      if (is_const(b, 1.0)) return a;
      if (a->op == Op::Exp) return simplify(unary(Op::Exp, binary(Op::Mul, b, a->lhs)));
      break;
    default: break;
  }
  return binary(n->op, a, b);
}

}  // namespace ast

struct Guard {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const {
    if (x < lo || x > hi) return false;
    if (x == lo && !lo_closed) return false;
    if (x == hi && !hi_closed) return false;
    return true;
  }
  friend bool operator==(const Guard&, const Guard&) = default;
};

struct Piece {
  Guard guard;
  NodePtr body;
};

inline constexpr double kSeamTolerance = 1e-12;

class PiecewiseExpr {
 public:
  PiecewiseExpr() = default;

  /// Validates ordering, overlap and seam continuity.
  explicit PiecewiseExpr(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw Error(ErrorCode::SyntaxError, "expression has no pieces");
    std::stable_sort(pieces_.begin(), pieces_.end(),
                     [](const Piece& a, const Piece& b) { return a.guard.lo < b.guard.lo; });
    for (const auto& p : pieces_)
      if (!(p.guard.lo < p.guard.hi) && !(p.guard.lo == p.guard.hi && p.guard.lo_closed && p.guard.hi_closed))
        throw Error(ErrorCode::GuardOverlap, "empty guard [" + GridFunction::fmt(p.guard.lo) + ", " +
                                                 GridFunction::fmt(p.guard.hi) + "]");
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      const auto& a = pieces_[i].guard;
      const auto& b = pieces_[i + 1].guard;
      if (a.hi > b.lo)
        throw Error(ErrorCode::GuardOverlap, "guards overlap between " + GridFunction::fmt(b.lo) + " and " +
                                                 GridFunction::fmt(a.hi));
      if (a.hi == b.lo && std::isfinite(a.hi)) check_seam(i);
    }
  }

  const std::vector<Piece>& pieces() const { return pieces_; }

  /// Finite guard endpoints, i.e. points where the active piece may change.
  std::vector<double> seams() const {
    std::vector<double> out;
    for (const auto& p : pieces_) {
      if (std::isfinite(p.guard.lo)) out.push_back(p.guard.lo);
      if (std::isfinite(p.guard.hi)) out.push_back(p.guard.hi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Interval covered() const { return {pieces_.front().guard.lo, pieces_.back().guard.hi}; }

  const Piece* active_piece(double x) const {
    for (const auto& p : pieces_)
      if (p.guard.contains(x)) return &p;
    return nullptr;
  }

  double eval(double x) const {
    const Piece* p = active_piece(x);
    if (!p) throw Error(ErrorCode::OutOfDomain, "no piece covers x = " + GridFunction::fmt(x));
    return ast::evaluate(*p->body, x);
  }

  double operator()(double x) const { return eval(x); }

  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto& g = pieces_[i].guard;
      if (i) out += " ; ";
      out += "on ";
      out += g.lo_closed ? '[' : '(';
      out += std::isinf(g.lo) ? (g.lo < 0 ? std::string("-inf") : std::string("inf")) : ast::render_number(g.lo);
      out += ", ";
      out += std::isinf(g.hi) ? (g.hi < 0 ? std::string("-inf") : std::string("inf")) : ast::render_number(g.hi);
      out += g.hi_closed ? ']' : ')';
      out += ": ";
      out += ast::render(pieces_[i].body);
    }
    return out;
  }

  friend bool operator==(const PiecewiseExpr& a, const PiecewiseExpr& b) {
    if (a.pieces_.size() != b.pieces_.size()) return false;
    for (std::size_t i = 0; i < a.pieces_.size(); ++i)
      if (!(a.pieces_[i].guard == b.pieces_[i].guard) || !ast::equal(a.pieces_[i].body, b.pieces_[i].body))
        return false;
    return true;
  }

 private:
  void check_seam(std::size_t i) const {
    const double s = pieces_[i].guard.hi;
    double left = 0.0, right = 0.0;
    try {
      left = ast::evaluate(*pieces_[i].body, s);
      right = ast::evaluate(*pieces_[i + 1].body, s);
    } catch (const Error&) {
      // A piece undefined at an open seam carries no continuity obligation there.
      if (pieces_[i].guard.hi_closed && pieces_[i + 1].guard.lo_closed) throw;
      return;
    }
    const double scale = std::max({1.0, std::abs(left), std::abs(right)});
    if (std::abs(left - right) > kSeamTolerance * scale)
      throw Error(ErrorCode::DiscontinuousSeam, "pieces disagree at x = " + GridFunction::fmt(s) + " (" +
                                                    GridFunction::fmt(left) + " vs " + GridFunction::fmt(right) + ")");
  }

  std::vector<Piece> pieces_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PiecewiseExpr parse_target() {
    std::vector<Piece> pieces;
    skip_ws();
    while (pos_ < text_.size()) {
      pieces.push_back(parse_piece());
      skip_ws();
      if (pos_ < text_.size()) {
        expect(';');
        skip_ws();
      }
    }
    if (pieces.empty()) fail("expected at least one piece");
    return PiecewiseExpr(std::move(pieces));
  }

  NodePtr parse_standalone() {
    auto n = parse_expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  Piece parse_piece() {
    if (!match_word("on")) fail("expected 'on'");
    skip_ws();
    Guard g;
    if (peek() == '[') g.lo_closed = true;
    else if (peek() != '(') fail("expected '(' or '['");
    ++pos_;
    g.lo = parse_bound();
    expect(',');
    g.hi = parse_bound();
    skip_ws();
    if (peek() == ']') g.hi_closed = true;
    else if (peek() != ')') fail("expected ')' or ']'");
    ++pos_;
    expect(':');
    if (std::isinf(g.lo)) g.lo_closed = false;
    if (std::isinf(g.hi)) g.hi_closed = false;
    return {g, parse_expr()};
  }

  double parse_bound() {
    const std::size_t start = pos_;
    auto n = parse_expr();
    if (ast::uses_var(n)) {
      pos_ = start;
      fail("guard bounds must be constant");
    }
    return ast::evaluate(*n, 0.0);
  }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      lhs = ast::binary(c == '+' ? Op::Add : Op::Sub, lhs, parse_term());
    }
  }

  NodePtr parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      lhs = ast::binary(c == '*' ? Op::Mul : Op::Div, lhs, parse_unary());
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      auto operand = parse_unary();
      // A negated literal is a negative constant so that rendering round-trips.
      if (operand->op == Op::Const) return ast::constant(-operand->value);
      return ast::unary(Op::Neg, operand);
    }
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      return ast::binary(Op::Pow, base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ast::constant(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "x") return ast::var();
      if (word == "e") return ast::constant(std::numbers::e);
      if (word == "inf") return ast::constant(std::numeric_limits<double>::infinity());
      if (word == "exp" || word == "log") {
        expect('(');
        auto arg = parse_expr();
        expect(')');
        return ast::unary(word == "exp" ? Op::Exp : Op::Log, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    if (pos_ >= text_.size()) fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  double parse_number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    const auto used = static_cast<std::size_t>(end - rest.c_str());
    if (used == 0) fail("malformed number");
    pos_ += used;
    return v;
  }

  bool match_word(std::string_view w) {
    if (text_.substr(pos_, w.size()) == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::SyntaxError,
                what + " at line " + std::to_string(line) + ", column " + std::to_string(col));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline PiecewiseExpr parse_expression(std::string_view text) { return detail::Parser(text).parse_target(); }

/// A single expression in x without guards, e.g. "2/3" or "x^2".
inline NodePtr parse_formula(std::string_view text) { return detail::Parser(text).parse_standalone(); }

/// Value of a constant formula such as "3/4" or "e".
inline double parse_constant(std::string_view text) {
  auto n = parse_formula(text);
  if (ast::uses_var(n)) throw Error(ErrorCode::SyntaxError, "expected a constant, got '" + std::string(text) + "'");
  return ast::evaluate(*n, 0.0);
}

inline double eval_expr(const PiecewiseExpr& e, double x) { return e.eval(x); }

/// Anything evaluable on the line together with its kink locations. Solvers
/// take Targets so that programmatic perturbations need not be expressible in
/// the grammar.
struct Target {
  std::function<double(double)> fn;
  std::vector<double> seams;
  std::string label;

  double operator()(double x) const { return fn(x); }

  static Target from(PiecewiseExpr e) {
    auto seams = e.seams();
    std::string label = e.render();
    auto shared = std::make_shared<const PiecewiseExpr>(std::move(e));
    return {[shared](double x) { return shared->eval(x); }, std::move(seams), std::move(label)};
  }
};

/// Samples onto `knot_count` uniform knots plus every seam inside the interval.
inline GridFunction sample(const Target& t, Interval interval, std::size_t knot_count,
                           Extension extension = Extension::ClampToEndpointValues) {
  std::vector<double> inner;
  for (double s : t.seams)
    if (s > interval.lo && s < interval.hi) inner.push_back(s);
  auto knots = merge_knots(uniform_knots(interval.lo, interval.hi, knot_count), inner,
                           0.25 / static_cast<double>(std::max<std::size_t>(knot_count, 2)));
  return GridFunction::sampled(t, std::move(knots), extension);
}

inline GridFunction sample(const PiecewiseExpr& e, Interval interval, std::size_t knot_count,
                           Extension extension = Extension::ClampToEndpointValues) {
  return sample(Target::from(e), interval, knot_count, extension);
}

}  // namespace iterfunc
