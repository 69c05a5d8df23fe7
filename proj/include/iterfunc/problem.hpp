#pragma once

// Problem files: `key = value` lines, `#` comments, and one target block
//
//   target:
//     on (0,1]: 1 ;
//     on [1,e]: exp((1+log(x))*log(x)/2) ;
//     on [e,inf): e
//   end
//
// Numeric values accept constant expressions ("2/3", "e", "1e-10").

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iterfunc/error.hpp"
#include "iterfunc/expression.hpp"
#include "iterfunc/grid_function.hpp"

namespace iterfunc {

enum class EquationForm { Multiplicative, PolynomialLike, RootProblem };
enum class SolverKind { Auto, Contraction, ConstructAtLeft, ConstructAtRight, VerifyOnly };

inline std::string to_string(EquationForm f) {
  switch (f) {
    case EquationForm::Multiplicative: return "multiplicative";
    case EquationForm::PolynomialLike: return "polynomial";
    case EquationForm::RootProblem: return "root";
  }
  return "?";
}

inline std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Auto: return "auto";
    case SolverKind::Contraction: return "contraction";
    case SolverKind::ConstructAtLeft: return "construct-left";
    case SolverKind::ConstructAtRight: return "construct-right";
    case SolverKind::VerifyOnly: return "verify";
  }
  return "?";
}

struct SolverOptions {
  std::size_t grid = kDefaultGridSize;
  double tol = 1e-10;
  std::size_t max_iter = 200;
  std::size_t probes = kDefaultProbeCount;
  /// Report window; on the half-line by default [c/2, 2d].
  std::optional<Interval> window;
  /// Sewing: starting point x0 and seeds x1..x_{n-1}.
  std::optional<double> x0;
  std::vector<double> seeds;
  std::size_t piece_knots = 513;
  double eps_seq = 1e-8;
  /// Residual acceptance threshold for verification.
  double residual_tol = 1e-6;
  /// Path to a CSV holding a normalized initial piece shape on [0,1].
  std::string initial_pieces;
  /// Path to a candidate solution for verification.
  std::string candidate;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

/// One equation instance.
///
/// Multiplicative: prod_k (g^k)^{exponents[k-1]} = target on (0, inf), interval is J.
/// PolynomialLike: f^n = sum_k exponents[k-1] f^k + target on the line, interval is I.
/// RootProblem:    g^order = target on (0, inf), interval is J.
struct ProblemSpec {
  EquationForm form = EquationForm::Multiplicative;
  std::vector<double> exponents;
  std::size_t order = 0;
  PiecewiseExpr target;
  Interval interval;
  std::optional<double> delta;
  std::optional<double> M;
  std::optional<double> anchor;
  SolverKind solver = SolverKind::Auto;
  SolverOptions options;

  /// Coefficients alpha_1..alpha_n of sum_k alpha_k f^k = F for every form.
  std::vector<double> alphas() const {
    switch (form) {
      case EquationForm::Multiplicative: return exponents;
      case EquationForm::PolynomialLike: {
        std::vector<double> a;
        for (double l : exponents) a.push_back(-l);
        a.push_back(1.0);
        return a;
      }
      case EquationForm::RootProblem: {
        std::vector<double> a(order, 0.0);
        if (!a.empty()) a.back() = 1.0;
        return a;
      }
    }
    return {};
  }

  bool on_half_line() const { return form != EquationForm::PolynomialLike; }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void schema(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "field `" + field + "`: " + what);
}

inline double field_number(const std::string& field, const std::string& text) {
  try {
    return parse_constant(text);
  } catch (const Error& e) {
    schema(field, "not a number (" + std::string(e.what()) + ")");
  }
}

inline std::size_t field_count(const std::string& field, const std::string& text) {
  const double v = field_number(field, text);
  if (!(v >= 0) || v != std::floor(v)) schema(field, "expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

/// "[a, b, c]" with constant-expression entries.
inline std::vector<double> field_list(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') schema(field, "expected a bracketed list like [3/4, 1/4]");
  std::vector<double> out;
  std::string inner = t.substr(1, t.size() - 2);
  if (trim(inner).empty()) return out;
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) schema(field, "empty list entry");
    out.push_back(field_number(field, trim(item)));
  }
  return out;
}

inline Interval field_interval(const std::string& field, const std::string& text) {
  auto v = field_list(field, text);
  if (v.size() != 2 || !(v[0] < v[1])) schema(field, "expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

inline std::string render_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return GridFunction::fmt(v);
}

}  // namespace detail

inline ProblemSpec parse_problem(const std::string& text) {
  using namespace detail;
  ProblemSpec spec;
  std::map<std::string, std::string> kv;
  std::string target_text;
  bool in_target = false, have_target = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (in_target) {
      if (trim(raw) == "end") {
        in_target = false;
        continue;
      }
      target_text += raw + "\n";
      continue;
    }
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line == "target:") {
      in_target = have_target = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::SchemaViolation, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "target") {
      target_text = value;
      have_target = true;
      continue;
    }
    if (kv.count(key)) schema(key, "given twice");
    kv[key] = value;
  }
  if (in_target) schema("target", "block not terminated by `end`");
  if (!have_target) schema("target", "missing");
  try {
    spec.target = parse_expression(target_text);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SyntaxError) throw Error(ErrorCode::SyntaxError, "in `target`: " + std::string(e.what()));
    throw;
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  const auto form = take("form");
  if (!form) schema("form", "missing");
  if (*form == "multiplicative") spec.form = EquationForm::Multiplicative;
  else if (*form == "polynomial") spec.form = EquationForm::PolynomialLike;
  else if (*form == "root") spec.form = EquationForm::RootProblem;
  else schema("form", "expected multiplicative | polynomial | root");

  if (auto v = take("exponents")) spec.exponents = field_list("exponents", *v);
  if (auto v = take("order")) spec.order = field_count("order", *v);
  if (spec.form == EquationForm::RootProblem) {
    if (spec.order < 2) schema("order", "root problems need order >= 2");
    if (!spec.exponents.empty()) schema("exponents", "not used by root problems");
  } else if (spec.form == EquationForm::Multiplicative) {
    if (spec.exponents.empty()) schema("exponents", "missing or empty");
    if (spec.exponents.back() == 0.0) schema("exponents", "the last exponent must be nonzero");
  } else if (spec.exponents.empty() && !kv.count("order")) {
    schema("exponents", "missing (give [] for f^n = F together with `order`)");
  }

  const auto interval = take("interval");
  if (!interval) schema("interval", "missing");
  spec.interval = field_interval("interval", *interval);
  if (spec.on_half_line() && !(spec.interval.lo > 0.0)) schema("interval", "must lie in (0, inf) for this form");

  if (auto v = take("delta")) spec.delta = field_number("delta", *v);
  if (auto v = take("M")) spec.M = field_number("M", *v);
  if (auto v = take("anchor")) spec.anchor = field_number("anchor", *v);

  if (auto v = take("solver")) {
    if (*v == "auto") spec.solver = SolverKind::Auto;
    else if (*v == "contraction") spec.solver = SolverKind::Contraction;
    else if (*v == "construct-left") spec.solver = SolverKind::ConstructAtLeft;
    else if (*v == "construct-right") spec.solver = SolverKind::ConstructAtRight;
    else if (*v == "verify") spec.solver = SolverKind::VerifyOnly;
    else schema("solver", "expected auto | contraction | construct-left | construct-right | verify");
  }

  auto& o = spec.options;
  if (auto v = take("grid")) o.grid = field_count("grid", *v);
  if (auto v = take("tol")) o.tol = field_number("tol", *v);
  if (auto v = take("max_iter")) o.max_iter = field_count("max_iter", *v);
  if (auto v = take("probes")) o.probes = field_count("probes", *v);
  if (auto v = take("window")) o.window = field_interval("window", *v);
  if (auto v = take("x0")) o.x0 = field_number("x0", *v);
  if (auto v = take("seeds")) o.seeds = field_list("seeds", *v);
  if (auto v = take("piece_knots")) o.piece_knots = field_count("piece_knots", *v);
  if (auto v = take("eps_seq")) o.eps_seq = field_number("eps_seq", *v);
  if (auto v = take("residual_tol")) o.residual_tol = field_number("residual_tol", *v);
  if (auto v = take("initial_pieces")) o.initial_pieces = *v;
  if (auto v = take("candidate")) o.candidate = *v;
  if (spec.form == EquationForm::PolynomialLike && o.grid < 2) schema("grid", "must be at least 2");
  if (o.grid < 2) schema("grid", "must be at least 2");

  if (spec.form == EquationForm::PolynomialLike && spec.exponents.empty() && spec.order >= 2)
    spec.exponents.assign(spec.order - 1, 0.0);

  if (!kv.empty()) schema(kv.begin()->first, "unknown field");
  return spec;
}

inline std::string render_problem(const ProblemSpec& spec) {
  using detail::render_value;
  std::ostringstream out;
  auto list = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + render_value(v[i]);
    return s + "]";
  };
  out << "form = " << to_string(spec.form) << '\n';
  if (spec.form != EquationForm::RootProblem) out << "exponents = " << list(spec.exponents) << '\n';
  if (spec.order) out << "order = " << spec.order << '\n';
  out << "interval = [" << render_value(spec.interval.lo) << ", " << render_value(spec.interval.hi) << "]\n";
  if (spec.delta) out << "delta = " << render_value(*spec.delta) << '\n';
  if (spec.M) out << "M = " << render_value(*spec.M) << '\n';
  if (spec.anchor) out << "anchor = " << render_value(*spec.anchor) << '\n';
  out << "solver = " << to_string(spec.solver) << '\n';
  const auto& o = spec.options;
  out << "grid = " << o.grid << '\n';
  out << "tol = " << render_value(o.tol) << '\n';
  out << "max_iter = " << o.max_iter << '\n';
  out << "probes = " << o.probes << '\n';
  if (o.window) out << "window = [" << render_value(o.window->lo) << ", " << render_value(o.window->hi) << "]\n";
  if (o.x0) out << "x0 = " << render_value(*o.x0) << '\n';
  if (!o.seeds.empty()) out << "seeds = " << list(o.seeds) << '\n';
  out << "piece_knots = " << o.piece_knots << '\n';
  out << "eps_seq = " << render_value(o.eps_seq) << '\n';
  out << "residual_tol = " << render_value(o.residual_tol) << '\n';
  if (!o.initial_pieces.empty()) out << "initial_pieces = " << o.initial_pieces << '\n';
  if (!o.candidate.empty()) out << "candidate = " << o.candidate << '\n';
  out << "target:\n";
  for (const auto& p : spec.target.pieces()) {
    PiecewiseExpr single(std::vector<Piece>{p});
    out << "  " << single.render() << (&p == &spec.target.pieces().back() ? "" : " ;") << '\n';
  }
  out << "end\n";
  return out.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << text;
}

inline ProblemSpec load_problem(const std::string& path) { return parse_problem(read_text_file(path)); }

inline void write_problem(const ProblemSpec& spec, const std::string& path) {
  write_text_file(path, render_problem(spec));
}

}  // namespace iterfunc
