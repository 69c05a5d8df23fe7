#pragma once

// Result records shared by the solvers, plus JSON and CSV output.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iterfunc/classes.hpp"
#include "iterfunc/error.hpp"
#include "iterfunc/grid_function.hpp"

namespace iterfunc {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Lipschitz data of L_f and the operator f -> L_f.
struct Constants {
  double K0 = kNaN;
  double K1 = kNaN;
  double K2 = kNaN;
  double contraction_factor = kNaN;
};

struct NamedCertificate {
  std::string name;
  ClassCertificate cert;
};

struct BoundCheck {
  std::string name;
  double lhs = kNaN;
  double rhs = kNaN;
  bool pass = false;
};

struct SweepRecord {
  std::size_t iteration = 0;
  double gap = kNaN;
  bool member = false;
  double slope_lo = kNaN;
  double slope_hi = kNaN;
};

struct SewingSummary {
  std::string side;
  double x0 = kNaN;
  std::vector<double> seeds;
  std::vector<double> sequence;
  std::size_t pieces = 0;
  double anchor = kNaN;
  Interval working_window;
  std::string initial_pieces;
};

struct SolveReport {
  std::string route;
  std::vector<std::string> stages;
  /// Solution on the problem's own axis (the half-line for multiplicative forms).
  std::optional<GridFunction> solution;
  /// Log-conjugate on the line; equals `solution` for polynomial-like problems.
  std::optional<GridFunction> solution_line;
  /// h(x) = -g(-x) when the exponents allow it.
  std::optional<GridFunction> solution_negative;
  std::optional<Constants> constants;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> gap_trace;
  std::vector<SweepRecord> sweeps;
  double residual_poly = kNaN;
  double residual_mult = kNaN;
  double residual_negative = kNaN;
  Interval window;
  Interval window_line;
  std::vector<NamedCertificate> certificates;
  std::vector<BoundCheck> bound_checks;
  double stability_constant = kNaN;
  double normalization_scale = 1.0;
  std::optional<double> uniqueness_gap;
  std::optional<SewingSummary> sewing;
  std::vector<std::string> warnings;
  std::size_t grid = 0;
  std::size_t probes = 0;
  /// Pointwise residuals for the CSV columns; not serialized.
  std::function<double(double)> residual_at;
  std::function<double(double)> residual_line_at;

  const ClassCertificate* certificate(const std::string& name) const {
    for (const auto& c : certificates)
      if (c.name == name) return &c.cert;
    return nullptr;
  }
};

namespace detail {

/// NaN and infinities are not JSON numbers.
inline nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

inline nlohmann::ordered_json interval_json(Interval i) { return nlohmann::ordered_json::array({num(i.lo), num(i.hi)}); }

}  // namespace detail

inline nlohmann::ordered_json to_json(const ClassCertificate& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["kind"] = to_string(c.spec.kind);
  j["interval"] = detail::interval_json(c.spec.interval);
  j["delta"] = detail::num(c.spec.delta);
  j["M"] = detail::num(c.spec.M);
  j["lambda"] = detail::num(c.spec.lambda);
  j["anchor"] = detail::num(c.spec.anchor);
  j["verdict"] = to_string(c.verdict);
  j["degeneracy"] = to_string(c.degeneracy);
  j["probes"] = c.probes;
  ordered_json w = ordered_json::array();
  for (const auto& x : c.witnesses)
    w.push_back({{"x", detail::num(x.x)},
                 {"y", detail::num(x.y)},
                 {"condition", x.condition},
                 {"measured", detail::num(x.measured)},
                 {"boundary", x.boundary}});
  j["witnesses"] = std::move(w);
  return j;
}

inline nlohmann::ordered_json to_json(const SolveReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["route"] = r.route;
  j["stages"] = r.stages;
  j["converged"] = r.converged;
  j["grid"] = r.grid;
  j["probes"] = r.probes;
  j["window"] = detail::interval_json(r.window);
  j["window_line"] = detail::interval_json(r.window_line);
  j["normalization_scale"] = detail::num(r.normalization_scale);
  if (r.constants) {
    j["constants"] = {{"K0", detail::num(r.constants->K0)},
                      {"K1", detail::num(r.constants->K1)},
                      {"K2", detail::num(r.constants->K2)},
                      {"contraction_factor", detail::num(r.constants->contraction_factor)}};
  } else {
    j["constants"] = nullptr;
  }
  j["stability_constant"] = detail::num(r.stability_constant);
  ordered_json res;
  res["polynomial"] = detail::num(r.residual_poly);
  res["multiplicative"] = detail::num(r.residual_mult);
  res["negative"] = detail::num(r.residual_negative);
  res["note"] = "maximum over probe points; a lower bound on the true sup norm";
  j["residuals"] = std::move(res);
  ordered_json it;
  it["count"] = r.iterations;
  ordered_json gaps = ordered_json::array();
  for (double g : r.gap_trace) gaps.push_back(detail::num(g));
  it["gap_trace"] = std::move(gaps);
  ordered_json sweeps = ordered_json::array();
  for (const auto& s : r.sweeps)
    sweeps.push_back({{"iteration", s.iteration},
                      {"gap", detail::num(s.gap)},
                      {"in_class", s.member},
                      {"slope_min", detail::num(s.slope_lo)},
                      {"slope_max", detail::num(s.slope_hi)}});
  it["sweeps"] = std::move(sweeps);
  j["iterations"] = std::move(it);
  j["uniqueness_gap"] = r.uniqueness_gap ? detail::num(*r.uniqueness_gap) : ordered_json(nullptr);
  ordered_json certs = ordered_json::array();
  for (const auto& c : r.certificates) {
    auto cj = to_json(c.cert);
    ordered_json named;
    named["name"] = c.name;
    for (auto& [k, v] : cj.items()) named[k] = v;
    certs.push_back(std::move(named));
  }
  j["certificates"] = std::move(certs);
  ordered_json checks = ordered_json::array();
  for (const auto& b : r.bound_checks)
    checks.push_back(
        {{"name", b.name}, {"lhs", detail::num(b.lhs)}, {"rhs", detail::num(b.rhs)}, {"pass", b.pass}});
  j["bound_checks"] = std::move(checks);
  if (r.sewing) {
    const auto& s = *r.sewing;
    ordered_json sj;
    sj["side"] = s.side;
    sj["x0"] = detail::num(s.x0);
    sj["seeds"] = s.seeds;
    sj["sequence_length"] = s.sequence.size();
    sj["sequence"] = s.sequence;
    sj["pieces"] = s.pieces;
    sj["anchor"] = detail::num(s.anchor);
    sj["working_window"] = detail::interval_json(s.working_window);
    sj["initial_pieces"] = s.initial_pieces;
    j["sewing"] = std::move(sj);
  } else {
    j["sewing"] = nullptr;
  }
  j["warnings"] = r.warnings;
  return j;
}

/// Plot-ready CSV: x, f(x), residual(x). Reads back with from_csv.
template <typename Residual>
std::string solution_csv(const GridFunction& f, Residual&& residual) {
  const std::string grid = to_csv(f);
  std::string out = grid.substr(0, grid.find('\n') + 1) + "x,value,residual\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.knots()[i];
    out += GridFunction::fmt(x) + "," + GridFunction::fmt(f.values()[i]) + "," + GridFunction::fmt(residual(x)) +
           "\n";
  }
  return out;
}

/// Writes report.json plus one CSV per solution into `dir`.
inline void write_report(const SolveReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
    out << text;
  };
  write(base / "report.json", to_json(r).dump(2) + "\n");
  auto csv = [](const GridFunction& f, const std::function<double(double)>& res) {
    return res ? solution_csv(f, res) : to_csv(f);
  };
  if (r.solution) write(base / "solution.csv", csv(*r.solution, r.residual_at));
  if (r.solution_line && r.solution_line->knots() != (r.solution ? r.solution->knots() : std::vector<double>{}))
    write(base / "solution_line.csv", csv(*r.solution_line, r.residual_line_at));
  if (r.solution_negative) write(base / "solution_negative.csv", to_csv(*r.solution_negative));
}

}  // namespace iterfunc
