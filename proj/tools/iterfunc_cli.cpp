// iterfunc: command-line front end for the iterative functional equation solvers.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iterfunc/classes.hpp"
#include "iterfunc/contraction.hpp"
#include "iterfunc/examples.hpp"
#include "iterfunc/multeq.hpp"
#include "iterfunc/problem.hpp"
#include "iterfunc/report.hpp"

namespace fs = std::filesystem;
using namespace iterfunc;

namespace {

enum Exit { kOk = 0, kHypothesis = 1, kNumerical = 2, kInput = 3 };

/// ITERFUNC_LOG: 0 quiet, 1 summary (default), 2 adds warnings and certificates.
int log_level() {
  const char* v = std::getenv("ITERFUNC_LOG");
  if (!v || !*v) return 1;
  const std::string s(v);
  if (s == "quiet" || s == "0") return 0;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

void note(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << msg << '\n';
}

int exit_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Hypothesis: return kHypothesis;
    case ErrorCategory::Numerical: return kNumerical;
    case ErrorCategory::Input: return kInput;
  }
  return kNumerical;
}

/// Flag values shared by the problem-driven subcommands.
struct Overrides {
  std::optional<std::size_t> grid, max_iter, probes;
  std::optional<double> tol, x0;
  std::string window, seeds, initial_pieces, candidate, solver;

  void add_to(CLI::App* app) {
    app->add_option("--grid", grid, "Knot count of the working grid");
    app->add_option("--tol", tol, "Stopping tolerance for the fixed-point iteration");
    app->add_option("--max-iter", max_iter, "Iteration cap");
    app->add_option("--probes", probes, "Probe count for residuals and certificates");
    app->add_option("--window", window, "Report window, e.g. [0.5, 2*e]");
    app->add_option("--seeds", seeds, "Sewing seeds x1..x_{n-1}, e.g. [0.6]");
    app->add_option("--x0", x0, "Sewing start x0");
    app->add_option("--initial-pieces", initial_pieces, "CSV with a normalized initial piece on [0, 1]");
    app->add_option("--solver", solver, "auto | contraction | construct-left | construct-right | verify");
  }

  void apply(ProblemSpec& spec) const {
    auto& o = spec.options;
    if (grid) o.grid = *grid;
    if (max_iter) o.max_iter = *max_iter;
    if (probes) o.probes = *probes;
    if (tol) o.tol = *tol;
    if (x0) o.x0 = *x0;
    if (!window.empty()) o.window = detail::field_interval("window", window);
    if (!seeds.empty()) o.seeds = detail::field_list("seeds", seeds);
    if (!initial_pieces.empty()) o.initial_pieces = fs::absolute(initial_pieces).string();
    if (!candidate.empty()) o.candidate = fs::absolute(candidate).string();
    if (!solver.empty()) {
      if (solver == "auto") spec.solver = SolverKind::Auto;
      else if (solver == "contraction") spec.solver = SolverKind::Contraction;
      else if (solver == "construct-left") spec.solver = SolverKind::ConstructAtLeft;
      else if (solver == "construct-right") spec.solver = SolverKind::ConstructAtRight;
      else if (solver == "verify") spec.solver = SolverKind::VerifyOnly;
      else detail::schema("solver", "expected auto | contraction | construct-left | construct-right | verify");
    }
    if (o.grid < 2) detail::schema("grid", "must be at least 2");
    if (o.probes < 2) detail::schema("probes", "must be at least 2");
  }
};

std::string num(double v) { return GridFunction::fmt(v); }

void print_summary(const std::string& name, const SolveReport& r) {
  std::cout << name << ": route " << r.route;
  if (r.constants) std::cout << ", K0 = " << num(r.constants->K0) << ", K2 = " << num(r.constants->K2);
  if (r.iterations) std::cout << ", " << r.iterations << " iterations";
  if (std::isfinite(r.residual_poly)) std::cout << ", line residual " << num(r.residual_poly);
  if (std::isfinite(r.residual_mult)) std::cout << ", multiplicative residual " << num(r.residual_mult);
  if (std::isfinite(r.residual_negative)) std::cout << ", negative-axis residual " << num(r.residual_negative);
  std::cout << '\n';
  for (const auto& c : r.certificates)
    note(2, "  certificate " + c.name + ": " + to_string(c.cert.verdict));
  for (const auto& b : r.bound_checks)
    note(2, "  check " + b.name + ": " + num(b.lhs) + " vs " + num(b.rhs) + (b.pass ? " ok" : " FAILED"));
  for (const auto& w : r.warnings) note(2, "  note: " + w);
}

/// Failed bound checks are numerical failures; the first one is reported.
int finish(const std::string& name, const SolveReport& r, const std::string& out) {
  write_report(r, out);
  print_summary(name, r);
  note(1, "report written to " + out);
  for (const auto& b : r.bound_checks)
    if (!b.pass) {
      std::cerr << "error: check failed: " << b.name << " (" << num(b.lhs) << " > " << num(b.rhs) << ")\n";
      return kNumerical;
    }
  return kOk;
}

ProblemSpec load(const std::string& path, const Overrides& ov) {
  auto spec = load_problem(path);
  ov.apply(spec);
  return spec;
}

std::string base_dir(const std::string& path) { return fs::absolute(path).parent_path().string(); }

int cmd_solve(const std::string& path, const Overrides& ov, const std::string& out) {
  const auto spec = load(path, ov);
  note(1, "solving " + path);
  return finish(fs::path(path).stem().string(), solve(spec, base_dir(path)), out);
}

int cmd_verify(const std::string& path, Overrides ov, const std::string& out) {
  ov.solver = "verify";
  const auto spec = load(path, ov);
  if (spec.options.candidate.empty())
    throw Error(ErrorCode::SchemaViolation, "verify needs a candidate (--candidate or `candidate =` in the problem)");
  return finish(fs::path(path).stem().string(), solve(spec, base_dir(path)), out);
}

struct CertifyArgs {
  std::string cls, csv, interval, out;
  std::optional<double> delta, M, lambda, anchor;
};

int cmd_certify(const CertifyArgs& a) {
  const auto f = read_csv(a.csv);
  const Interval I = a.interval.empty() ? f.domain() : detail::field_interval("interval", a.interval);
  auto need = [&](const std::optional<double>& v, const char* flag) {
    if (!v) throw Error(ErrorCode::SchemaViolation, std::string("--class ") + a.cls + " needs " + flag);
    return *v;
  };
  ClassCertificate cert;
  if (a.cls == "FI") cert = check_F_class(f, need(a.delta, "--delta"), need(a.M, "--M"), I);
  else if (a.cls == "GJ") cert = check_G_class(f, need(a.delta, "--delta"), need(a.M, "--M"), I);
  else if (a.cls == "R") cert = check_R_class(f, a.anchor.value_or(I.lo), need(a.lambda, "--lambda"), I);
  else if (a.cls == "S") cert = check_S_class(f, a.anchor.value_or(I.lo), need(a.lambda, "--lambda"), I);
  else if (a.cls == "A") cert = check_AB_class(f, need(a.lambda, "--lambda"), I, false);
  else if (a.cls == "B") cert = check_AB_class(f, need(a.lambda, "--lambda"), I, true);
  else throw Error(ErrorCode::SchemaViolation, "--class must be FI, GJ, R, S, A or B");
  const auto j = to_json(cert).dump(2);
  std::cout << j << '\n';
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_text_file((fs::path(a.out) / "certificate.json").string(), j + "\n");
  }
  return kOk;
}

int cmd_constants(const std::string& path, const std::string& alpha_text, std::optional<double> delta,
                  std::optional<double> M) {
  std::vector<double> alpha;
  if (!path.empty()) {
    const auto spec = load_problem(path);
    alpha = spec.alphas();
    if (!delta) delta = spec.delta;
    if (!M) M = spec.M;
  }
  if (!alpha_text.empty()) alpha = detail::field_list("alpha", alpha_text);
  if (alpha.empty()) throw Error(ErrorCode::SchemaViolation, "give a problem file or --alpha");
  if (!delta || !M) throw Error(ErrorCode::SchemaViolation, "delta and M are required");
  const auto norm = normalize_exponents(alpha);
  const auto k = compute_constants(norm.alpha, *delta, *M);
  nlohmann::ordered_json j;
  j["alpha"] = norm.alpha;
  j["scale"] = norm.scale;
  j["delta"] = *delta;
  j["M"] = *M;
  j["K0"] = k.K0;
  j["K1"] = k.K1;
  j["K2"] = k.K2;
  j["contraction_factor"] = detail::num(k.contraction_factor);
  j["K1_delta"] = k.K1 * *delta;
  j["K0_M"] = k.K0 * *M;
  j["contraction"] = k.K2 < k.K0;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_stability(const std::string& path, const Overrides& ov, double eps, const std::string& out) {
  const auto spec = load(path, ov);
  const auto r = stability_run(pipeline_input(spec, base_dir(path)), eps);
  write_report(r.base, (fs::path(out) / "base").string());
  write_report(r.perturbed, (fs::path(out) / "perturbed").string());
  nlohmann::ordered_json j;
  j["eps"] = eps;
  j["constant"] = detail::num(r.base.stability_constant);
  j["lhs"] = detail::num(r.check.lhs);
  j["rhs"] = detail::num(r.check.rhs);
  j["pass"] = r.check.pass;
  write_text_file((fs::path(out) / "stability.json").string(), j.dump(2) + "\n");
  std::cout << "stability: |g - g1| = " << num(r.check.lhs) << ", bound " << num(r.check.rhs) << " (constant "
            << num(r.base.stability_constant) << ")" << (r.check.pass ? "" : " FAILED") << '\n';
  return r.check.pass ? kOk : kNumerical;
}

int cmd_examples(const std::string& out) {
  int worst = kOk;
  for (const auto& cs : case_studies()) {
    note(1, "example " + cs.name + ": " + cs.description);
    try {
      auto in = pipeline_input(cs.spec);
      in.candidate = cs.candidate;
      const int code = finish(cs.name, run_pipeline(in), (fs::path(out) / cs.name).string());
      worst = std::max(worst, code);
    } catch (const Error& e) {
      std::cerr << "error in " << cs.name << (e.stage().empty() ? "" : " [" + e.stage() + "]") << ": " << e.what()
                << '\n';
      worst = std::max(worst, exit_for(e));
    }
  }
  return worst;
}

struct RootArgs {
  std::string problem, G, interval, side = "auto";
  std::size_t order = 2;
};

int cmd_roots(const RootArgs& a, const Overrides& ov, const std::string& out) {
  ProblemSpec spec;
  std::string dir;
  if (!a.problem.empty()) {
    spec = load(a.problem, ov);
    dir = base_dir(a.problem);
    if (spec.form != EquationForm::RootProblem) detail::schema("form", "roots needs a root problem");
  } else {
    if (a.G.empty() || a.interval.empty()) throw Error(ErrorCode::SchemaViolation, "give a problem file or --G and --interval");
    spec.form = EquationForm::RootProblem;
    spec.order = a.order;
    spec.target = parse_expression(a.G);
    spec.interval = detail::field_interval("interval", a.interval);
    ov.apply(spec);
  }
  if (a.side == "left") spec.solver = SolverKind::ConstructAtLeft;
  else if (a.side == "right") spec.solver = SolverKind::ConstructAtRight;
  else if (a.side != "auto") detail::schema("side", "expected left | right | auto");
  return finish(a.problem.empty() ? "root" : fs::path(a.problem).stem().string(), solve(spec, dir), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve iterative functional equations prod_k (g^k)^{alpha_k} = G and their log forms.\n"
               "Exit codes: 0 ok, 1 hypothesis violated, 2 numerical failure, 3 input or I/O error.\n"
               "ITERFUNC_LOG=quiet|info|debug sets diagnostic verbosity on stderr."};
  app.require_subcommand(1);

  std::string out = "iterfunc_out";
  std::string problem;
  Overrides ov;

  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file and write report.json plus CSVs");
  solve_cmd->add_option("problem", problem, "Problem file")->required();
  solve_cmd->add_option("--out", out, "Output directory");
  ov.add_to(solve_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Check a candidate solution against a problem");
  verify_cmd->add_option("problem", problem, "Problem file")->required();
  verify_cmd->add_option("--candidate", ov.candidate, "Candidate CSV (overrides the problem's)");
  verify_cmd->add_option("--out", out, "Output directory");
  ov.add_to(verify_cmd);

  CertifyArgs ca;
  auto* certify_cmd = app.add_subcommand("certify", "Certify a sampled function against a class");
  certify_cmd->add_option("csv", ca.csv, "Function CSV")->required();
  certify_cmd->add_option("--class", ca.cls, "FI | GJ | R | S | A | B")->required();
  certify_cmd->add_option("--delta", ca.delta, "Lower slope bound");
  certify_cmd->add_option("--M", ca.M, "Upper slope bound");
  certify_cmd->add_option("--lambda", ca.lambda, "lambda of the R, S, A, B classes");
  certify_cmd->add_option("--anchor", ca.anchor, "Fixed point of the R or S class (default: left end)");
  certify_cmd->add_option("--interval", ca.interval, "Interval, e.g. [1, e] (default: CSV domain)");
  certify_cmd->add_option("--out", ca.out, "Directory for certificate.json");

  std::string alpha_text;
  std::optional<double> delta, M;
  auto* constants_cmd = app.add_subcommand("constants", "Print K0, K1, K2 and the contraction factor");
  constants_cmd->add_option("problem", problem, "Problem file");
  constants_cmd->add_option("--alpha", alpha_text, "Exponents, e.g. [3/4, 1/4]");
  constants_cmd->add_option("--delta", delta, "delta");
  constants_cmd->add_option("--M", M, "M");

  double eps = 1e-3;
  auto* stability_cmd = app.add_subcommand("stability", "Solve G and a perturbed G1 and check the stability bound");
  stability_cmd->add_option("problem", problem, "Problem file")->required();
  stability_cmd->add_option("--eps", eps, "Size of the multiplicative perturbation");
  stability_cmd->add_option("--out", out, "Output directory");
  ov.add_to(stability_cmd);

  auto* examples_cmd = app.add_subcommand("examples", "Regenerate the three case studies");
  examples_cmd->add_option("--out", out, "Output directory");

  RootArgs ra;
  auto* roots_cmd = app.add_subcommand("roots", "Iterative root g^n = G");
  roots_cmd->add_option("problem", ra.problem, "Root problem file");
  roots_cmd->add_option("--G", ra.G, "Target expression, e.g. \"on (0,inf): x\"");
  roots_cmd->add_option("--order", ra.order, "n");
  roots_cmd->add_option("--interval", ra.interval, "J, e.g. [1, e]");
  roots_cmd->add_option("--side", ra.side, "left | right | auto");
  roots_cmd->add_option("--out", out, "Output directory");
  ov.add_to(roots_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*solve_cmd) return cmd_solve(problem, ov, out);
    if (*verify_cmd) return cmd_verify(problem, ov, out);
    if (*certify_cmd) return cmd_certify(ca);
    if (*constants_cmd) return cmd_constants(problem, alpha_text, delta, M);
    if (*stability_cmd) return cmd_stability(problem, ov, eps, out);
    if (*examples_cmd) return cmd_examples(out);
    if (*roots_cmd) return cmd_roots(ra, ov, out);
  } catch (const Error& e) {
    std::cerr << "error" << (e.stage().empty() ? "" : " [stage " + e.stage() + "]") << ": " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
  return kInput;
}
