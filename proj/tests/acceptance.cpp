// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "iterfunc/examples.hpp"
#include "iterfunc/multeq.hpp"

using namespace iterfunc;

namespace {

const double e = std::numbers::e;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemSpec example(const char* name) {
  for (const auto& c : case_studies())
    if (c.name == name) return c.spec;
  throw std::runtime_error(std::string("no case study ") + name);
}

Target ex2_H() { return Target::from(parse_expression("on (-inf,0]: 0 ; on [0,1]: x/9 ; on [1,inf): 1/(9*x)")); }

/// Random PL map of [lo, hi] onto itself with slopes in [d, M] (mean-one slope perturbation).
GridFunction random_member(std::mt19937_64& rng, Interval I, double d, double M, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x{I.lo, I.hi};
  while (x.size() < n) x.push_back(I.lo + I.length() * u(rng));
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  std::vector<double> c(x.size() - 1);
  double mean = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) mean += (c[i] = 2 * u(rng) - 1) * (x[i + 1] - x[i]);
  mean /= I.length();
  double cmax = 0.0;
  for (auto& v : c) cmax = std::max(cmax, std::abs(v -= mean));
  const double t = cmax > 0 ? u(rng) * std::min(1 - d, M - 1) / cmax : 0.0;
  std::vector<double> y{I.lo};
  for (std::size_t i = 0; i < c.size(); ++i) y.push_back(y.back() + (1 + t * c[i]) * (x[i + 1] - x[i]));
  y.back() = I.hi;
  return GridFunction(x, y, Extension::ClampToEndpointValues, true);
}

Outcome c1_constants() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = compute_constants({0.75, 0.25}, 2.0 / 3, 2.0);
  const double dt = seconds_since(t0);
  o.require(std::abs(c.K0 - 11.0 / 12) <= 1e-15, "K0 = " + GridFunction::fmt(c.K0));
  o.require(std::abs(c.K2 - 0.25) <= 1e-15, "K2 = " + GridFunction::fmt(c.K2));
  o.require(dt < 1e-3, "time " + num(dt * 1e3) + " ms < 1 ms");
  return o;
}

Outcome c2_example1() {
  Outcome o;
  auto spec = example("ex1");
  spec.options.grid = 1025;
  spec.options.probes = 8193;
  spec.options.window = Interval{0.5, 2 * e};
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = solve(spec);
  const double dt = seconds_since(t0);
  o.require(r.converged, "converged in " + std::to_string(r.iterations) + " iterations");
  o.require(r.residual_mult <= 1e-6, "multiplicative residual " + num(r.residual_mult) + " <= 1e-6");
  const double ratio = max_gap_ratio(r.gap_trace);
  const double cap = 3.0 / 11 + 0.05;
  o.require(ratio <= cap, "gap ratio " + num(ratio) + " <= " + num(cap));
  o.require(r.uniqueness_gap && *r.uniqueness_gap <= 1e-8,
            "two starts differ by " + num(r.uniqueness_gap.value_or(NAN)) + " <= 1e-8");
  o.require(dt < 10.0, "time " + num(dt) + " s < 10 s");
  return o;
}

Outcome c3_identity() {
  Outcome o;
  auto spec = parse_problem(
      "form = multiplicative\nexponents = [1/2, 1/2]\ninterval = [1, e]\ndelta = 1/2\nM = 2\n"
      "target:\n  on (0,1]: 1 ; on [1,e]: x ; on [e,inf): e\nend\n");
  const auto r = solve(spec);
  const double d = sup_norm_diff(*r.solution, GridFunction::identity(1, e), probe_points(1, e, 8193));
  o.require(d <= 1e-10, "|g - id| on J = " + num(d) + " <= 1e-10");
  o.require(r.iterations <= 2, std::to_string(r.iterations) + " iterations <= 2");
  return o;
}

Outcome c4_stability() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = stability_run(pipeline_input(example("ex1")), 1e-3);
  const double dt = seconds_since(t0);
  const double constant = stability_bound(1, e, *s.base.constants);
  o.require(std::abs(constant - 1.5 * e) <= 1e-12, "constant " + GridFunction::fmt(constant) + " = 3e/2");
  o.require(s.check.lhs <= s.check.rhs + 1e-8, "|g - g1| = " + num(s.check.lhs) + " <= " + num(s.check.rhs));
  o.require(dt < 20.0, "time " + num(dt) + " s < 20 s");
  return o;
}

SewingPlan ex2_plan(double seed) {
  SolverOptions opts;
  opts.seeds = {seed};
  return make_plan({2.0 / 3}, {0, 1}, Side::AtLeft, opts);
}

Outcome c5_sewing() {
  Outcome o;
  const auto H = ex2_H();
  const auto s = sew(ex2_plan(0.6), H);
  const double res = residual_lcp(s.assembled, {2.0 / 3}, H, sewn_probes(s, 1e-8, 4096));
  o.require(res <= 1e-6, "residual " + num(res) + " <= 1e-6");
  const auto& x = s.sequence;
  const double ratio = x[x.size() - 1] / x[x.size() - 2];
  o.require(std::abs(ratio - (1 + std::sqrt(2.0)) / 3) <= 0.01, "ratio " + num(ratio) + " ~ (1+sqrt2)/3");
  bool rejected = false;
  try {
    generate_sequence(ex2_plan(0.3), H);
  } catch (const Error& err) {
    rejected = err.code() == ErrorCode::SeedRejected;
  }
  o.require(rejected, "seed 0.3 rejected");
  o.require(x[1] == 0.6, "seed 0.6 accepted");
  const auto line = extend_to_line(s, H, sample(H, {0, 1}, 1025), {-2, 3});
  std::vector<double> probes;
  for (double p : probe_points(-2, 3, 8193))
    if (std::abs(p) > 1e-8) probes.push_back(p);
  const double rline = residual_lcp(line, {2.0 / 3}, H, probes);
  o.require(rline <= 1e-6, "line residual on [-2, 3] " + num(rline) + " <= 1e-6");
  return o;
}

Outcome c6_multiplicity() {
  Outcome o;
  const auto H = ex2_H();
  auto a_plan = ex2_plan(0.6), b_plan = ex2_plan(0.6);
  b_plan.initial_shapes = {quadratic_shape()};
  const auto a = sew(a_plan, H), b = sew(b_plan, H);
  const double ra = residual_lcp(a.assembled, {2.0 / 3}, H, sewn_probes(a, 1e-8, 4096));
  const double rb = residual_lcp(b.assembled, {2.0 / 3}, H, sewn_probes(b, 1e-8, 4096));
  o.require(ra <= 1e-6 && rb <= 1e-6, "residuals " + num(ra) + ", " + num(rb) + " <= 1e-6");
  const double d = sup_norm_diff(a.assembled, b.assembled, probe_points(1e-8, 1, 4096));
  o.require(d > 1e-3, "linear vs quadratic first piece differ by " + num(d) + " > 1e-3");
  return o;
}

Outcome c7_root() {
  Outcome o;
  const auto G = Target::from(parse_expression(
      "on (0,1]: 1 ; on [1,e]: exp(log(x)^2/2 + log(x)/4) ; on [e,inf): exp(3/4)"));
  SolverOptions opts;
  const auto r = solve_root(G, 2, Side::AtLeft, {1, e}, opts);
  const double res = residual_multiplicative(*r.solution, {0.0, 1.0}, G, probe_points(r.window.lo, r.window.hi, 8193));
  o.require(res <= 1e-6, "|g^2 - G| = " + num(res) + " <= 1e-6");
  bool refused = false;
  try {
    require_contraction({0.0, 1.0}, 0.5, 2.0);
  } catch (const Error& err) {
    refused = err.code() == ErrorCode::HypothesisViolation && std::string(err.what()).find("alpha_1 = 0") != std::string::npos;
  }
  o.require(refused, "alpha = [0, 1] refused by the contraction route");
  return o;
}

Outcome c8_degeneracy() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Interval J{1, e}, I{0, 1};
  int bad_rule = 0, bad_empty = 0, bad_identity = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const double d = 2 * u(rng), M = 3 * u(rng);
    const auto rule = degenerate_rule(d, M);
    if ((rule == Degeneracy::Empty) != (M < 1 || d > 1)) ++bad_rule;
    const auto f = random_member(rng, I, 0.5, 2, 12);
    const auto g = conj_explog_fn(f, Direction::Backward);
    if (rule == Degeneracy::Empty && check_G_class(g, d, M, J).is_member()) ++bad_empty;
  }
  for (int trial = 0; trial < 200; ++trial) {
    const bool identity = trial % 2 == 0;
    const auto f = identity ? GridFunction::identity(0, 1) : random_member(rng, I, 0.5, 2, 12);
    const auto g = conj_explog_fn(f, Direction::Backward);
    const bool is_id = sup_norm_diff(g, GridFunction::identity(1, e), probe_points(1, e, 513)) <= 1e-9;
    const double M = 1 + 2 * u(rng), d = u(rng);
    if (check_G_class(g, 1.0, M, J).is_member() != is_id) ++bad_identity;
    if (check_G_class(g, d, 1.0, J).is_member() != is_id) ++bad_identity;
  }
  o.require(bad_rule == 0, "rule mismatches " + std::to_string(bad_rule) + "/500");
  o.require(bad_empty == 0, "members of empty classes " + std::to_string(bad_empty));
  o.require(bad_identity == 0, "identity-only mismatches " + std::to_string(bad_identity) + "/400");
  return o;
}

Outcome c9_coherence() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Interval J{1, e}, I{0, 1};
  const double c = J.lo, b = I.hi;
  int verdict_mismatch = 0, transport_fail = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double d = 0.3 + 0.6 * u(rng), M = 1.1 + 2 * u(rng);
    const auto f = random_member(rng, I, d, M, 4 + std::size_t(20 * u(rng)));
    const auto g = conj_explog_fn(f, Direction::Backward);
    const double dq = 0.2 + 0.8 * u(rng), Mq = 1 + 2 * u(rng);
    if (check_G_class(g, dq, Mq, J).verdict != check_F_class(f, dq, Mq, I).verdict) ++verdict_mismatch;

    // Residuals of a perturbed equation on both sides: the log-side residual r gives the
    // half-line residual within e^b (e^r - 1), and the half-line residual gives r within 1/c.
    const double a1 = 0.5 + 0.5 * u(rng), eta = 1e-3 * u(rng);
    const std::vector<double> alpha{a1, 1 - a1};
    auto F = [&](double t) {
      const double s = std::clamp(t, 0.0, 1.0);
      return a1 * f.eval(s) + (1 - a1) * f.eval(f.eval(s)) + eta * std::sin(std::numbers::pi * s);
    };
    auto G = [&](double x) { return std::exp(F(std::log(x))); };
    auto g_exact = [&](double x) { return std::exp(f.eval(std::log(x))); };
    const auto px = probe_points(J.lo, J.hi, 257);
    std::vector<double> pt;
    for (double x : px) pt.push_back(std::log(x));
    const double r = residual_polynomial(f, alpha, F, pt);
    const double m = residual_multiplicative(g_exact, alpha, G, px);
    if (!(m <= std::exp(b) * std::expm1(r) * (1 + 1e-9) + 1e-14)) ++transport_fail;
    if (!(r <= m / c * (1 + 1e-9) + 1e-14)) ++transport_fail;
  }
  o.require(verdict_mismatch == 0, "verdict mismatches " + std::to_string(verdict_mismatch) + "/100");
  o.require(transport_fail == 0, "residual transport failures " + std::to_string(transport_fail) + "/200");
  return o;
}

Outcome c10_negation() {
  Outcome o;
  const auto r = solve(example("ex2"));
  o.require(r.solution_negative.has_value(), "exponents [-2, 3] give a mirrored solution");
  if (r.solution_negative) {
    const Target G = Target::from(example("ex2").target);
    auto Gneg = [&](double x) { return -G(-x); };
    const double res = residual_multiplicative(*r.solution_negative, {-2.0, 3.0}, Gneg,
                                               probe_points(-r.window.hi, -r.window.lo, 8193));
    o.require(res <= 1e-6, "residual on negative probes " + num(res) + " <= 1e-6");
  }
  int refused = 0;
  for (const std::vector<double>& ex : {std::vector<double>{0.75, 0.25}, {1.0, 1.0}, {2.0, 4.0}}) {
    try {
      conj_negation(GridFunction::identity(1, e), ex);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::ParityViolation) ++refused;
    }
  }
  o.require(refused == 3, "fractional and even-sum exponents refused (" + std::to_string(refused) + "/3)");
  o.require(!solve(example("ex1")).solution_negative, "no mirrored solution for [3/4, 1/4]");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"constants K0 = 11/12, K2 = 1/4", c1_constants},
      {"contraction solve of the first case study", c2_example1},
      {"identity target", c3_identity},
      {"stability bound 3e/2", c4_stability},
      {"sewing f^2 = (2/3) f + x/9", c5_sewing},
      {"two distinct sewn solutions", c6_multiplicity},
      {"iterative square root", c7_root},
      {"degenerate classes", c8_degeneracy},
      {"exp/log coherence", c9_coherence},
      {"negation extension", c10_negation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& err) {
      o.pass = false;
      o.detail = std::string("exception: ") + err.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
