#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "gen.hpp"
#include "iterfunc/expression.hpp"
#include "iterfunc/problem.hpp"
#include "iterfunc/report.hpp"

using namespace iterfunc;

namespace {

constexpr const char* kG1 = "on (0,1]: 1 ; on [1,e]: exp((1+log(x))*log(x)/2) ; on [e,inf): e";
constexpr const char* kG3 = "on (0,1]: 1 ; on [1,2]: x^3 ; on [2,inf): (7*x+2)/x";

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

std::string source_dir() { return ITERFUNC_SOURCE_DIR; }

}  // namespace

TEST(ParseExpression, Example1Target) {
  const auto G = parse_expression(kG1);
  ASSERT_EQ(G.pieces().size(), 3u);
  for (double x : {1.2, 1.7, 2.5}) EXPECT_NEAR(G.eval(x), std::exp((1 + std::log(x)) * std::log(std::sqrt(x))), 1e-14);
  EXPECT_EQ(G.eval(0.3), 1.0);
  EXPECT_EQ(G.eval(10.0), std::numbers::e);
}

TEST(ParseExpression, Identity) {
  const auto id = parse_expression("on (-inf,inf): x");
  for (double x : {-1e6, -1.0, 0.0, 3.5}) EXPECT_EQ(id.eval(x), x);
}

TEST(ParseExpression, Example3Target) {
  const auto G = parse_expression(kG3);
  EXPECT_EQ(G.eval(2.0), 8.0);
  EXPECT_EQ(G.eval(1.5), 3.375);
  EXPECT_DOUBLE_EQ(G.eval(4.0), 7.5);
}

TEST(ParseExpression, SyntaxErrorCarriesLocation) {
  try {
    parse_expression("on [0,1]: x +* 2");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("col"), std::string::npos) << e.what();
  }
}

TEST(ParseExpression, DiscontinuousSeamNamesEndpoint) {
  try {
    parse_expression("on [0,1]: x ; on [1,2]: x + 1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DiscontinuousSeam);
    EXPECT_NE(std::string(e.what()).find('1'), std::string::npos);
  }
}

TEST(ParseExpression, GuardOverlap) {
  EXPECT_EQ(code_of([] { parse_expression("on [0,2]: x ; on [1,3]: x"); }), ErrorCode::GuardOverlap);
}

TEST(EvalExpr, Example1Seams) {
  const auto G = parse_expression(kG1);
  EXPECT_DOUBLE_EQ(eval_expr(G, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(eval_expr(G, std::numbers::e), std::numbers::e);
}

TEST(EvalExpr, Example2LineTargetH) {
  const auto H = parse_expression("on (-inf,0]: 0 ; on [0,1]: x/9 ; on [1,inf): 1/(9*x)");
  EXPECT_DOUBLE_EQ(eval_expr(H, 0.5), 1.0 / 18.0);
}

TEST(EvalExpr, Errors) {
  const auto G = parse_expression(kG1);
  EXPECT_EQ(code_of([&] { eval_expr(G, -1.0); }), ErrorCode::OutOfDomain);
  const auto L = parse_expression("on (-inf,inf): log(x)");
  EXPECT_EQ(code_of([&] { eval_expr(L, -1.0); }), ErrorCode::MathDomain);
  const auto P = parse_expression("on (-inf,inf): x^(-1)");
  EXPECT_EQ(code_of([&] { eval_expr(P, 0.0); }), ErrorCode::MathDomain);
}

TEST(EvalExpr, ExactOnRationalSubexpressions) {
  EXPECT_EQ(eval_expr(parse_expression(kG3), 2.0), 8.0);
  EXPECT_EQ(eval_expr(parse_expression("on [0,4]: (x^2 + x)/2"), 3.0), 6.0);
}

TEST(Sample, IdentityThreeKnots) {
  const auto f = sample(parse_expression("on (-inf,inf): x"), {0.0, 1.0}, 3);
  EXPECT_EQ(f.knots(), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(f.values(), (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(Sample, Example1LineTargetSlopes) {
  const auto F = parse_expression("on (-inf,0]: 0 ; on [0,1]: (x^2+x)/2 ; on [1,inf): 1");
  const auto f = sample(F, {0.0, 1.0}, 1025);
  const double h = 1.0 / 1024;
  const auto [d, M] = f.lipschitz_bounds();
  EXPECT_GE(d, 0.5 - h);
  EXPECT_LE(M, 1.5 + h);
}

TEST(Sample, SeamKnotIncludedExactly) {
  const auto G = parse_expression(kG1);
  const auto f = sample(G, {0.5, 3.0}, 10);
  const auto& k = f.knots();
  EXPECT_NE(std::find(k.begin(), k.end(), 1.0), k.end());
  EXPECT_NE(std::find(k.begin(), k.end(), std::numbers::e), k.end());
}

TEST(SampleProperty, NoKnotIntervalCrossesASeam) {
  gen::Rng rng(21);
  const auto G = parse_expression(kG1);
  for (int trial = 0; trial < 100; ++trial) {
    const double lo = gen::uniform(rng, 0.01, 2.0), hi = lo + gen::uniform(rng, 0.1, 5.0);
    const auto f = sample(G, {lo, hi}, gen::count(rng, 2, 300));
    for (double s : G.seams()) {
      if (!(s > lo && s < hi)) continue;
      EXPECT_NE(std::find(f.knots().begin(), f.knots().end(), s), f.knots().end()) << s;
    }
  }
}

namespace {

NodePtr random_ast(gen::Rng& rng, int depth) {
  using namespace ast;
  const auto pick = gen::count(rng, 0, depth <= 0 ? 1 : 8);
  switch (pick) {
    case 0: return constant(std::round(gen::uniform(rng, -20, 20) * 4) / 4);
    case 1: return var();
    case 2: return binary(Op::Add, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 3: return binary(Op::Sub, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 4: return binary(Op::Mul, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 5: return binary(Op::Div, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 6: return binary(Op::Pow, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 7: return unary(Op::Exp, random_ast(rng, depth - 1));
    default: return unary(Op::Log, random_ast(rng, depth - 1));
  }
}

}  // namespace

TEST(RenderProperty, ParseOfRenderIsIdentityOnAst) {
  gen::Rng rng(22);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = random_ast(rng, 5);
    const auto text = ast::render(n);
    EXPECT_TRUE(ast::equal(parse_formula(text), n)) << text;
  }
}

TEST(RenderProperty, PiecewiseRoundTrip) {
  for (const char* t : {kG1, kG3, "on (-inf,inf): x", "on (-inf,0]: 0 ; on [0,1]: x/9 ; on [1,inf): 1/(9*x)"}) {
    const auto e = parse_expression(t);
    EXPECT_EQ(parse_expression(e.render()), e) << e.render();
  }
}

TEST(LoadProblem, Example1File) {
  const auto spec = load_problem(source_dir() + "/problems/ex1.problem");
  EXPECT_EQ(spec.form, EquationForm::Multiplicative);
  EXPECT_EQ(spec.exponents, (std::vector<double>{0.75, 0.25}));
  EXPECT_DOUBLE_EQ(spec.interval.lo, 1.0);
  EXPECT_DOUBLE_EQ(spec.interval.hi, std::numbers::e);
  EXPECT_DOUBLE_EQ(*spec.delta, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*spec.M, 2.0);
  EXPECT_EQ(spec.target, parse_expression(kG1));
}

TEST(LoadProblem, EveryShippedProblemParses) {
  for (const auto& entry : std::filesystem::directory_iterator(source_dir() + "/problems"))
    if (entry.path().extension() == ".problem") {
      EXPECT_NO_THROW(load_problem(entry.path().string())) << entry.path();
    }
}

TEST(LoadProblem, RoundTrip) {
  const auto spec = load_problem(source_dir() + "/problems/ex2.problem");
  const auto path = (std::filesystem::temp_directory_path() / "iterfunc_roundtrip.problem").string();
  write_problem(spec, path);
  EXPECT_EQ(load_problem(path), spec);
  std::filesystem::remove(path);
}

TEST(LoadProblem, RoundTripRandomOptions) {
  gen::Rng rng(23);
  auto base = parse_problem(std::string("form = multiplicative\nexponents = [3/4, 1/4]\ninterval = [1, e]\ntarget = ") +
                            kG1 + "\n");
  for (int trial = 0; trial < 50; ++trial) {
    auto spec = base;
    spec.options.grid = gen::count(rng, 2, 5000);
    spec.options.tol = gen::uniform(rng, 1e-14, 1e-3);
    spec.options.probes = gen::count(rng, 2, 10000);
    spec.delta = gen::uniform(rng, 0, 1);
    if (trial % 2) spec.options.seeds = {gen::uniform(rng, 1, 2), gen::uniform(rng, 1, 2)};
    if (trial % 3 == 0) spec.options.window = Interval{gen::uniform(rng, 0.1, 1), gen::uniform(rng, 3, 9)};
    EXPECT_EQ(parse_problem(render_problem(spec)), spec);
  }
}

TEST(LoadProblem, MalformedExponentsNamesField) {
  try {
    parse_problem("form = multiplicative\nexponents = 3/4, 1/4\ninterval = [1, e]\ntarget = on (0,inf): x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_NE(std::string(e.what()).find("exponents"), std::string::npos);
  }
}

TEST(LoadProblem, SchemaErrors) {
  EXPECT_EQ(code_of([] { parse_problem("exponents = [1]\ninterval = [1, 2]\ntarget = on (0,inf): x\n"); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] {
              parse_problem("form = multiplicative\nexponents = [1]\ninterval = [1, 2]\nbogus = 3\ntarget = on (0,inf): x\n");
            }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_problem("form = multiplicative\nexponents = [1]\ninterval = [-1, 2]\ntarget = on (0,inf): x\n"); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(code_of([] { parse_problem("form = root\norder = 2\ninterval = [1, 2]\ntarget = on (0,inf): x +\n"); }),
            ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { load_problem("/nonexistent/problem"); }), ErrorCode::IoError);
}

TEST(WriteReport, JsonAndCsv) {
  SolveReport r;
  r.route = "contraction";
  r.solution = GridFunction::identity(1.0, 2.0);
  r.residual_at = [](double) { return 0.0; };
  r.residual_poly = 1e-9;
  r.constants = Constants{11.0 / 12, 1.25, 0.25, 3.0 / 11};
  const auto dir = (std::filesystem::temp_directory_path() / "iterfunc_report_test").string();
  write_report(r, dir);
  const auto json = nlohmann::json::parse(read_text_file(dir + "/report.json"));
  EXPECT_EQ(json["route"], "contraction");
  EXPECT_DOUBLE_EQ(json["constants"]["K2"].get<double>(), 0.25);
  EXPECT_TRUE(json["residuals"]["multiplicative"].is_null());
  const auto g = read_csv(dir + "/solution.csv");
  EXPECT_EQ(g.knots(), r.solution->knots());
  EXPECT_NE(read_text_file(dir + "/solution.csv").find("x,value,residual"), std::string::npos);
  std::filesystem::remove_all(dir);
}
