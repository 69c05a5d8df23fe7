#pragma once

// The three worked case studies, as in-memory problems.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "iterfunc/grid_function.hpp"
#include "iterfunc/problem.hpp"

namespace iterfunc {

struct CaseStudy {
  std::string name;
  std::string description;
  ProblemSpec spec;
  std::optional<GridFunction> candidate;
};

inline constexpr const char* kExample1 = R"(form = multiplicative
exponents = [3/4, 1/4]
interval = [1, e]
delta = 2/3
M = 2
target:
  on (0,1]: 1 ; on [1,e]: exp((1+log(x))*log(x)/2) ; on [e,inf): e
end
)";

inline constexpr const char* kExample2 = R"(form = multiplicative
exponents = [-2, 3]
interval = [1, e]
anchor = 1
window = [0.5, 20]
target:
  on (0,1]: 1 ; on [1,e]: x^(1/3) ; on [e,inf): exp(1/(3*log(x)))
end
)";

inline constexpr const char* kExample3 = R"(form = multiplicative
exponents = [6, 3]
interval = [1, 2]
solver = verify
target:
  on (0,1]: 1 ; on [1,2]: x^3 ; on [2,inf): (7*x+2)/x
end
)";

inline std::vector<CaseStudy> case_studies() {
  std::vector<CaseStudy> out;
  out.push_back({"ex1", "g^(3/4) (g o g)^(1/4) = G, contraction on J = [1, e]", parse_problem(kExample1), {}});
  out.push_back({"ex2", "(g o g)^3 / g^2 = G, sewn from the fixed point 1", parse_problem(kExample2), {}});

  // Dividing by the leading exponent gives f^2 + 2f = x on I = [0, 1], solved by
  // f(x) = (sqrt 2 - 1) x, i.e. g(x) = x^(sqrt 2 - 1).
  auto ex3 = parse_problem(kExample3);
  const double p = std::sqrt(2.0) - 1.0;
  out.push_back({"ex3", "g^6 (g o g)^3 = G, candidate g(x) = x^(sqrt 2 - 1) on J = [1, 2]", ex3,
                 GridFunction::sampled([p](double x) { return std::pow(x, p); }, uniform_knots(1.0, 2.0, 1025))});

  // Without that division the log form reads f^2 + 2f = 3x, solved by the identity:
  // in multiplicative terms g^2 (g o g) = G.
  auto unscaled = ex3;
  unscaled.exponents = {2.0, 1.0};
  out.push_back({"ex3_unscaled", "g^2 (g o g) = G, candidate g = id on J = [1, 2]", unscaled,
                 GridFunction::sampled([](double x) { return x; }, uniform_knots(1.0, 2.0, 1025))});
  return out;
}

}  // namespace iterfunc
