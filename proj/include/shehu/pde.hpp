#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shehu/error.hpp"
#include "shehu/expr.hpp"
#include "shehu/oracle.hpp"
#include "shehu/tf_expr.hpp"
#include "shehu/transform.hpp"

namespace shehu {

struct DerivativeSpec {
  bool fractional = false;
  std::array<int, 4> orders{};  // integer orders (q, r, s, t)
  double alpha = 0;             // Caputo order when fractional
  Var var = Var::t;

  static DerivativeSpec integer(std::array<int, 4> orders) { return {false, orders}; }
  static DerivativeSpec caputo(double alpha, Var var) { return {true, {}, alpha, var}; }
  std::string to_string() const;
};

struct PdeTerm {
  double coeff = 1;
  DerivativeSpec op;
};

struct Condition {
  BoundaryTrace trace;
  Expr value;
};

struct PdeProblem {
  std::vector<PdeTerm> lhs;
  Expr rhs;
  std::vector<Condition> conditions;

  bool has_fractional() const;
  // Throws Usage when malformed (e.g. two fractional terms).
  void validate() const;
};

struct TransformedProblem {
  TFExpr coefficient;
  TFExpr known;
};

struct Solution {
  TFExpr image;
  Expr expr;
  ResidualReport verification;
};

struct SolveOptions {
  Box box{};
  int n_samples = 10;
  std::uint64_t seed = 42;
  // Residual tolerance; negative selects 1e-9, or 1e-4 with a Caputo term.
  double tolerance = -1;
};

// Thrown by solve when the inverted candidate misses the residual tolerance;
// carries the rejected solution and its report.
class VerificationFailure : public Error {
 public:
  VerificationFailure(Solution s, double tolerance);
  const Solution& solution() const noexcept { return solution_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  Solution solution_;
  double tolerance_;
};

TransformedProblem transform_problem(const PdeProblem& p);
// Solves coefficient * w = known for the image w and cancels common factors.
TFExpr solve_image(const TransformedProblem& tp);
Solution solve(const PdeProblem& p, const SolveOptions& options = {});

// Problem-file I/O (JSON; schema in the README). The token `alpha` in
// expression strings is replaced by the fractional order, which `alpha`
// overrides when given.
PdeProblem parse_problem(const std::string& text, std::optional<double> alpha = std::nullopt);
PdeProblem load_problem(const std::string& path, std::optional<double> alpha = std::nullopt);

}  // namespace shehu
