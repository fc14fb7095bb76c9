#pragma once

#include <array>
#include <optional>
#include <vector>

#include "shehu/expr.hpp"
#include "shehu/tf_expr.hpp"

namespace shehu {

// Restriction of f (or a derivative) with the listed variables set to 0.
struct BoundaryTrace {
  VarSet vars;
  std::array<int, 4> order{};  // derivative order per traced variable

  // Applies the trace to f: differentiate, then take the right limit at 0.
  Expr apply(const Expr& f) const;
  std::string to_string() const;  // "f_q(0,r,s,t)"-style description
  friend bool operator==(const BoundaryTrace&, const BoundaryTrace&) = default;
};

struct BoundaryTerm {
  TFExpr coeff;
  BoundaryTrace trace;
};

// transform(derivative) = principal * F - sum coeff * transform(trace)
struct RuleResult {
  TFExpr principal;
  std::vector<BoundaryTerm> boundary_terms;
};

struct ConvergenceRegion {
  std::array<double, 4> rate{};  // P_i > rate_i * M_i
  bool contains(const ShehuPoint& pt) const;
};

struct ExistenceBound {
  ConvergenceRegion region;
  double bound = 0;
};

TFExpr forward(const Expr& f, VarSet vars = VarSet::all());
// Table inversion with mandatory forward verification.
Expr inverse(const TFExpr& F, std::optional<double> alpha_value = std::nullopt);

TFExpr scale_rule(const TFExpr& F, const std::array<double, 4>& factor);
TFExpr shift_rule(const TFExpr& F, const std::array<double, 4>& rate);
TFExpr heaviside_shift(const TFExpr& F, const std::array<double, 4>& shift);

// General integer-order rule for d^{n_q+n_r+n_s+n_t} f / dq^{n_q} ... .
RuleResult derivative_rule(const std::array<int, 4>& orders);
RuleResult partial_rule(int n, Var var);
RuleResult mixed_rule();
// With symbolic = true the exponents carry the alpha token; n = ceil(alpha).
RuleResult caputo_rule(double alpha, Var var, bool symbolic = false);

TFExpr multiply_by_powers_rule(const TFExpr& F, const std::array<int, 4>& n);
TFExpr convolution(const TFExpr& Ff, const TFExpr& Fg);

// principal * forward(f) - sum coeff * forward(trace f), over vars.
TFExpr apply_rule(const RuleResult& rule, const Expr& f, VarSet vars = VarSet::all());

ExistenceBound existence_bound(const Expr& f, const ShehuPoint& pt);

}  // namespace shehu
