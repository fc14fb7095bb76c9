#include "shehu/pde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "shehu/format.hpp"
#include "shehu/laurent.hpp"
#include "shehu/parser.hpp"

namespace shehu {

namespace {

RuleResult rule_for(const DerivativeSpec& op) {
  if (op.fractional) return caputo_rule(op.alpha, op.var);
  return derivative_rule(op.orders);
}

// Transform of a required boundary trace, derived from the most specific
// condition whose traced variables are a subset with matching orders.
TFExpr trace_image(const BoundaryTrace& need, const std::vector<Condition>& conditions) {
  const Condition* best = nullptr;
  for (const Condition& c : conditions) {
    if (!c.trace.vars.subset_of(need.vars)) continue;
    bool match = true;
    for (Var v : c.trace.vars.vars()) match = match && c.trace.order[index(v)] == need.order[index(v)];
    if (match && (!best || c.trace.vars.size() > best->trace.vars.size())) best = &c;
  }
  if (!best) fail(ErrorKind::MissingCondition, "no condition supplies " + need.to_string());
  BoundaryTrace rest{need.vars - best->trace.vars, need.order};
  for (Var v : best->trace.vars.vars()) rest.order[index(v)] = 0;
  return forward(rest.apply(best->value), VarSet::all() - need.vars);
}

}  // namespace

std::string DerivativeSpec::to_string() const {
  if (fractional) return std::string("D_") + var_char(var) + "^" + format_number(alpha) + " w";
  std::string sub;
  for (Var v : kVars) sub += std::string(orders[index(v)], var_char(v));
  return sub.empty() ? "w" : "w_" + sub;
}

bool PdeProblem::has_fractional() const {
  return std::any_of(lhs.begin(), lhs.end(), [](const PdeTerm& t) { return t.op.fractional; });
}

void PdeProblem::validate() const {
  if (lhs.empty()) fail(ErrorKind::Usage, "equation has no terms");
  int fractional = 0;
  for (const PdeTerm& t : lhs) {
    if (!std::isfinite(t.coeff)) fail(ErrorKind::Usage, "non-finite term coefficient");
    if (t.op.fractional) {
      ++fractional;
      if (!(t.op.alpha > 0)) fail(ErrorKind::Usage, "fractional order must be positive");
    } else {
      for (int k : t.op.orders)
        if (k < 0) fail(ErrorKind::Usage, "derivative orders must be nonnegative");
    }
  }
  if (fractional > 1) fail(ErrorKind::Usage, "at most one fractional term is supported");
  for (const Condition& c : conditions) {
    if (c.trace.vars.empty()) fail(ErrorKind::Usage, "condition without a traced variable");
    if (!(c.value.variables() & c.trace.vars).empty())
      fail(ErrorKind::Usage, "condition " + c.trace.to_string() + " depends on a traced variable");
  }
}

VerificationFailure::VerificationFailure(Solution s, double tolerance)
    : Error(ErrorKind::VerificationFailed,
            "residual " + format_number(s.verification.max_abs_residual) + " exceeds tolerance " + format_number(tolerance)),
      solution_(std::move(s)),
      tolerance_(tolerance) {}

TransformedProblem transform_problem(const PdeProblem& p) {
  p.validate();
  TransformedProblem tp{TFExpr{}, forward(p.rhs)};
  for (const PdeTerm& t : p.lhs) {
    RuleResult r = rule_for(t.op);
    tp.coefficient = tp.coefficient + t.coeff * r.principal;
    for (const BoundaryTerm& b : r.boundary_terms) {
      TFExpr img = trace_image(b.trace, p.conditions);
      if (!img.is_zero()) tp.known = tp.known + t.coeff * (b.coeff * img);
    }
  }
  if (tp.coefficient.is_zero()) fail(ErrorKind::Algebra, "transformed equation has a zero coefficient");
  return tp;
}

TFExpr solve_image(const TransformedProblem& tp) {
  if (tp.known.is_zero()) return TFExpr{};
  RationalContext ctx;
  Denominator dc, dk;
  const LaurentPoly nc = ctx.over_common_denominator({tp.coefficient}, dc)[0];
  LaurentPoly nk = ctx.over_common_denominator({tp.known}, dk)[0];
  for (const auto& [b, k] : dc) nk = nk * ctx.expand(b)->pow(k);
  auto q = divide_exact(nk, nc);
  if (!q) fail(ErrorKind::Algebra, "the transformed equation does not reduce to a closed-form image");
  // Cancel denominator factors that divide the quotient.
  for (auto& [b, k] : dk) {
    const LaurentPoly f = *ctx.expand(b);
    while (k > 0) {
      auto r = divide_exact(*q, f);
      if (!r) break;
      q = std::move(r);
      --k;
    }
  }
  q->prune(1e-13 * q->max_abs());
  return ctx.to_tf(*q, dk);
}

Solution solve(const PdeProblem& p, const SolveOptions& options) {
  TransformedProblem tp = transform_problem(p);
  Solution s;
  s.image = solve_image(tp);
  s.expr = inverse(s.image);
  s.verification = pde_residual(p, s.expr, options.box, options.n_samples, options.seed);
  double tol = options.tolerance;
  if (tol < 0) tol = p.has_fractional() ? 1e-4 : 1e-9;
  if (!(s.verification.max_abs_residual <= tol)) throw VerificationFailure(std::move(s), tol);
  return s;
}

// ---- problem files ----

namespace {

using nlohmann::json;

[[noreturn]] void bad_file(const std::string& msg) { fail(ErrorKind::Usage, "problem file: " + msg); }

Var parse_var(const std::string& s) {
  if (s.size() == 1)
    if (auto v = var_from_char(s[0])) return *v;
  bad_file("unknown variable '" + s + "'");
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad_file(std::string(what) + " must be a number");
  return j.get<double>();
}

int order_value(const json& j) {
  if (!j.is_number_integer() || j.get<int>() < 0) bad_file("derivative orders must be nonnegative integers");
  return j.get<int>();
}

std::string substitute_alpha(const std::string& text, std::optional<double> alpha) {
  static const std::regex token("\\balpha\\b");
  if (!std::regex_search(text, token)) return text;
  if (!alpha) bad_file("expression uses alpha but the equation has no fractional term");
  return std::regex_replace(text, token, "(" + format_number(*alpha) + ")");
}

Expr expr_field(const json& j, const char* what, std::optional<double> alpha) {
  if (!j.is_string()) bad_file(std::string(what) + " must be an expression string");
  return parse_expr(substitute_alpha(j.get<std::string>(), alpha));
}

}  // namespace

PdeProblem parse_problem(const std::string& text, std::optional<double> alpha) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad_file(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("equation")) bad_file("missing 'equation'");
  const json& eq = doc["equation"];
  PdeProblem p;
  std::optional<double> order = alpha;
  if (eq.contains("fractional")) {
    const json& fr = eq["fractional"];
    DerivativeSpec op = DerivativeSpec::caputo(number(fr.value("alpha", json()), "fractional.alpha"),
                                               parse_var(fr.value("var", std::string("t"))));
    if (alpha) op.alpha = *alpha;
    order = op.alpha;
    p.lhs.push_back({fr.contains("coeff") ? number(fr["coeff"], "fractional.coeff") : 1.0, op});
  }
  if (eq.contains("terms")) {
    if (!eq["terms"].is_array()) bad_file("'equation.terms' must be an array");
    for (const json& t : eq["terms"]) {
      std::array<int, 4> orders{};
      if (t.contains("orders")) {
        if (!t["orders"].is_object()) bad_file("'orders' must be an object");
        for (const auto& [k, v] : t["orders"].items()) orders[index(parse_var(k))] = order_value(v);
      }
      p.lhs.push_back({t.contains("coeff") ? number(t["coeff"], "coeff") : 1.0, DerivativeSpec::integer(orders)});
    }
  }
  p.rhs = eq.contains("rhs") ? expr_field(eq["rhs"], "equation.rhs", order) : Expr{};
  if (doc.contains("conditions")) {
    if (!doc["conditions"].is_array()) bad_file("'conditions' must be an array");
    for (const json& c : doc["conditions"]) {
      if (!c.contains("trace") || !c["trace"].is_object()) bad_file("condition without a 'trace' object");
      BoundaryTrace tr;
      std::optional<int> single;
      for (const auto& [k, v] : c["trace"].items()) {
        if (k == "order") {
          single = order_value(v);
        } else if (k == "orders") {
          if (!v.is_object()) bad_file("'orders' must be an object");
          for (const auto& [kv, ov] : v.items()) tr.order[index(parse_var(kv))] = order_value(ov);
        } else {
          if (!v.is_number() || v.get<double>() != 0) bad_file("traced variables must be set to 0");
          tr.vars = tr.vars.with(parse_var(k));
        }
      }
      if (single) {
        if (tr.vars.size() != 1) bad_file("'order' needs exactly one traced variable; use 'orders'");
        tr.order[index(tr.vars.vars()[0])] = *single;
      }
      for (Var v : kVars)
        if (tr.order[index(v)] != 0 && !tr.vars.contains(v)) bad_file("derivative order on an untraced variable");
      if (!c.contains("value")) bad_file("condition without a 'value'");
      p.conditions.push_back({tr, expr_field(c["value"], "condition value", order)});
    }
  }
  p.validate();
  return p;
}

PdeProblem load_problem(const std::string& path, std::optional<double> alpha) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot open problem file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), alpha);
}

}  // namespace shehu
