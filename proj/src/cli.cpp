#include "shehu/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shehu/error.hpp"
#include "shehu/format.hpp"
#include "shehu/oracle.hpp"
#include "shehu/parser.hpp"
#include "shehu/pde.hpp"
#include "shehu/transform.hpp"
#include "shehu/verify.hpp"

namespace shehu::cli {

namespace {

using Record = nlohmann::ordered_json;

constexpr int kDefaultChecks = 5;
constexpr std::uint64_t kDefaultSeed = 42;

std::string point_string(const Point4& x) {
  std::string out;
  for (Var v : kVars) {
    if (!out.empty()) out += ',';
    out += std::string(1, var_char(v)) + "=" + format_number(x[index(v)]);
  }
  return out;
}

double relative(double got, double want) {
  const double d = std::abs(got - want);
  return std::abs(want) > 1e-300 ? d / std::abs(want) : d;
}

void flatten(const Record& r, const std::string& prefix, std::ostringstream& out) {
  if (r.is_object()) {
    for (const auto& [k, v] : r.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (r.is_array()) {
    for (std::size_t i = 0; i < r.size(); ++i) flatten(r[i], prefix + "." + std::to_string(i), out);
    if (r.empty()) out << prefix << ": []\n";
  } else if (r.is_string()) {
    out << prefix << ": " << r.get<std::string>() << '\n';
  } else if (r.is_number()) {
    out << prefix << ": " << format_number(r.get<double>()) << '\n';
  } else {
    out << prefix << ": " << r.dump() << '\n';
  }
}

std::string render(const Record& r, bool porcelain) {
  if (porcelain) return r.dump() + "\n";
  std::ostringstream out;
  flatten(r, "", out);
  return out.str();
}

// Oracle comparison of a symbolic image at one point.
Record cross_check(const Expr& f, const TFExpr& F, VarSet vars, const ShehuPoint& pt) {
  const double symbolic = F.eval(pt);
  const double numeric = shehu_numeric(f, pt, vars);
  Record c;
  c["point"] = pt.to_string();
  c["symbolic"] = symbolic;
  c["numeric"] = numeric;
  c["abs_error"] = std::abs(symbolic - numeric);
  c["rel_error"] = relative(symbolic, numeric);
  return c;
}

// Integrands coupling several variables are integrated on a coarser tensor grid.
bool has_coupled_trig(const Expr& f) {
  for (const Term& t : f.terms())
    for (const Atom& a : t.factors)
      if ((std::holds_alternative<Sine>(a) || std::holds_alternative<Cosine>(a)) && support(a).size() > 1)
        return true;
  return false;
}

struct Options {
  bool porcelain = false;
  std::uint64_t seed = kDefaultSeed;
  // transform
  std::string expr;
  std::string vars = "qrst";
  std::optional<int> checks;
  std::string at;
  // invert / solve
  std::optional<double> alpha;
  std::string file;
  std::string box;
  bool solve_check = false;
  // verify
  std::string property;
  int trials = 10;
};

Record run_transform(const Options& o, Record& rec) {
  rec["input"] = o.expr;
  const VarSet vars = VarSet::parse(o.vars);
  rec["vars"] = vars.to_string();
  const Expr f = parse_expr(o.expr);
  const TFExpr F = forward(f, vars);
  rec["result"] = F.to_string();
  bool passed = true;
  if (!o.at.empty()) {
    const ShehuPoint pt = ShehuPoint::parse(o.at);
    pt.validate();
    existence_bound(f, pt);  // throws OutsideRegion
    rec["at"] = cross_check(f, F, vars, pt);
  }
  if (o.checks) {
    if (*o.checks < 1) fail(ErrorKind::Usage, "--check needs a positive count");
    const double tol = has_coupled_trig(f) ? 1e-4 : 1e-6;
    std::mt19937_64 rng(o.seed);
    const auto rates = region_rates(f);
    Record checks = Record::array();
    double worst = 0;
    for (int i = 0; i < *o.checks; ++i) {
      Record c = cross_check(f, F, vars, random_point(rng, rates));
      worst = std::max(worst, c["rel_error"].get<double>());
      checks.push_back(std::move(c));
    }
    passed = worst <= tol;
    rec["check"] = {{"seed", o.seed}, {"tolerance", tol}, {"max_rel_error", worst}, {"passed", passed},
                    {"points", checks}};
  }
  if (!passed) fail(ErrorKind::VerificationFailed, "oracle cross-check exceeded its tolerance");
  return rec;
}

Record run_invert(const Options& o, Record& rec) {
  rec["input"] = o.expr;
  if (o.alpha) rec["alpha"] = *o.alpha;
  const TFExpr F = parse_tf(o.expr);
  const Expr f = inverse(F, o.alpha);
  rec["result"] = f.to_string();
  return rec;
}

Box parse_box(const std::string& text) {
  Box b;
  const auto comma = text.find(',');
  if (comma == std::string::npos) fail(ErrorKind::Usage, "--box expects lo,hi");
  try {
    std::size_t used = 0;
    b.lo = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("trailing");
    const std::string hi = text.substr(comma + 1);
    b.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument("trailing");
  } catch (const std::logic_error&) {
    fail(ErrorKind::Usage, "--box expects two numbers lo,hi");
  }
  if (!(b.lo > 0 && b.hi > b.lo)) fail(ErrorKind::Usage, "--box needs 0 < lo < hi");
  return b;
}

std::string equation_string(const PdeProblem& p) {
  std::string s;
  for (const PdeTerm& t : p.lhs) {
    const std::string c = format_number(std::abs(t.coeff));
    s += s.empty() ? (t.coeff < 0 ? "-" : "") : (t.coeff < 0 ? " - " : " + ");
    if (c != "1") s += c + "*";
    s += t.op.to_string();
  }
  return s + " = " + p.rhs.to_string();
}

Record residual_record(const ResidualReport& r, const Box& box, double tol, bool samples) {
  Record out;
  out["max_abs"] = r.max_abs_residual;
  out["tolerance"] = tol;
  out["box"] = format_number(box.lo) + "," + format_number(box.hi);
  out["n_samples"] = r.residuals.size();
  if (samples) {
    Record list = Record::array();
    for (std::size_t i = 0; i < r.residuals.size(); ++i)
      list.push_back({{"point", point_string(r.sample_points[i])}, {"residual", r.residuals[i]}});
    out["samples"] = list;
  }
  return out;
}

Record run_solve(const Options& o, Record& rec) {
  rec["file"] = o.file;
  const PdeProblem p = load_problem(o.file, o.alpha);
  rec["equation"] = equation_string(p);
  SolveOptions opts;
  if (!o.box.empty()) opts.box = parse_box(o.box);
  opts.seed = o.seed;
  const double tol = p.has_fractional() ? 1e-4 : 1e-9;
  opts.tolerance = tol;
  try {
    const Solution s = solve(p, opts);
    rec["image"] = s.image.to_string();
    rec["result"] = s.expr.to_string();
    rec["residual"] = residual_record(s.verification, opts.box, tol, o.solve_check);
  } catch (const VerificationFailure& e) {
    rec["image"] = e.solution().image.to_string();
    rec["result"] = e.solution().expr.to_string();
    rec["residual"] = residual_record(e.solution().verification, opts.box, tol, true);
    throw;
  }
  return rec;
}

Record run_verify(const Options& o, Record& rec) {
  rec["property"] = o.property;
  rec["trials"] = o.trials;
  rec["seed"] = o.seed;
  const PropertyReport r = verify_property(o.property, o.trials, o.seed);
  rec["passed"] = r.passed;
  rec["tolerance"] = r.tolerance;
  rec["max_error"] = std::isfinite(r.max_error) ? Record(r.max_error) : Record("inf");
  rec["failures"] = r.failures;
  if (!r.ok())
    fail(ErrorKind::VerificationFailed,
         std::to_string(r.trials - r.passed) + " of " + std::to_string(r.trials) + " trials failed");
  return rec;
}

CommandResult finish(Record rec, bool porcelain, const Error* err) {
  CommandResult res;
  Record out;
  out["status"] = err ? "error" : "ok";
  if (err) {
    res.error_kind = std::string(to_string(err->kind()));
    res.error_message = err->what();
    out["error"] = {{"kind", res.error_kind}, {"message", res.error_message}};
    res.exit_code = is_math_failure(err->kind()) ? 2 : 1;
  }
  for (auto& [k, v] : rec.items()) out[k] = v;
  res.ok = err == nullptr;
  res.output = render(out, porcelain);
  return res;
}

}  // namespace

CommandResult run(const std::vector<std::string>& argv) {
  Options o;
  CLI::App app{"Quadruple Shehu transform toolkit", "shehu"};
  app.require_subcommand(1);
  app.add_flag("--porcelain", o.porcelain, "Emit one JSON line instead of key: value lines");

  auto* tr = app.add_subcommand("transform", "Forward transform of a function-domain expression");
  tr->add_option("expr", o.expr, "Expression in q, r, s, t")->required();
  tr->add_option("--vars", o.vars, "Subset of qrst to transform");
  auto* check = tr->add_option("--check", "Compare with quadrature at N random points (default 5)")->expected(0, 1);
  tr->add_option("--at", o.at, "Evaluate at h=..,j=..,k=..,l=..,m=..,n=..,o=..,p=..");

  auto* inv = app.add_subcommand("invert", "Inverse transform of an image expression");
  inv->add_option("tf", o.expr, "Image in h, j, k, l, m, n, o, p")->required();
  inv->add_option("--alpha", o.alpha, "Value of the symbolic fractional order");

  auto* sol = app.add_subcommand("solve", "Solve a PDE problem file");
  sol->add_option("--file", o.file, "Problem file (JSON)")->required();
  sol->add_flag("--check", o.solve_check, "List the residual at every sample point");
  sol->add_option("--box", o.box, "Residual sampling box lo,hi (default 0.1,2)");
  sol->add_option("--alpha", o.alpha, "Override the fractional order");

  auto* ver = app.add_subcommand("verify", "Randomized check of a transform property");
  ver->add_option("--property", o.property, "Property name")
      ->required()
      ->check(CLI::IsMember(property_names()));
  ver->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);

  for (auto* sub : {tr, sol, ver}) sub->add_option("--seed", o.seed, "Seed for sampled points");

  Record rec;
  try {
    std::vector<std::string> args(argv.rbegin(), argv.rend());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    CommandResult res{true, "", "", app.help(), 0};
    return res;
  } catch (const CLI::ParseError& e) {
    const Error err(ErrorKind::Usage, e.what());
    return finish(rec, o.porcelain, &err);
  }

  try {
    if (tr->parsed()) {
      rec["command"] = "transform";
      if (check->count() > 0) {
        o.checks = kDefaultChecks;
        if (!check->results().empty() && !check->results().front().empty()) {
          try {
            std::size_t used = 0;
            const std::string& s = check->results().front();
            o.checks = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
          } catch (const std::logic_error&) {
            fail(ErrorKind::Usage, "--check expects an integer count");
          }
        }
      }
      run_transform(o, rec);
    } else if (inv->parsed()) {
      rec["command"] = "invert";
      run_invert(o, rec);
    } else if (sol->parsed()) {
      rec["command"] = "solve";
      run_solve(o, rec);
    } else {
      rec["command"] = "verify";
      run_verify(o, rec);
    }
  } catch (const Error& e) {
    return finish(rec, o.porcelain, &e);
  }
  return finish(rec, o.porcelain, nullptr);
}

}  // namespace shehu::cli
