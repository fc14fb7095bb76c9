#include "shehu/parser.hpp"

#include <cctype>
#include <charconv>
#include <climits>
#include <cmath>
#include <map>
#include <optional>
#include <numbers>
#include <string>

#include "shehu/error.hpp"
#include "shehu/format.hpp"

namespace shehu {

namespace {

// ---- tokens ----

enum class Tok { Num, Ident, Op, End };

struct Token {
  Tok kind;
  std::string text;
  double value = 0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(s[i + 1]))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      double v = 0;
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, v);
      if (ec != std::errc() || ptr != s.data() + j) throw SyntaxError(i, "malformed number");
      out.push_back({Tok::Num, std::string(s.substr(i, j - i)), v, i});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), 0, i});
      i = j;
      continue;
    }
    if (std::string_view("+-*/^(),;").find(c) != std::string_view::npos) {
      out.push_back({Tok::Op, std::string(1, c), 0, i});
      ++i;
      continue;
    }
    throw SyntaxError(i, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::End, "", 0, s.size()});
  return out;
}

// ---- AST ----

enum class K { Num, Sym, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node {
  K kind = K::Num;
  std::size_t pos = 0;
  double value = 0;
  std::string name{};
  std::vector<Node> kids{};
  int split = -1;  // ml: index of the first argument after ';'
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Node parse_all() {
    Node n = expr();
    if (peek().kind != Tok::End) throw SyntaxError(peek().pos, "unexpected '" + peek().text + "'");
    return n;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
  void expect(const char* op) {
    if (!is_op(op)) throw SyntaxError(peek().pos, std::string("expected '") + op + "'");
    ++i_;
  }

  Node expr() {
    Node lhs = term();
    while (is_op("+") || is_op("-")) {
      const Token& op = toks_[i_++];
      Node rhs = term();
      lhs = Node{op.text == "+" ? K::Add : K::Sub, op.pos, 0, "", {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  Node term() {
    Node lhs = unary();
    while (is_op("*") || is_op("/")) {
      const Token& op = toks_[i_++];
      Node rhs = unary();
      lhs = Node{op.text == "*" ? K::Mul : K::Div, op.pos, 0, "", {std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  Node unary() {
    if (is_op("-")) {
      std::size_t pos = toks_[i_++].pos;
      return Node{K::Neg, pos, 0, "", {unary()}};
    }
    if (is_op("+")) {
      ++i_;
      return unary();
    }
    return power();
  }

  Node power() {
    Node base = primary();
    if (is_op("^")) {
      std::size_t pos = toks_[i_++].pos;
      Node e;
      if (is_op("-")) {
        std::size_t p = toks_[i_++].pos;
        e = Node{K::Neg, p, 0, "", {primary()}};
      } else {
        if (is_op("+")) ++i_;
        e = primary();
      }
      return Node{K::Pow, pos, 0, "", {std::move(base), std::move(e)}};
    }
    return base;
  }

  Node primary() {
    const Token& t = peek();
    if (t.kind == Tok::Num) {
      ++i_;
      return Node{K::Num, t.pos, t.value};
    }
    if (t.kind == Tok::Ident) {
      ++i_;
      if (is_op("(")) {
        ++i_;
        Node call{K::Call, t.pos, 0, t.text};
        if (!is_op(")")) {
          call.kids.push_back(expr());
          while (is_op(",") || is_op(";")) {
            if (is_op(";")) {
              if (call.split >= 0) throw SyntaxError(peek().pos, "second ';' in argument list");
              call.split = static_cast<int>(call.kids.size());
            }
            ++i_;
            call.kids.push_back(expr());
          }
        }
        expect(")");
        return call;
      }
      return Node{K::Sym, t.pos, 0, t.text};
    }
    if (is_op("(")) {
      ++i_;
      Node n = expr();
      expect(")");
      return n;
    }
    if (t.kind == Tok::End) throw SyntaxError(t.pos, "unexpected end of input");
    throw SyntaxError(t.pos, "unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// ---- domain detection ----

enum class Domain { Unknown, Function, Transform };

bool is_function_symbol(const std::string& s) { return s.size() == 1 && std::string_view("qrst").find(s[0]) != std::string_view::npos; }
int param_pair(const std::string& s) {
  if (s.size() != 1) return -1;
  auto p = std::string_view("hjkl").find(s[0]);
  return p == std::string_view::npos ? -1 : static_cast<int>(p);
}
int mate_pair(const std::string& s) {
  if (s.size() != 1) return -1;
  auto p = std::string_view("mnop").find(s[0]);
  return p == std::string_view::npos ? -1 : static_cast<int>(p);
}

Domain detect(const std::vector<Token>& toks) {
  bool fn = false, tf = false;
  std::size_t fn_pos = 0, tf_pos = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind != Tok::Ident) continue;
    const bool call = i + 1 < toks.size() && toks[i + 1].kind == Tok::Op && toks[i + 1].text == "(";
    const std::string& s = t.text;
    if (call && (s == "exp")) continue;
    if (call && (s == "sin" || s == "cos" || s == "ml" || s == "U")) {
      if (!fn) fn_pos = t.pos;
      fn = true;
      continue;
    }
    if (call) throw SyntaxError(t.pos, "unknown function '" + s + "'");
    if (s == "pi") continue;
    if (is_function_symbol(s)) {
      if (!fn) fn_pos = t.pos;
      fn = true;
    } else if (param_pair(s) >= 0 || mate_pair(s) >= 0 || s == "alpha") {
      if (!tf) tf_pos = t.pos;
      tf = true;
    } else {
      throw SyntaxError(t.pos, "unknown symbol '" + s + "'");
    }
  }
  if (fn && tf)
    fail(ErrorKind::KindMismatch, "expression mixes function variables (position " + std::to_string(fn_pos) +
                                      ") with transform parameters (position " + std::to_string(tf_pos) + ")");
  return fn ? Domain::Function : tf ? Domain::Transform : Domain::Unknown;
}

// ---- shared helpers ----

std::optional<double> constant_of(const Node& n) {
  switch (n.kind) {
    case K::Num: return n.value;
    case K::Sym:
      if (n.name == "pi") return std::numbers::pi;
      return std::nullopt;
    case K::Neg: {
      auto a = constant_of(n.kids[0]);
      return a ? std::optional(-*a) : std::nullopt;
    }
    case K::Add:
    case K::Sub:
    case K::Mul:
    case K::Div:
    case K::Pow: {
      auto a = constant_of(n.kids[0]);
      auto b = constant_of(n.kids[1]);
      if (!a || !b) return std::nullopt;
      switch (n.kind) {
        case K::Add: return *a + *b;
        case K::Sub: return *a - *b;
        case K::Mul: return *a * *b;
        case K::Div: return *a / *b;
        default: return std::pow(*a, *b);
      }
    }
    case K::Call:
      if (n.name == "exp" && n.kids.size() == 1 && n.split < 0) {
        auto a = constant_of(n.kids[0]);
        return a ? std::optional(std::exp(*a)) : std::nullopt;
      }
      return std::nullopt;
  }
  return std::nullopt;
}

double require_constant(const Node& n, const char* what) {
  auto v = constant_of(n);
  if (!v) throw SyntaxError(n.pos, std::string(what) + " must be a numeric constant");
  if (!std::isfinite(*v)) throw SyntaxError(n.pos, std::string(what) + " is not finite");
  return *v;
}

// ---- function domain ----

Expr to_expr(const Node& n);

struct LinearPart {
  LinearForm form;
  double constant = 0;
};

LinearPart linear_of(const Node& n) {
  Expr e = to_expr(n);
  LinearPart out;
  for (const Term& t : e.terms()) {
    if (t.factors.empty()) {
      out.constant += t.coeff;
      continue;
    }
    const Power* p = t.factors.size() == 1 ? std::get_if<Power>(&t.factors[0]) : nullptr;
    if (!p || p->exponent != 1) throw SyntaxError(n.pos, "expected a linear form in q, r, s, t");
    out.form[p->var] += t.coeff;
  }
  return out;
}

Expr single_call_arg(const Node& n) {
  if (n.kids.size() != 1 || n.split >= 0) throw SyntaxError(n.pos, n.name + "() takes one argument");
  return Expr{};
}

Expr call_to_expr(const Node& n) {
  if (n.name == "exp" || n.name == "sin" || n.name == "cos") {
    single_call_arg(n);
    LinearPart lp = linear_of(n.kids[0]);
    const double c = lp.constant;
    if (n.name == "exp") {
      if (lp.form.is_zero()) return Expr::constant(std::exp(c));
      return Expr::atom(Exponential{lp.form}, std::exp(c));
    }
    if (lp.form.is_zero()) return Expr::constant(n.name == "sin" ? std::sin(c) : std::cos(c));
    Expr s = Expr::atom(Sine{lp.form}), co = Expr::atom(Cosine{lp.form});
    if (c == 0) return n.name == "sin" ? s : co;
    // addition formulas for the constant phase
    if (n.name == "sin") return std::cos(c) * s + std::sin(c) * co;
    return std::cos(c) * co - std::sin(c) * s;
  }
  if (n.name == "ml") {
    if (n.split < 1 || n.split > 2 || static_cast<int>(n.kids.size()) != n.split + 1)
      throw SyntaxError(n.pos, "expected ml(gamma[, beta]; c*v^gamma)");
    const double g = require_constant(n.kids[0], "Mittag-Leffler gamma");
    const double b = n.split == 2 ? require_constant(n.kids[1], "Mittag-Leffler beta") : 1.0;
    if (!(g > 0) || !(b > 0)) throw SyntaxError(n.pos, "Mittag-Leffler indices must be positive");
    const Node& inner = n.kids.back();
    Expr e = to_expr(inner);
    const Power* p = nullptr;
    if (e.terms().size() == 1 && e.terms()[0].factors.size() == 1) p = std::get_if<Power>(&e.terms()[0].factors[0]);
    if (!p || std::abs(p->exponent - g) > 1e-12 * std::max(1.0, g))
      throw SyntaxError(inner.pos, "Mittag-Leffler inner form must be c*var^gamma with the same gamma");
    return Expr::atom(MittagLeffler{g, b, e.terms()[0].coeff, p->var});
  }
  if (n.name == "U") {
    if (n.kids.empty() || n.split >= 0) throw SyntaxError(n.pos, "expected U(v - a, ...)");
    Heaviside h;
    for (const Node& k : n.kids) {
      LinearPart lp = linear_of(k);
      VarSet s = lp.form.support();
      if (s.size() != 1) throw SyntaxError(k.pos, "each step argument must be var - shift");
      Var v = s.vars()[0];
      if (lp.form[v] != 1) throw SyntaxError(k.pos, "step argument must have unit coefficient");
      if (-lp.constant < 0) throw SyntaxError(k.pos, "step shifts must be nonnegative");
      if (h.vars.contains(v)) throw SyntaxError(k.pos, "variable repeated in step");
      h.vars = h.vars.with(v);
      h.shift[index(v)] = -lp.constant;
    }
    return Expr::atom(h);
  }
  throw SyntaxError(n.pos, "unknown function '" + n.name + "'");
}

Expr expr_pow(const Expr& base, double k, std::size_t pos) {
  if (k >= 0 && k == std::floor(k) && k <= 64) {
    Expr out = Expr::constant(1);
    for (int i = 0; i < static_cast<int>(k); ++i) out = out * base;
    return out;
  }
  if (base.terms().size() != 1) throw SyntaxError(pos, "non-integer power of a sum");
  const Term& t = base.terms()[0];
  if (t.coeff < 0) throw SyntaxError(pos, "negative base under a non-integer power");
  Term r{std::pow(t.coeff, k), {}};
  for (const Atom& a : t.factors) {
    if (auto* p = std::get_if<Power>(&a)) r.factors.push_back(Power{p->var, p->exponent * k});
    else if (auto* e = std::get_if<Exponential>(&a)) r.factors.push_back(Exponential{e->form.scaled(k)});
    else throw SyntaxError(pos, "non-integer power of " + to_string(a));
  }
  return Expr({r});
}

Expr to_expr(const Node& n) {
  switch (n.kind) {
    case K::Num: return Expr::constant(n.value);
    case K::Sym: {
      if (n.name == "pi") return Expr::constant(std::numbers::pi);
      if (auto v = n.name.size() == 1 ? var_from_char(n.name[0]) : std::nullopt) return Expr::var(*v);
      throw SyntaxError(n.pos, "unknown symbol '" + n.name + "'");
    }
    case K::Neg: return -to_expr(n.kids[0]);
    case K::Add: return to_expr(n.kids[0]) + to_expr(n.kids[1]);
    case K::Sub: return to_expr(n.kids[0]) - to_expr(n.kids[1]);
    case K::Mul: return to_expr(n.kids[0]) * to_expr(n.kids[1]);
    case K::Div: {
      const double d = require_constant(n.kids[1], "divisor");
      if (d == 0) throw SyntaxError(n.kids[1].pos, "division by zero");
      return (1.0 / d) * to_expr(n.kids[0]);
    }
    case K::Pow: return expr_pow(to_expr(n.kids[0]), require_constant(n.kids[1], "exponent"), n.pos);
    case K::Call: return call_to_expr(n);
  }
  return Expr{};
}

// ---- transform domain ----

TFExpr to_tf(const Node& n);

Exponent exponent_of(const Node& n) {
  switch (n.kind) {
    case K::Num: return Exponent::of(n.value);
    case K::Sym:
      if (n.name == "alpha") return {0, 1};
      if (n.name == "pi") return Exponent::of(std::numbers::pi);
      break;
    case K::Neg: return -exponent_of(n.kids[0]);
    case K::Add: return exponent_of(n.kids[0]) + exponent_of(n.kids[1]);
    case K::Sub: return exponent_of(n.kids[0]) - exponent_of(n.kids[1]);
    case K::Mul: {
      Exponent a = exponent_of(n.kids[0]), b = exponent_of(n.kids[1]);
      if (a.is_numeric()) return a.value * b;
      if (b.is_numeric()) return b.value * a;
      break;
    }
    case K::Div: {
      Exponent a = exponent_of(n.kids[0]);
      double d = require_constant(n.kids[1], "exponent divisor");
      return (1.0 / d) * a;
    }
    default: break;
  }
  throw SyntaxError(n.pos, "exponent must be affine in alpha");
}

// Rewrites a sum as one product term: a polynomial in P/M of degree <= 2 is
// factored into linear/quadratic bases; c1*(ratio)^g + c0 becomes a
// Mittag-Leffler denominator base.
TFExpr as_single_term(const TFExpr& s, std::size_t pos) {
  const auto& terms = s.terms();
  int pair = -1;
  bool polynomial = true;
  for (const TFTerm& t : terms)
    for (const TFFactor& f : t.factors) {
      if (pair >= 0 && f.base.pair != pair) throw SyntaxError(pos, "sum over several parameter pairs cannot be factored");
      pair = f.base.pair;
      if (!(f.base.is_param() || f.base.is_mate()) || !f.power.is_integer()) polynomial = false;
    }
  if (pair < 0) return s;  // constant
  if (polynomial) {
    std::map<int, double> coeff;  // power of s = P/M -> coefficient
    int degree = INT_MIN;
    for (const TFTerm& t : terms) {
      int a = 0, d = 0;
      for (const TFFactor& f : t.factors) {
        const int e = static_cast<int>(f.power.value);
        d += e;
        if (f.base.is_param()) a += e;
      }
      if (degree != INT_MIN && d != degree) throw SyntaxError(pos, "inhomogeneous sum in a denominator");
      degree = d;
      coeff[a] += t.coeff;
    }
    const int lo = coeff.begin()->first, hi = coeff.rbegin()->first;
    auto c = [&](int k) { return coeff.count(lo + k) ? coeff[lo + k] : 0.0; };
    std::vector<TFFactor> fs{{TFBase::param(pair), Exponent::of(lo)}};
    double lead = 0;
    if (hi - lo == 1) {
      lead = c(1);
      fs.push_back({TFBase::linear(pair, 1, c(0) / lead), Exponent::of(1)});
      fs.push_back({TFBase::mate(pair), Exponent::of(degree - lo - 1)});
    } else if (hi - lo == 2) {
      lead = c(2);
      const double b = c(1) / lead, k0 = c(0) / lead;
      const double disc = b * b / 4 - k0;
      if (disc < 0) {
        fs.push_back({TFBase::quadratic(pair, b / 2, std::sqrt(-disc)), Exponent::of(1)});
      } else {
        const double r = std::sqrt(disc);
        fs.push_back({TFBase::linear(pair, 1, b / 2 - r), Exponent::of(1)});
        fs.push_back({TFBase::linear(pair, 1, b / 2 + r), Exponent::of(1)});
      }
      fs.push_back({TFBase::mate(pair), Exponent::of(degree - lo - 2)});
    } else {
      throw SyntaxError(pos, "only sums of degree <= 2 in one parameter pair can be factored");
    }
    return TFExpr({TFTerm{lead, fs}});
  }
  if (terms.size() == 2) {
    for (int i = 0; i < 2; ++i) {
      const TFTerm& k = terms[i];
      const TFTerm& t = terms[1 - i];
      if (!k.factors.empty() || t.factors.size() != 2) continue;
      const TFFactor* lin = nullptr;
      const TFFactor* mate = nullptr;
      for (const TFFactor& f : t.factors) {
        if (f.base.is_mate()) mate = &f;
        else if (f.base.kind == BaseKind::Linear && f.base.x == 1) lin = &f;
      }
      if (!lin || !mate || mate->power != -lin->power) continue;
      return TFExpr({TFTerm{t.coeff, {{TFBase::mittag_leffler(pair, 1, lin->base.y, lin->power, -k.coeff / t.coeff),
                                       Exponent::of(1)}}}});
    }
  }
  throw SyntaxError(pos, "sum cannot be written as a single factor of the transform algebra");
}

TFExpr to_tf(const Node& n);

// Converts a product/quotient/power tree into a single term, factoring each
// sum on the way instead of expanding products of sums.
TFExpr to_tf_factored(const Node& n) {
  switch (n.kind) {
    case K::Mul: return to_tf_factored(n.kids[0]) * to_tf_factored(n.kids[1]);
    case K::Div: {
      TFExpr d = to_tf_factored(n.kids[1]);
      if (d.is_zero()) throw SyntaxError(n.kids[1].pos, "division by zero");
      return to_tf_factored(n.kids[0]) * d.inverse_of_term();
    }
    case K::Neg: return -to_tf_factored(n.kids[0]);
    case K::Pow: return pow(to_tf_factored(n.kids[0]), exponent_of(n.kids[1]));
    default: {
      TFExpr t = to_tf(n);
      return t.terms().size() > 1 ? as_single_term(t, n.pos) : t;
    }
  }
}

TFExpr to_tf(const Node& n) {
  switch (n.kind) {
    case K::Num: return TFExpr::constant(n.value);
    case K::Sym: {
      if (n.name == "pi") return TFExpr::constant(std::numbers::pi);
      if (int p = param_pair(n.name); p >= 0) return TFExpr::factor(TFBase::param(p));
      if (int p = mate_pair(n.name); p >= 0) return TFExpr::factor(TFBase::mate(p));
      if (n.name == "alpha") throw SyntaxError(n.pos, "alpha may only appear in exponents");
      throw SyntaxError(n.pos, "unknown symbol '" + n.name + "'");
    }
    case K::Neg: return -to_tf(n.kids[0]);
    case K::Add: return to_tf(n.kids[0]) + to_tf(n.kids[1]);
    case K::Sub: return to_tf(n.kids[0]) - to_tf(n.kids[1]);
    case K::Mul: return to_tf(n.kids[0]) * to_tf(n.kids[1]);
    case K::Div: {
      TFExpr d = to_tf_factored(n.kids[1]);
      if (d.is_zero()) throw SyntaxError(n.kids[1].pos, "division by zero");
      return to_tf(n.kids[0]) * d.inverse_of_term();
    }
    case K::Pow: {
      TFExpr b = to_tf(n.kids[0]);
      Exponent e = exponent_of(n.kids[1]);
      if (b.terms().size() > 1 && !(e.is_integer() && e.value >= 0)) b = as_single_term(b, n.kids[0].pos);
      return pow(b, e);
    }
    case K::Call: {
      if (n.name != "exp") throw SyntaxError(n.pos, n.name + "() is not part of the transform-domain grammar");
      if (n.kids.size() != 1 || n.split >= 0) throw SyntaxError(n.pos, "exp() takes one argument");
      TFExpr a = to_tf(n.kids[0]);
      std::vector<TFFactor> fs;
      double c = 1;
      for (const TFTerm& t : a.terms()) {
        if (t.factors.empty()) {
          c *= std::exp(t.coeff);
          continue;
        }
        const auto& f = t.factors;
        const bool ratio = f.size() == 2 && f[0].base.pair == f[1].base.pair &&
                           ((f[0].base.is_param() && f[0].power == Exponent::of(1) && f[1].base.is_mate() &&
                             f[1].power == Exponent::of(-1)) ||
                            (f[1].base.is_param() && f[1].power == Exponent::of(1) && f[0].base.is_mate() &&
                             f[0].power == Exponent::of(-1)));
        if (!ratio) throw SyntaxError(n.pos, "exp() argument must be a combination of P/M ratios");
        fs.push_back({TFBase::exponential(f[0].base.pair, -t.coeff), Exponent::of(1)});
      }
      return TFExpr({TFTerm{c, fs}});
    }
  }
  return TFExpr{};
}

Node parse_ast(std::string_view text, std::vector<Token>& toks) {
  toks = tokenize(text);
  return Parser(toks).parse_all();
}

}  // namespace

AnyExpr parse(std::string_view text) {
  std::vector<Token> toks;
  Node n = parse_ast(text, toks);
  if (detect(toks) == Domain::Transform) return to_tf(n);
  return to_expr(n);
}

Expr parse_expr(std::string_view text) {
  std::vector<Token> toks;
  Node n = parse_ast(text, toks);
  if (detect(toks) == Domain::Transform)
    fail(ErrorKind::KindMismatch, "expected a function of q, r, s, t but got a transform-domain expression");
  return to_expr(n);
}

TFExpr parse_tf(std::string_view text) {
  std::vector<Token> toks;
  Node n = parse_ast(text, toks);
  if (detect(toks) == Domain::Function)
    fail(ErrorKind::KindMismatch, "expected a transform-domain expression but got a function of q, r, s, t");
  return to_tf(n);
}

}  // namespace shehu
