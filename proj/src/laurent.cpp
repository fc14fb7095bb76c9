#include "shehu/laurent.hpp"

#include <algorithm>
#include <cmath>

#include "shehu/error.hpp"

namespace shehu {

namespace {

constexpr double kQuantum = 1e9;

int param_slot(int pair) { return 2 * pair; }
int mate_slot(int pair) { return 2 * (4 + pair); }

Monomial single(int slot, Exponent e) {
  Monomial m;
  m.power[slot] = quantize(e.value);
  m.power[slot + 1] = quantize(e.alpha);
  return m;
}

LaurentPoly binomial_sum(std::initializer_list<std::pair<Monomial, double>> items) {
  LaurentPoly p;
  for (const auto& [m, c] : items)
    if (c != 0) p.add(m, c);
  return p;
}

}  // namespace

std::int64_t quantize(double v) { return std::llround(v * kQuantum); }
double dequantize(std::int64_t v) { return static_cast<double>(v) / kQuantum; }

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < power.size(); ++i) r.power[i] = power[i] + o.power[i];
  for (std::size_t i = 0; i < shift.size(); ++i) r.shift[i] = shift[i] + o.shift[i];
  for (std::size_t i = 0; i < opaque.size(); ++i) r.opaque[i] = opaque[i] + o.opaque[i];
  return r;
}

Monomial Monomial::inverse() const {
  Monomial r;
  for (std::size_t i = 0; i < power.size(); ++i) r.power[i] = -power[i];
  for (std::size_t i = 0; i < shift.size(); ++i) r.shift[i] = -shift[i];
  for (std::size_t i = 0; i < opaque.size(); ++i) r.opaque[i] = -opaque[i];
  return r;
}

LaurentPoly LaurentPoly::constant(double c) { return monomial(Monomial{}, c); }

LaurentPoly LaurentPoly::monomial(const Monomial& m, double c) {
  LaurentPoly p;
  if (c != 0) p.terms_[m] = c;
  return p;
}

double LaurentPoly::max_abs() const {
  double m = 0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void LaurentPoly::add(const Monomial& m, double c) {
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void LaurentPoly::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r = a;
  for (const auto& [m, c] : b.terms_) r.add(m, c);
  return r;
}

LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r = a;
  for (const auto& [m, c] : b.terms_) r.add(m, -c);
  return r;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add(ma * mb, ca * cb);
  return r;
}

LaurentPoly operator*(double k, const LaurentPoly& a) {
  LaurentPoly r;
  for (const auto& [m, c] : a.terms_) r.add(m, k * c);
  return r;
}

LaurentPoly LaurentPoly::pow(int k) const {
  LaurentPoly r = constant(1);
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

std::optional<LaurentPoly> divide_exact(const LaurentPoly& n, const LaurentPoly& d, double rel_tol) {
  if (d.empty()) fail(ErrorKind::Algebra, "division by a zero polynomial");
  if (n.empty()) return LaurentPoly{};
  const double tol = rel_tol * n.max_abs();
  const auto& [lead_m, lead_c] = *d.terms().rbegin();
  const Monomial lead_inv = lead_m.inverse();
  LaurentPoly q, r = n;
  // Lex order is compatible with multiplication, so an exact quotient is
  // recovered one leading term at a time; a non-exact division never ends.
  constexpr int kMaxSteps = 4096;
  for (int step = 0; !r.empty(); ++step) {
    if (step >= kMaxSteps) return std::nullopt;
    const auto& [rm, rc] = *r.terms().rbegin();
    const Monomial qm = rm * lead_inv;
    const double qc = rc / lead_c;
    q.add(qm, qc);
    r = r - LaurentPoly::monomial(qm, qc) * d;
    r.prune(tol);
  }
  return q;
}

// ---- RationalContext ----

int RationalContext::intern(const TFBase& b, Exponent e, int& sign) {
  sign = 1;
  if (e.value < 0 || (e.value == 0 && e.alpha < 0)) {
    e = -e;
    sign = -1;
  }
  for (std::size_t i = 0; i < opaque_.size(); ++i)
    if (opaque_[i].first == b && opaque_[i].second == e) return static_cast<int>(i);
  if (opaque_.size() >= Monomial::kOpaqueSlots)
    fail(ErrorKind::Algebra, "too many distinct non-polynomial factors in one comparison");
  opaque_.emplace_back(b, e);
  return static_cast<int>(opaque_.size() - 1);
}

std::optional<LaurentPoly> RationalContext::expand(const TFBase& b) const {
  const Monomial P = single(param_slot(b.pair), Exponent::of(1));
  const Monomial M = single(mate_slot(b.pair), Exponent::of(1));
  switch (b.kind) {
    case BaseKind::Linear: return binomial_sum({{P, b.x}, {M, b.y}});
    case BaseKind::Quadratic:
      return binomial_sum({{P * P, 1.0}, {P * M, 2 * b.y}, {M * M, b.y * b.y + b.z * b.z}});
    case BaseKind::MittagLeffler: {
      if (b.y != 0) return std::nullopt;
      double k = 1;
      if (b.x != 1) {
        if (!b.order.is_numeric() || b.x < 0) return std::nullopt;
        k = std::pow(b.x, b.order.value);
      }
      Monomial ratio = single(param_slot(b.pair), b.order) * single(mate_slot(b.pair), -b.order);
      return binomial_sum({{ratio, k}, {Monomial{}, -b.c}});
    }
    case BaseKind::Exponential: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<LaurentPoly> RationalContext::over_common_denominator(const std::vector<TFExpr>& xs, Denominator& den) {
  struct Split {
    double coeff;
    Monomial mono;
    std::vector<std::pair<LaurentPoly, int>> positive;
    std::map<TFBase, int> need;
  };
  std::vector<std::vector<Split>> all;
  for (const TFExpr& x : xs) {
    std::vector<Split> terms;
    for (const TFTerm& t : x.terms()) {
      Split s{t.coeff, {}, {}, {}};
      for (const TFFactor& f : t.factors) {
        const TFBase& b = f.base;
        if (b.is_param()) s.mono = s.mono * single(param_slot(b.pair), f.power);
        else if (b.is_mate()) s.mono = s.mono * single(mate_slot(b.pair), f.power);
        else if (b.kind == BaseKind::Exponential) s.mono.shift[b.pair] += quantize(b.x * f.power.value);
        else if (auto poly = expand(b); poly && f.power.is_integer()) {
          const int k = static_cast<int>(f.power.value);
          if (k > 0) s.positive.emplace_back(*poly, k);
          else {
            s.need[b] += -k;
            den[b] = std::max(den[b], s.need[b]);
          }
        } else {
          int sign = 1;
          const int id = intern(b, f.power, sign);
          s.mono.opaque[id] += sign;
        }
      }
      terms.push_back(std::move(s));
    }
    all.push_back(std::move(terms));
  }
  std::vector<LaurentPoly> out;
  for (const auto& terms : all) {
    LaurentPoly sum;
    for (const Split& s : terms) {
      LaurentPoly p = LaurentPoly::monomial(s.mono, s.coeff);
      for (const auto& [poly, k] : s.positive) p = p * poly.pow(k);
      for (const auto& [b, k] : den) {
        auto it = s.need.find(b);
        const int have = it == s.need.end() ? 0 : it->second;
        if (k > have) p = p * expand(b)->pow(k - have);
      }
      sum = sum + p;
    }
    out.push_back(std::move(sum));
  }
  return out;
}

TFExpr RationalContext::to_tf(const LaurentPoly& numerator, const Denominator& den) const {
  std::vector<TFTerm> terms;
  for (const auto& [m, c] : numerator.terms()) {
    TFTerm t{c, {}};
    for (int pair = 0; pair < 4; ++pair) {
      const int ps = param_slot(pair), ms = mate_slot(pair);
      Exponent pe{dequantize(m.power[ps]), dequantize(m.power[ps + 1])};
      Exponent me{dequantize(m.power[ms]), dequantize(m.power[ms + 1])};
      if (!pe.is_zero()) t.factors.push_back({TFBase::param(pair), pe});
      if (!me.is_zero()) t.factors.push_back({TFBase::mate(pair), me});
      if (m.shift[pair] != 0)
        t.factors.push_back({TFBase::exponential(pair, dequantize(m.shift[pair])), Exponent::of(1)});
    }
    for (std::size_t i = 0; i < opaque_.size(); ++i)
      if (m.opaque[i] != 0) t.factors.push_back({opaque_[i].first, static_cast<double>(m.opaque[i]) * opaque_[i].second});
    for (const auto& [b, k] : den)
      if (k > 0) t.factors.push_back({b, Exponent::of(-k)});
    terms.push_back(std::move(t));
  }
  return TFExpr(std::move(terms));
}

}  // namespace shehu
