#include <charconv>
#include <cmath>
#include <string>

#include "shehu/error.hpp"
#include "shehu/format.hpp"
#include "shehu/vars.hpp"

namespace shehu {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "Syntax";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::Domain: return "Domain";
    case ErrorKind::Pole: return "Pole";
    case ErrorKind::Algebra: return "Algebra";
    case ErrorKind::Untransformable: return "Untransformable";
    case ErrorKind::NoClosedFormInverse: return "NoClosedFormInverse";
    case ErrorKind::OutsideRegion: return "OutsideRegion";
    case ErrorKind::MissingCondition: return "MissingCondition";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

bool is_math_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax:
    case ErrorKind::KindMismatch:
    case ErrorKind::Usage:
      return false;
    default:
      return true;
  }
}

std::string format_number(double value) {
  if (value == 0) return "0";  // also folds -0
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::optional<Var> var_from_char(char c) {
  switch (c) {
    case 'q': return Var::q;
    case 'r': return Var::r;
    case 's': return Var::s;
    case 't': return Var::t;
    default: return std::nullopt;
  }
}

VarSet VarSet::parse(std::string_view text) {
  VarSet out;
  for (char c : text) {
    auto v = var_from_char(c);
    if (!v) fail(ErrorKind::Usage, std::string("unknown variable '") + c + "' in variable set");
    if (out.contains(*v)) fail(ErrorKind::Usage, std::string("variable '") + c + "' repeated");
    out = out.with(*v);
  }
  if (out.empty()) fail(ErrorKind::Usage, "empty variable set");
  return out;
}

int VarSet::size() const { return __builtin_popcount(bits_); }

std::vector<Var> VarSet::vars() const {
  std::vector<Var> out;
  for (Var v : kVars)
    if (contains(v)) out.push_back(v);
  return out;
}

std::string VarSet::to_string() const {
  std::string out;
  for (Var v : vars()) out += var_char(v);
  return out;
}

ShehuPoint ShehuPoint::uniform(double p, double m) {
  ShehuPoint pt;
  pt.param.fill(p);
  pt.mate.fill(m);
  return pt;
}

void ShehuPoint::validate() const {
  for (int i = 0; i < 4; ++i) {
    if (!(std::isfinite(param[i]) && param[i] > 0) || !(std::isfinite(mate[i]) && mate[i] > 0))
      fail(ErrorKind::Usage, "transform parameters must be finite and strictly positive: " + to_string());
  }
}

std::string ShehuPoint::to_string() const {
  std::string out;
  for (int i = 0; i < 4; ++i) out += std::string(i ? "," : "") + param_char(i) + "=" + format_number(param[i]);
  for (int i = 0; i < 4; ++i) out += std::string(",") + mate_char(i) + "=" + format_number(mate[i]);
  return out;
}

ShehuPoint ShehuPoint::parse(std::string_view text) {
  ShehuPoint pt;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    if (item.size() < 3 || item[1] != '=')
      fail(ErrorKind::Usage, "expected name=value in point specification, got '" + std::string(item) + "'");
    double value = 0;
    auto [ptr, ec] = std::from_chars(item.data() + 2, item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size())
      fail(ErrorKind::Usage, "bad number in point specification: '" + std::string(item) + "'");
    bool found = false;
    for (int i = 0; i < 4; ++i) {
      if (item[0] == param_char(i)) pt.param[i] = value, found = true;
      if (item[0] == mate_char(i)) pt.mate[i] = value, found = true;
    }
    if (!found) fail(ErrorKind::Usage, std::string("unknown transform parameter '") + item[0] + "'");
    pos = comma + 1;
  }
  pt.validate();
  return pt;
}

}  // namespace shehu
