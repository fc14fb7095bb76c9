#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shehu {

// Function-domain variables; each is bound to the transform pair
// q <-> (h, m), r <-> (j, n), s <-> (k, o), t <-> (l, p).
enum class Var : std::uint8_t { q = 0, r = 1, s = 2, t = 3 };

inline constexpr std::array<Var, 4> kVars{Var::q, Var::r, Var::s, Var::t};

constexpr int index(Var v) { return static_cast<int>(v); }
constexpr Var var_at(int i) { return static_cast<Var>(i); }
constexpr char var_char(Var v) { return "qrst"[index(v)]; }
constexpr char param_char(int pair) { return "hjkl"[pair]; }
constexpr char mate_char(int pair) { return "mnop"[pair]; }

std::optional<Var> var_from_char(char c);

using Point4 = std::array<double, 4>;

class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint8_t bits) : bits_(bits & 0xF) {}
  static constexpr VarSet all() { return VarSet(0xF); }
  static constexpr VarSet of(Var v) { return VarSet(static_cast<std::uint8_t>(1u << index(v))); }
  // Parses a subset such as "qrst" or "qt"; throws on unknown letters or repeats.
  static VarSet parse(std::string_view text);

  constexpr bool contains(Var v) const { return (bits_ >> index(v)) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  int size() const;
  std::vector<Var> vars() const;
  std::string to_string() const;

  constexpr VarSet with(Var v) const { return VarSet(bits_ | (1u << index(v))); }
  constexpr VarSet without(Var v) const { return VarSet(bits_ & ~(1u << index(v))); }
  constexpr VarSet operator|(VarSet o) const { return VarSet(bits_ | o.bits_); }
  constexpr VarSet operator&(VarSet o) const { return VarSet(bits_ & o.bits_); }
  constexpr VarSet operator-(VarSet o) const { return VarSet(bits_ & ~o.bits_); }
  constexpr bool subset_of(VarSet o) const { return (bits_ & ~o.bits_) == 0; }
  friend constexpr bool operator==(VarSet, VarSet) = default;
  friend constexpr auto operator<=>(VarSet, VarSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

// Numeric assignment of the eight transform parameters.
struct ShehuPoint {
  std::array<double, 4> param{1, 1, 1, 1};  // h j k l
  std::array<double, 4> mate{1, 1, 1, 1};   // m n o p

  static ShehuPoint uniform(double p, double m);
  double ratio(int pair) const { return param[pair] / mate[pair]; }
  // Throws Usage unless all eight values are finite and strictly positive.
  void validate() const;
  std::string to_string() const;  // "h=2,j=2,k=2,l=2,m=1,n=1,o=1,p=1"
  // Parses the to_string format; unspecified parameters default to 1.
  static ShehuPoint parse(std::string_view text);
};

}  // namespace shehu
