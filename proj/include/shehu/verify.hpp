#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "shehu/expr.hpp"
#include "shehu/vars.hpp"

namespace shehu {

// Randomized checks of the operational rules against the quadrature oracle.
struct PropertyReport {
  std::string property;
  int trials = 0;
  int passed = 0;
  double max_error = 0;  // worst relative error seen
  double tolerance = 0;
  std::vector<std::string> failures;
  bool ok() const { return trials > 0 && passed == trials; }
};

const std::vector<std::string>& property_names();
// Ten transformable expressions exercised by every property.
const std::vector<std::string>& property_corpus();
// Expressions whose inverse reproduces them structurally.
const std::vector<std::string>& roundtrip_corpus();
// Exponential/constant pairs for the convolution identity.
const std::vector<std::pair<std::string, std::string>>& convolution_corpus();

// f, its Caputo derivative in t of order alpha, and alpha.
struct CaputoCase {
  Expr f;
  Expr df;
  double alpha;
};
const std::vector<CaputoCase>& caputo_corpus();

// Point with mate in [0.5, 2] and param/mate in rate + [lo, hi] per pair.
ShehuPoint random_point(std::mt19937_64& rng, const std::array<double, 4>& rates, double lo = 1.0,
                        double hi = 3.0);
// Growth rates of f, used to place points inside the convergence region.
std::array<double, 4> region_rates(const Expr& f);

// Trial i uses corpus member i mod size at a fresh random point.
PropertyReport verify_property(const std::string& name, int trials, std::uint64_t seed);

}  // namespace shehu
