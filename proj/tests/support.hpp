#pragma once

#include <cmath>
#include <random>
#include <string>

#include "shehu/vars.hpp"

namespace shehu::test {

inline double rel_err(double got, double want) {
  const double d = std::abs(got - want);
  return std::abs(want) > 1e-300 ? d / std::abs(want) : d;
}

inline std::string data_file(const std::string& name) { return std::string(SHEHU_DATA_DIR) + "/" + name; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace shehu::test
