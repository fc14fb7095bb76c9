#pragma once

#include <memory>
#include <vector>

namespace shehu {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Gauss-Jacobi rule for weight (1 - x)^a (1 + x)^b on [-1, 1], a, b > -1.
// Rules are cached; the returned reference stays valid for the program's life.
const GaussRule& gauss_jacobi(int n, double a, double b);
inline const GaussRule& gauss_legendre(int n) { return gauss_jacobi(n, 0, 0); }

}  // namespace shehu
