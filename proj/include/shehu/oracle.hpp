#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shehu/expr.hpp"

namespace shehu {

struct PdeProblem;

struct QuadratureSpec {
  int nodes_per_axis = 96;
  // Minimum per-axis nodes for integrands coupling several variables; two-
  // and three-axis components get finer grids within a fixed point budget.
  int tensor_nodes_per_axis = 64;
  double eps_trunc = 1e-12;
  int min_panels = 16;
  double min_margin = 0.05;
  // Order in which axes are integrated (outermost first).
  std::array<int, 4> axis_order{0, 1, 2, 3};
};

// Quadruple (or lower) Shehu integral of f evaluated by quadrature.
double shehu_numeric(const Expr& f, const ShehuPoint& pt, VarSet vars = VarSet::all(),
                     const QuadratureSpec& spec = {});

// (f **** g)(x) over the box [0, x] by 24-node tensor Gauss-Legendre.
double convolution4(const Expr& f, const Expr& g, const Point4& x, int nodes = 24);

// Shehu integral of f **** g; the convolution is evaluated numerically at
// every quadrature node. Terms of f and g must be products of one-variable
// atoms, which lets the 4D convolution factor into 1D convolutions.
double shehu_numeric_convolution(const Expr& f, const Expr& g, const ShehuPoint& pt,
                                 const QuadratureSpec& spec = {});

struct Box {
  double lo = 0.1;
  double hi = 2.0;
};

struct ResidualReport {
  double max_abs_residual = 0;
  std::vector<Point4> sample_points;
  std::vector<double> residuals;
};

ResidualReport pde_residual(const PdeProblem& problem, const Expr& candidate, Box box = {},
                            int n_samples = 10, std::uint64_t seed = 42);

}  // namespace shehu
