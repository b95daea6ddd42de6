#pragma once

#include <vector>

namespace wavenull {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point rule on [0,1], exact for polynomials of degree 2n-1.
const GaussRule& gauss_unit(int n);

/// Composite rule on [a,b]: `pieces` equal sub-intervals of n-point Gauss.
GaussRule composite_gauss(double a, double b, int pieces, int n);

}  // namespace wavenull
