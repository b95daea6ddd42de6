#include <cmath>

#include "doctest.h"
#include "wavenull/quadrature.hpp"

using namespace wavenull;

TEST_CASE("gauss rule integrates degree 2n-1 exactly") {
  for (int n = 1; n <= 8; ++n) {
    const GaussRule& g = gauss_unit(n);
    REQUIRE(g.size() == static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.points[i], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
    }
  }
}

TEST_CASE("composite rule covers [a,b]") {
  const GaussRule g = composite_gauss(-1.0, 2.0, 7, 3);
  CHECK(g.size() == 21);
  double len = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    len += g.weights[i];
    m2 += g.weights[i] * g.points[i] * g.points[i];
  }
  CHECK(len == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(3.0).epsilon(1e-14));  // (8 + 1) / 3
}
