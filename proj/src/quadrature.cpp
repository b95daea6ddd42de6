#include "wavenull/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "wavenull/error.hpp"

namespace wavenull {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.points[n - 1 - i] = 0.5 * (z + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_unit(int n) {
  if (n < 1 || n > 64) {
    throw Error(ErrorCode::invalid_argument, "gauss_unit: unsupported order " + std::to_string(n));
  }
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

GaussRule composite_gauss(double a, double b, int pieces, int n) {
  const GaussRule& base = gauss_unit(n);
  GaussRule rule;
  rule.points.reserve(static_cast<std::size_t>(pieces) * base.size());
  rule.weights.reserve(rule.points.capacity());
  const double h = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double left = a + p * h;
    for (std::size_t q = 0; q < base.size(); ++q) {
      rule.points.push_back(left + h * base.points[q]);
      rule.weights.push_back(h * base.weights[q]);
    }
  }
  return rule;
}

}  // namespace wavenull
