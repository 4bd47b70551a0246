#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace overlap::lab {

/// Gauss-Hermite rule for E[f(Z)], Z ~ N(0,1): nodes x_i and weights w_i with
/// sum_i w_i f(x_i) ~ E f(Z). Exact for polynomials of degree < 2n.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Builds the n-point rule by Newton iteration on the orthonormal Hermite
/// recurrence (physicists' weight exp(-x^2)), then rescales to the standard
/// normal.
inline HermiteRule gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Gauss-Hermite rule needs at least one node");
  constexpr double pim4 = 0.7511255444649425;  // pi^{-1/4}
  std::vector<double> x(n), w(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double nn = static_cast<double>(n);
    if (i == 0)
      z = std::sqrt(2.0 * nn + 1.0) - 1.85575 * std::pow(2.0 * nn + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(nn, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jj + 1.0)) * p2 - std::sqrt(jj / (jj + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];  // ascending
    rule.weights[i] = w[n - 1 - i] * norm;
  }
  return rule;
}

}  // namespace overlap::lab
