#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace overlap::lab {

/// Lambda grid and stencil choice for derivatives of E_{lambda h}.
struct DeformationConfig {
  /// Symmetric about 0. Positive nodes must form a doubling sequence
  /// s, 2s, 4s, ... for the Richardson tableau.
  std::vector<double> lambda_grid{-0.2, -0.1, -0.05, 0.05, 0.1, 0.2};
  int fd_order = 2;
  /// Number of Richardson refinements; negative means as many as the grid allows.
  int richardson_levels = -1;
};

/// Default configuration for a derivative of the given order. Orders 3 and 4
/// add the nodes +-0.025, since their stencils reach 2s and lose more to bias.
inline DeformationConfig default_deformation(int order) {
  DeformationConfig c;
  c.fd_order = order;
  if (order >= 3) c.lambda_grid = {-0.2, -0.1, -0.05, -0.025, 0.025, 0.05, 0.1, 0.2};
  return c;
}

/// Validates symmetry and returns the positive nodes in ascending order.
/// A grid given with positive values only is taken as its own mirror image.
inline std::vector<double> positive_nodes(std::span<const double> grid) {
  std::vector<double> pos, neg;
  for (double x : grid) {
    if (!std::isfinite(x)) throw std::invalid_argument("lambda grid has a non-finite value");
    if (x > 0) pos.push_back(x);
    if (x < 0) neg.push_back(-x);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  neg.erase(std::unique(neg.begin(), neg.end()), neg.end());
  if (pos.empty()) throw std::invalid_argument("lambda grid has no nonzero nodes");
  if (!neg.empty() && neg != pos)
    throw std::invalid_argument("lambda grid is not symmetric about 0");
  return pos;
}

/// Linear functional sum_i weights[i] * (f(center + offsets[i]) - f(center)).
struct Stencil {
  std::vector<double> offsets;
  std::vector<double> weights;

  [[nodiscard]] double apply(std::span<const double> values_at_offsets, double center_value) const {
    double s = 0.0;
    for (std::size_t i = 0; i < offsets.size(); ++i)
      s += weights[i] * (values_at_offsets[i] - center_value);
    return s;
  }
};

namespace detail {

// Central difference of order d with step multiple `unit` of the base step,
// as weights keyed by signed integer multiples of the base step.
inline std::map<long, double> central_difference(int order, long unit, double step) {
  std::map<long, double> w;
  const double s = step;
  switch (order) {
    case 1:
      w[-unit] = -0.5 / s;
      w[unit] = 0.5 / s;
      break;
    case 2:
      w[-unit] = 1.0 / (s * s);
      w[0] = -2.0 / (s * s);
      w[unit] = 1.0 / (s * s);
      break;
    case 3: {
      const double s3 = s * s * s;
      w[-2 * unit] = -0.5 / s3;
      w[-unit] = 1.0 / s3;
      w[unit] = -1.0 / s3;
      w[2 * unit] = 0.5 / s3;
      break;
    }
    case 4: {
      const double s4 = s * s * s * s;
      w[-2 * unit] = 1.0 / s4;
      w[-unit] = -4.0 / s4;
      w[0] = 6.0 / s4;
      w[unit] = -4.0 / s4;
      w[2 * unit] = 1.0 / s4;
      break;
    }
    default:
      throw std::invalid_argument("finite-difference order must be 1..4, got " +
                                  std::to_string(order));
  }
  return w;
}

inline std::map<long, double> lincomb(double a, const std::map<long, double>& x, double b,
                                      const std::map<long, double>& y) {
  std::map<long, double> out;
  for (const auto& [k, v] : x) out[k] += a * v;
  for (const auto& [k, v] : y) out[k] += b * v;
  return out;
}

}  // namespace detail

/// Central differences at steps s, 2s, ..., 2^L s combined by Richardson
/// extrapolation in s^2. Offsets are taken from the grid values themselves.
inline Stencil richardson_stencil(int order, std::span<const double> grid, int levels = -1) {
  const auto nodes = positive_nodes(grid);
  const double base = nodes.front();
  // nodes[m] as an integer multiple of the base step, if present.
  std::map<long, double> multiple;
  for (double x : nodes) {
    const double r = x / base;
    const long m = std::lround(r);
    if (std::abs(r - static_cast<double>(m)) <= 1e-9 * r) multiple.emplace(m, x);
  }
  const long reach = (order <= 2) ? 1 : 2;
  auto have_level = [&](int j) {
    const long unit = 1L << j;
    for (long k = 1; k <= reach; ++k)
      if (!multiple.contains(k * unit)) return false;
    return true;
  };
  if (!have_level(0))
    throw std::invalid_argument("lambda grid lacks the nodes for an order-" +
                                std::to_string(order) + " central difference");
  int max_levels = 0;
  while (have_level(max_levels + 1)) ++max_levels;
  if (levels < 0) levels = max_levels;
  if (levels > max_levels)
    throw std::invalid_argument("lambda grid supports at most " + std::to_string(max_levels) +
                                " Richardson levels for order " + std::to_string(order));

  std::vector<std::map<long, double>> row;
  for (int j = 0; j <= levels; ++j) {
    const long unit = 1L << j;
    row.push_back(detail::central_difference(order, unit, multiple.at(unit)));
  }
  for (int i = 1; i <= levels; ++i) {
    const double f = std::pow(4.0, i);
    std::vector<std::map<long, double>> next;
    for (std::size_t j = 0; j + 1 < row.size(); ++j)
      next.push_back(detail::lincomb(f / (f - 1.0), row[j], -1.0 / (f - 1.0), row[j + 1]));
    row = std::move(next);
  }
  Stencil st;
  for (const auto& [k, w] : row.front()) {
    if (k == 0) continue;
    const double off = k > 0 ? multiple.at(k) : -multiple.at(-k);
    st.offsets.push_back(off);
    st.weights.push_back(w);
  }
  return st;
}

}  // namespace overlap::lab
