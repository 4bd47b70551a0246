#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "overlap/lab/model.hpp"

namespace overlap::lab {

/// Per-configuration energies and field values for one disorder sample, so
/// that weights at many lambda values share one pass over the couplings.
struct SampleFields {
  std::vector<double> energy;  // H_J(sigma)
  std::vector<double> field;   // h(sigma); empty when no field couplings given

  SampleFields(const ModelInstance& model, std::span<const double> J,
               std::span<const double> h_couplings) {
    const auto S = model.configuration_count();
    energy.resize(S);
    for (Configuration c = 0; c < S; ++c) energy[c] = model.energy(J, c);
    if (!h_couplings.empty()) {
      field.resize(S);
      for (Configuration c = 0; c < S; ++c) field[c] = model.field(h_couplings, c);
    }
  }
};

/// Weights proportional to exp(-beta H_J(sigma) + lambda h(sigma)), normalized
/// with a log-sum-exp shift.
inline void gibbs_weights_into(const SampleFields& f, double beta, double lambda,
                               std::span<double> out) {
  const auto S = f.energy.size();
  assert(out.size() == S);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < S; ++c) {
    double x = -beta * f.energy[c];
    if (!f.field.empty()) x += lambda * f.field[c];
    out[c] = x;
    top = std::max(top, x);
  }
  assert(std::isfinite(top));
  double z = 0.0;
  for (std::size_t c = 0; c < S; ++c) {
    out[c] = std::exp(out[c] - top);
    z += out[c];
  }
  // z >= 1 because the maximal entry contributes exp(0).
  for (std::size_t c = 0; c < S; ++c) out[c] /= z;
}

inline std::vector<double> gibbs_weights(const ModelInstance& model, std::span<const double> J,
                                         double lambda, std::span<const double> h_couplings) {
  SampleFields f(model, J, h_couplings);
  std::vector<double> w(model.configuration_count());
  gibbs_weights_into(f, model.beta(), lambda, w);
  return w;
}

}  // namespace overlap::lab
