#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "overlap/lab/model.hpp"

namespace overlap::lab {

namespace detail {
inline void check_spins(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("spin vectors have different lengths");
  for (int s : a)
    if (s != 1 && s != -1) throw std::invalid_argument("spins must be +1 or -1");
  for (int s : b)
    if (s != 1 && s != -1) throw std::invalid_argument("spins must be +1 or -1");
}
}  // namespace detail

/// (N^{-1} sum_i sigma(i) sigma'(i))^2, the covariance of the SK field.
inline double overlap_sk(std::span<const int> sigma, std::span<const int> sigma_prime,
                         std::size_t N) {
  detail::check_spins(sigma, sigma_prime);
  if (sigma.size() != N) throw std::invalid_argument("spin vector length differs from N");
  long q = 0;
  for (std::size_t i = 0; i < N; ++i) q += sigma[i] * sigma_prime[i];
  const double r = static_cast<double>(q) / static_cast<double>(N);
  return r * r;
}

/// |B|^{-1} sum_{(i,j) in B} sigma(i)sigma(j)sigma'(i)sigma'(j).
inline double link_overlap_ea(std::span<const int> sigma, std::span<const int> sigma_prime,
                              std::span<const Bond> bonds) {
  detail::check_spins(sigma, sigma_prime);
  if (bonds.empty()) throw std::invalid_argument("empty bond set");
  long q = 0;
  for (const auto& b : bonds) {
    if (b.i >= sigma.size() || b.j >= sigma.size())
      throw std::invalid_argument("bond refers to a site outside the spin vector");
    q += sigma[b.i] * sigma[b.j] * sigma_prime[b.i] * sigma_prime[b.j];
  }
  return static_cast<double>(q) / static_cast<double>(bonds.size());
}

/// Covariance c_{sigma,sigma'} of the model's field over all configuration
/// pairs, row-major S x S. Independent of the disorder.
class OverlapTable {
 public:
  explicit OverlapTable(const ModelInstance& model) : size_(model.configuration_count()) {
    values_.resize(size_ * size_);
    const auto n = model.spins();
    for (Configuration a = 0; a < size_; ++a) {
      const auto sa = spins_of(a, n);
      for (Configuration b = 0; b < size_; ++b) {
        const auto sb = spins_of(b, n);
        values_[a * size_ + b] = model.kind() == ModelKind::sk
                                     ? overlap_sk(sa, sb, n)
                                     : link_overlap_ea(sa, sb, model.bonds());
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] double operator()(std::size_t a, std::size_t b) const {
    return values_[a * size_ + b];
  }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  /// Elementwise power c^m.
  [[nodiscard]] std::vector<double> power(int m) const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      double p = 1.0;
      for (int k = 0; k < m; ++k) p *= values_[i];
      out[i] = p;
    }
    return out;
  }

 private:
  std::size_t size_;
  std::vector<double> values_;
};

}  // namespace overlap::lab
