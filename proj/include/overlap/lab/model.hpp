#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace overlap::lab {

enum class ModelKind { sk, ea };

struct Bond {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const Bond&, const Bond&) = default;
};

/// Spin configuration index: bit s set means sigma(s) = -1.
using Configuration = std::uint32_t;

inline int spin(Configuration c, std::size_t site) {
  return ((c >> site) & 1u) ? -1 : 1;
}

inline std::vector<int> spins_of(Configuration c, std::size_t n) {
  std::vector<int> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = spin(c, s);
  return out;
}

/// A small SK or EA system at inverse temperature beta.
///
/// Both Hamiltonians are linear in their couplings, H_J(sigma) =
/// -sum_k J_k P_k(sigma), where P_k is the spin product of coupling k:
/// sigma(i)sigma(j) over all ordered pairs 1 <= i,j <= N (diagonal included)
/// for SK, and over the bond set for EA. The same products, scaled by
/// N^{-1} (SK) or |B|^{-1/2} (EA), define the Gaussian fields h(sigma).
class ModelInstance {
 public:
  static constexpr std::size_t max_sk_spins = 5;
  static constexpr std::size_t max_ea_sites = 12;

  static ModelInstance sk(std::size_t spins, double beta) {
    if (spins < 2 || spins > max_sk_spins)
      throw std::invalid_argument("SK needs 2 <= N <= " + std::to_string(max_sk_spins));
    ModelInstance m(ModelKind::sk, spins, beta);
    for (std::size_t i = 0; i < spins; ++i)
      for (std::size_t j = 0; j < spins; ++j) m.pairs_.push_back({i, j});
    m.field_scale_ = 1.0 / static_cast<double>(spins);
    m.finish();
    return m;
  }

  /// Hypercubic box with the given side lengths and nearest-neighbour bonds.
  /// With `periodic`, sides wrap around; duplicate bonds (side 2) are merged.
  static ModelInstance ea(std::vector<std::size_t> dims, double beta, bool periodic = true) {
    if (dims.empty()) throw std::invalid_argument("EA lattice needs at least one dimension");
    std::size_t sites = 1;
    for (auto L : dims) {
      if (L == 0) throw std::invalid_argument("EA lattice side must be positive");
      sites *= L;
    }
    if (sites > max_ea_sites)
      throw std::invalid_argument("EA lattice has " + std::to_string(sites) +
                                  " sites; at most " + std::to_string(max_ea_sites) +
                                  " are supported");
    ModelInstance m(ModelKind::ea, sites, beta);
    m.dims_ = dims;
    m.periodic_ = periodic;
    std::set<std::pair<std::size_t, std::size_t>> bonds;
    std::vector<std::size_t> coord(dims.size());
    for (std::size_t s = 0; s < sites; ++s) {
      std::size_t rest = s;
      for (std::size_t d = 0; d < dims.size(); ++d) {
        coord[d] = rest % dims[d];
        rest /= dims[d];
      }
      std::size_t stride = 1;
      for (std::size_t d = 0; d < dims.size(); ++d) {
        std::size_t next_coord = coord[d] + 1;
        bool ok = next_coord < dims[d];
        if (!ok && periodic && dims[d] > 1) {
          next_coord = 0;
          ok = true;
        }
        if (ok) {
          const std::size_t t = s - coord[d] * stride + next_coord * stride;
          if (t != s) bonds.insert({std::min(s, t), std::max(s, t)});
        }
        stride *= dims[d];
      }
    }
    if (bonds.empty()) throw std::invalid_argument("EA lattice has no bonds");
    for (auto [i, j] : bonds) m.pairs_.push_back({i, j});
    m.field_scale_ = 1.0 / std::sqrt(static_cast<double>(m.pairs_.size()));
    m.finish();
    return m;
  }

  [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t spins() const noexcept { return spins_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  [[nodiscard]] bool periodic() const noexcept { return periodic_; }
  [[nodiscard]] std::size_t configuration_count() const noexcept { return std::size_t{1} << spins_; }
  /// Number of Gaussian couplings per sample (N^2 for SK, |B| for EA).
  [[nodiscard]] std::size_t coupling_count() const noexcept { return pairs_.size(); }
  /// Coupled index pairs; for EA these are the bonds.
  [[nodiscard]] const std::vector<Bond>& couplings() const noexcept { return pairs_; }
  [[nodiscard]] const std::vector<Bond>& bonds() const noexcept { return pairs_; }
  [[nodiscard]] double field_scale() const noexcept { return field_scale_; }

  /// P_k(sigma) for configuration c, coupling k.
  [[nodiscard]] double spin_product(Configuration c, std::size_t k) const {
    return products_[static_cast<std::size_t>(c) * pairs_.size() + k];
  }

  /// H_J(sigma).
  [[nodiscard]] double energy(std::span<const double> J, Configuration c) const {
    check_couplings(J);
    double e = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) e -= J[k] * spin_product(c, k);
    return e;
  }

  /// h(sigma) for the coupling set `h`.
  [[nodiscard]] double field(std::span<const double> h, Configuration c) const {
    check_couplings(h);
    double s = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) s += h[k] * spin_product(c, k);
    return field_scale_ * s;
  }

  void check_couplings(std::span<const double> J) const {
    if (J.size() != pairs_.size())
      throw std::invalid_argument("expected " + std::to_string(pairs_.size()) +
                                  " couplings, got " + std::to_string(J.size()));
  }

  [[nodiscard]] std::string describe() const {
    if (kind_ == ModelKind::sk)
      return "SK(N=" + std::to_string(spins_) + ", beta=" + format_number(beta_) + ")";
    std::string lattice;
    for (std::size_t d = 0; d < dims_.size(); ++d)
      lattice += (d ? "x" : "") + std::to_string(dims_[d]);
    return "EA(" + lattice + (periodic_ ? ", periodic" : ", open") +
           ", bonds=" + std::to_string(pairs_.size()) + ", beta=" + format_number(beta_) + ")";
  }

 private:
  ModelInstance(ModelKind kind, std::size_t spins, double beta)
      : kind_(kind), spins_(spins), beta_(beta) {
    if (!std::isfinite(beta) || beta < 0.0)
      throw std::invalid_argument("beta must be finite and >= 0");
  }

  void finish() {
    const std::size_t S = configuration_count();
    products_.resize(S * pairs_.size());
    for (Configuration c = 0; c < S; ++c)
      for (std::size_t k = 0; k < pairs_.size(); ++k)
        products_[c * pairs_.size() + k] =
            static_cast<double>(spin(c, pairs_[k].i) * spin(c, pairs_[k].j));
  }

  static std::string format_number(double x) {
    std::string s = std::to_string(x);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  ModelKind kind_;
  std::size_t spins_;
  double beta_;
  std::vector<std::size_t> dims_;
  bool periodic_ = false;
  std::vector<Bond> pairs_;
  double field_scale_ = 1.0;
  std::vector<double> products_;
};

/// One disorder realization: the couplings J and independent coupling sets
/// for the Gaussian fields. fields[0] is the deformation field h; further
/// entries are auxiliary fields h^(1), h^(2), ...
struct DisorderSample {
  std::vector<double> J;
  std::vector<std::vector<double>> fields;
};

/// Draws J and `field_count` independent field coupling sets, all standard
/// normal, from `rng` in that order.
template <class Rng>
DisorderSample sample_disorder(const ModelInstance& model, std::size_t field_count, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DisorderSample s;
  s.J.resize(model.coupling_count());
  for (auto& x : s.J) x = normal(rng);
  s.fields.resize(field_count);
  for (auto& f : s.fields) {
    f.resize(model.coupling_count());
    for (auto& x : f) x = normal(rng);
  }
  return s;
}

}  // namespace overlap::lab
