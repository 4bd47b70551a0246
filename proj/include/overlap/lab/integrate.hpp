#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "overlap/lab/hermite.hpp"
#include "overlap/lab/model.hpp"

namespace overlap::lab {

enum class Method { monte_carlo, quadrature };

inline const char* method_name(Method m) {
  return m == Method::monte_carlo ? "mc" : "quadrature";
}

/// Estimate of E(.) or E_{lambda h}(.). Quadrature results carry a zero
/// standard error and report `truncation_bound` (change under node doubling)
/// instead.
struct QuenchedEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  Method method = Method::monte_carlo;
  double truncation_bound = 0.0;

  friend bool operator==(const QuenchedEstimate&, const QuenchedEstimate&) = default;
};

/// Monte Carlo over disorder. Sample i draws from its own stream seeded by
/// (seed, unit index), so results do not depend on `workers`. With
/// `antithetic`, samples come in pairs sharing J with the deformation field
/// couplings negated; statistics then treat each pair as one unit.
struct SamplingOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool antithetic = false;
};

/// Gauss-Hermite tensor grid; SK with N = 2 only.
struct QuadratureOptions {
  std::size_t nodes = 64;        // per disorder / deformation dimension
  std::size_t field_nodes = 8;   // per auxiliary-field dimension (polynomial integrands)
  bool estimate_truncation = true;
};

using Integrator = std::variant<SamplingOptions, QuadratureOptions>;

/// Which coupling sets an integrand reads. The deformation field may only
/// enter through Gibbs tilts exp(lambda h): under quadrature its constant
/// (sigma-independent) part is dropped, since it cancels in those ratios.
struct FieldNeeds {
  bool deformation = true;
  std::size_t auxiliary = 0;
};

/// Worker count from OVERLAP_THREADS, else the hardware concurrency.
inline std::size_t default_workers() {
  if (const char* env = std::getenv("OVERLAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Results of integrating a vector-valued integrand. Linear combinations of
/// the columns are formed per unit before averaging, so standard errors of
/// differences reflect the shared randomness.
class Integral {
 public:
  [[nodiscard]] Method method() const noexcept { return method_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t units() const noexcept { return units_; }

  [[nodiscard]] QuenchedEstimate combine(std::span<const double> weights) const {
    if (weights.size() != width_) throw std::invalid_argument("weight vector has wrong width");
    return reduce([&](std::span<const double> v) {
      double c = 0.0;
      for (std::size_t k = 0; k < width_; ++k) c += weights[k] * v[k];
      return c;
    });
  }

  /// sum_i weights[i] * (column nodes[i] - column center), formed per unit.
  /// Differences are taken before weighting, so a constant integrand gives 0.
  [[nodiscard]] QuenchedEstimate combine_stencil(std::size_t center,
                                                 std::span<const std::size_t> nodes,
                                                 std::span<const double> weights) const {
    if (nodes.size() != weights.size()) throw std::invalid_argument("stencil size mismatch");
    if (center >= width_) throw std::out_of_range("stencil centre outside the integral");
    for (auto k : nodes)
      if (k >= width_) throw std::out_of_range("stencil node outside the integral");
    return reduce([&](std::span<const double> v) {
      double c = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) c += weights[i] * (v[nodes[i]] - v[center]);
      return c;
    });
  }

  [[nodiscard]] QuenchedEstimate column(std::size_t k) const {
    std::vector<double> w(width_, 0.0);
    w.at(k) = 1.0;
    return combine(w);
  }

  /// Per-unit values (Monte Carlo only), unit-major.
  [[nodiscard]] std::span<const double> unit_values() const noexcept { return values_; }

  static Integral from_units(std::vector<double> values, std::size_t units, std::size_t width,
                             std::size_t samples, std::uint64_t seed) {
    if (units < 2) throw std::invalid_argument("Monte Carlo needs at least two units");
    Integral r;
    r.method_ = Method::monte_carlo;
    r.values_ = std::move(values);
    r.units_ = units;
    r.width_ = width;
    r.samples_ = samples;
    r.seed_ = seed;
    return r;
  }

  static Integral from_quadrature(std::vector<double> coarse, std::vector<double> fine,
                                  std::size_t nodes) {
    Integral r;
    r.method_ = Method::quadrature;
    r.width_ = coarse.size();
    r.coarse_ = std::move(coarse);
    r.fine_ = std::move(fine);
    r.units_ = 1;
    r.samples_ = nodes;
    return r;
  }

 private:
  // Applies `row` (a linear functional of one unit's columns) and reduces.
  template <class Row>
  QuenchedEstimate reduce(Row&& row) const {
    QuenchedEstimate e;
    e.method = method_;
    e.samples = samples_;
    e.seed = seed_;
    if (method_ == Method::quadrature) {
      e.mean = row(std::span<const double>(coarse_));
      e.truncation_bound = fine_.empty() ? 0.0 : std::abs(e.mean - row(std::span<const double>(fine_)));
      return e;
    }
    std::vector<double> per_unit(units_);
    CompensatedSum total;
    for (std::size_t u = 0; u < units_; ++u) {
      per_unit[u] = row(std::span<const double>(values_.data() + u * width_, width_));
      total.add(per_unit[u]);
    }
    e.mean = total.value() / static_cast<double>(units_);
    CompensatedSum sq;
    for (double c : per_unit) sq.add((c - e.mean) * (c - e.mean));
    const double var = sq.value() / static_cast<double>(units_ - 1);
    e.std_error = std::sqrt(var / static_cast<double>(units_));
    return e;
  }

  Method method_ = Method::monte_carlo;
  std::size_t width_ = 0;
  std::size_t units_ = 0;
  std::size_t samples_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> values_;
  std::vector<double> coarse_, fine_;
};

namespace detail {

/// Independent generator for unit `u` of a run seeded with `seed`.
inline std::mt19937_64 unit_stream(std::uint64_t seed, std::uint64_t u) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(u >> 32),
                    0x6f766c70u};
  return std::mt19937_64(seq);
}

/// Runs fn(u, out) for u in [0, units) on `workers` threads. Each unit owns a
/// pre-allocated slot, so the result is independent of scheduling.
template <class Fn>
std::vector<double> parallel_units(std::size_t units, std::size_t width, std::size_t workers,
                                   Fn&& fn) {
  std::vector<double> values(units * width, 0.0);
  workers = std::max<std::size_t>(1, std::min(workers, units));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](std::size_t w) {
    try {
      for (std::size_t u = w; u < units; u += workers)
        fn(u, std::span<double>(values.data() + u * width, width));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  if (failure) std::rethrow_exception(failure);
  return values;
}

template <class Fn>
Integral integrate_monte_carlo(const ModelInstance& model, const SamplingOptions& opt,
                               std::size_t width, const FieldNeeds& needs, Fn& fn) {
  if (opt.antithetic && opt.samples % 2 != 0)
    throw std::invalid_argument("antithetic sampling needs an even sample count");
  const std::size_t units = opt.antithetic ? opt.samples / 2 : opt.samples;
  auto values = parallel_units(units, width, opt.workers, [&](std::size_t u, std::span<double> out) {
    auto rng = unit_stream(opt.seed, u);
    DisorderSample s = sample_disorder(model, 1 + needs.auxiliary, rng);
    if (!opt.antithetic) {
      fn(static_cast<const DisorderSample&>(s), out);
      return;
    }
    std::vector<double> a(width), b(width);
    fn(static_cast<const DisorderSample&>(s), std::span<double>(a));
    for (auto& x : s.fields[0]) x = -x;
    fn(static_cast<const DisorderSample&>(s), std::span<double>(b));
    for (std::size_t k = 0; k < width; ++k) out[k] = 0.5 * (a[k] + b[k]);
  });
  return Integral::from_units(std::move(values), units, width, opt.samples, opt.seed);
}

template <class Fn>
std::vector<double> quadrature_pass(const ModelInstance& model, std::size_t nodes,
                                    std::size_t field_nodes, std::size_t width,
                                    const FieldNeeds& needs, Fn& fn) {
  // Effective Gaussians for SK, N = 2 (couplings ordered 11, 12, 21, 22):
  // H depends on J only through J12 + J21 = sqrt(2) z_J; the tilt by h only
  // through J'12 + J'21 = sqrt(2) z_h. An auxiliary field also needs its
  // diagonal part J'11 + J'22 = sqrt(2) z_d.
  const HermiteRule main = gauss_hermite(nodes);
  const HermiteRule aux = gauss_hermite(field_nodes);
  std::vector<const HermiteRule*> dims{&main};
  if (needs.deformation) dims.push_back(&main);
  for (std::size_t f = 0; f < needs.auxiliary; ++f) {
    dims.push_back(&aux);
    dims.push_back(&aux);
  }
  const double r2 = std::numbers::sqrt2;
  DisorderSample s;
  s.J.assign(4, 0.0);
  s.fields.assign(1 + needs.auxiliary, std::vector<double>(4, 0.0));
  std::vector<std::size_t> idx(dims.size(), 0);
  std::vector<CompensatedSum> acc(width);
  std::vector<double> out(width);
  while (true) {
    double weight = 1.0;
    for (std::size_t d = 0; d < dims.size(); ++d) weight *= dims[d]->weights[idx[d]];
    std::size_t d = 0;
    s.J[1] = r2 * dims[d]->nodes[idx[d]];
    ++d;
    if (needs.deformation) {
      s.fields[0][1] = r2 * dims[d]->nodes[idx[d]];
      ++d;
    }
    for (std::size_t f = 0; f < needs.auxiliary; ++f) {
      s.fields[1 + f][0] = r2 * dims[d]->nodes[idx[d]];
      s.fields[1 + f][1] = r2 * dims[d + 1]->nodes[idx[d + 1]];
      d += 2;
    }
    fn(static_cast<const DisorderSample&>(s), std::span<double>(out));
    for (std::size_t k = 0; k < width; ++k) acc[k].add(weight * out[k]);
    std::size_t p = 0;
    for (; p < dims.size(); ++p) {
      if (++idx[p] < dims[p]->nodes.size()) break;
      idx[p] = 0;
    }
    if (p == dims.size()) break;
  }
  std::vector<double> result(width);
  for (std::size_t k = 0; k < width; ++k) result[k] = acc[k].value();
  return result;
}

}  // namespace detail

inline void require_quadrature_model(const ModelInstance& model) {
  if (model.kind() != ModelKind::sk || model.spins() != 2)
    throw std::invalid_argument("quadrature is only available for SK with N = 2, got " +
                                model.describe());
}

/// Integrates fn(const DisorderSample&, span<double> out) over the disorder.
/// `fn` must be safe to call concurrently.
template <class Fn>
Integral integrate(const ModelInstance& model, const Integrator& how, std::size_t width,
                   const FieldNeeds& needs, Fn&& fn) {
  if (const auto* mc = std::get_if<SamplingOptions>(&how))
    return detail::integrate_monte_carlo(model, *mc, width, needs, fn);
  const auto& q = std::get<QuadratureOptions>(how);
  require_quadrature_model(model);
  auto coarse = detail::quadrature_pass(model, q.nodes, q.field_nodes, width, needs, fn);
  std::vector<double> fine;
  if (q.estimate_truncation)
    fine = detail::quadrature_pass(model, 2 * q.nodes, q.field_nodes, width, needs, fn);
  return Integral::from_quadrature(std::move(coarse), std::move(fine), q.nodes);
}

}  // namespace overlap::lab
