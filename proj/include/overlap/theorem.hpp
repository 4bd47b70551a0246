#pragma once

#include <chrono>
#include <cstddef>
#include <future>
#include <stdexcept>
#include <string>

#include "overlap/operators.hpp"
#include "overlap/pairing.hpp"
#include "overlap/polynomial.hpp"

namespace overlap {

/// Thrown when a request exceeds a configured resource bound. The work is
/// refused up front; nothing is truncated.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TheoremLimits {
  int max_n = 3;
  std::size_t max_vertices = 10;  // |support(g)| + 2n
};

struct TermCounts {
  /// Sign expansion of (delta^+ + delta^-)^{2n} times the (2n-1)!! pairings.
  std::size_t raw_lhs = 0;
  /// (number of closed-form terms of Delta g)^n.
  std::size_t raw_rhs = 0;
  /// Monomials emitted by the final contraction before merging.
  std::size_t emitted_lhs = 0;
  std::size_t emitted_rhs = 0;
  std::size_t canonical_lhs = 0;
  std::size_t canonical_rhs = 0;

  friend bool operator==(const TermCounts&, const TermCounts&) = default;
};

/// Outcome of comparing C delta^{2n} g with (2n-1)!! Delta^n g.
struct TheoremReport {
  Multigraph input;
  int n = 0;
  Coefficient factor = 1;
  GraphPolynomial lhs;
  GraphPolynomial rhs;
  bool equal = false;
  TermCounts counts;
  double wall_seconds = 0.0;
};

namespace detail {

inline void check_theorem_request(const Multigraph& g, int n, const TheoremLimits& limits) {
  if (!g.leg_free())
    throw std::invalid_argument("theorem verification needs a leg-free monomial");
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  if (n > limits.max_n)
    throw ResourceLimitError("n = " + std::to_string(n) + " exceeds the bound " +
                             std::to_string(limits.max_n));
  const auto needed = g.vertex_count() + 2 * static_cast<std::size_t>(n);
  if (needed > limits.max_vertices)
    throw ResourceLimitError("|support| + 2n = " + std::to_string(needed) +
                             " exceeds the vertex bound " +
                             std::to_string(limits.max_vertices));
}

inline std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Counts the a-priori terms of C (delta^+ + delta^-)^{2n}: each sign word
// yields one monomial with 2n legs, and each such monomial contributes one
// term per pairing.
inline std::size_t sign_expansion_terms(int n) {
  const std::size_t legs = 2 * static_cast<std::size_t>(n);
  std::size_t pairings = 0;
  for_each_pairing(legs, [&](auto) { ++pairings; });
  std::size_t total = 0;
  for (std::size_t word = 0; word < (std::size_t{1} << legs); ++word) total += pairings;
  return total;
}

}  // namespace detail

inline GraphPolynomial wick_of_delta_power(const GraphPolynomial& g, int power,
                                           std::size_t* emitted = nullptr) {
  GraphPolynomial p = g;
  for (int i = 0; i < power; ++i) p = delta(p);
  return wick_contract(p, emitted);
}

inline GraphPolynomial big_delta_power(const GraphPolynomial& g, int n,
                                       std::size_t* emitted = nullptr) {
  GraphPolynomial p = g;
  if (emitted) *emitted = 0;
  for (int i = 0; i < n; ++i) p = big_delta(p, emitted);
  return p;
}

inline TermCounts term_count_report(const Multigraph& g, int n,
                                    const TheoremLimits& limits = {}) {
  detail::check_theorem_request(g, n, limits);
  TermCounts counts;
  counts.raw_lhs = detail::sign_expansion_terms(n);
  counts.raw_rhs = detail::ipow(closed_form_terms(g).size(), n);
  if (g.empty()) counts.raw_rhs = n == 0 ? 1 : 0;
  const GraphPolynomial base(g);
  const auto lhs = wick_of_delta_power(base, 2 * n, &counts.emitted_lhs);
  const auto rhs = big_delta_power(base, n, &counts.emitted_rhs);
  counts.canonical_lhs = lhs.size();
  counts.canonical_rhs = rhs.size();
  return counts;
}

/// Exact check of C delta^{2n} g = (2n-1)!! Delta^n g in canonical form.
/// Both sides are expanded concurrently.
inline TheoremReport theorem_verify(const Multigraph& g, int n,
                                    const TheoremLimits& limits = {}) {
  detail::check_theorem_request(g, n, limits);
  const auto start = std::chrono::steady_clock::now();
  TheoremReport r;
  r.input = g;
  r.n = n;
  r.factor = double_factorial(2L * n - 1);
  const GraphPolynomial base(g);

  std::size_t emitted_lhs = 0, emitted_rhs = 0;
  auto lhs_job = std::async(std::launch::async, [&] {
    return wick_of_delta_power(base, 2 * n, &emitted_lhs);
  });
  GraphPolynomial rhs = big_delta_power(base, n, &emitted_rhs) * r.factor;
  r.lhs = lhs_job.get();
  r.rhs = std::move(rhs);
  r.equal = (r.lhs - r.rhs).is_zero();

  r.counts.raw_lhs = detail::sign_expansion_terms(n);
  r.counts.raw_rhs = g.empty() ? (n == 0 ? 1 : 0)
                               : detail::ipow(closed_form_terms(g).size(), n);
  r.counts.emitted_lhs = emitted_lhs;
  r.counts.emitted_rhs = emitted_rhs;
  r.counts.canonical_lhs = r.lhs.size();
  r.counts.canonical_rhs = r.rhs.size();
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace overlap
