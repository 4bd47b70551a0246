#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <map>
#include <utility>

#include "overlap/canonical.hpp"
#include "overlap/multigraph.hpp"

namespace overlap {

using Coefficient = boost::multiprecision::cpp_int;

/// Finite integer combination of isomorphism classes of multigraphs.
/// Zero coefficients are never stored.
class GraphPolynomial {
 public:
  using Terms = std::map<CanonicalMultigraph, Coefficient>;

  GraphPolynomial() = default;

  explicit GraphPolynomial(const Multigraph& g, const Coefficient& c = 1) {
    add_term(g, c);
  }
  explicit GraphPolynomial(const CanonicalMultigraph& g, const Coefficient& c = 1) {
    add_term(g, c);
  }

  /// The neutral monomial (empty multigraph) with coefficient 1.
  static GraphPolynomial one() { return GraphPolynomial(CanonicalMultigraph{}); }

  void add_term(const CanonicalMultigraph& g, const Coefficient& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(g, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  void add_term(const Multigraph& g, const Coefficient& c) {
    if (c.is_zero()) return;
    add_term(canonicalize(g), c);
  }

  [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
  [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

  [[nodiscard]] Coefficient coefficient(const Multigraph& g) const {
    auto it = terms_.find(canonicalize(g));
    return it == terms_.end() ? Coefficient(0) : it->second;
  }

  /// Value obtained by sending every overlap variable and every leg to 1.
  [[nodiscard]] Coefficient coefficient_sum() const {
    Coefficient s = 0;
    for (const auto& [g, c] : terms_) s += c;
    return s;
  }

  [[nodiscard]] bool leg_free() const {
    for (const auto& [g, c] : terms_)
      if (!g.leg_free()) return false;
    return true;
  }

  /// Largest support size over all terms (0 for the zero polynomial).
  [[nodiscard]] std::size_t max_vertex_count() const {
    std::size_t k = 0;
    for (const auto& [g, c] : terms_) k = std::max(k, g.vertex_count());
    return k;
  }

  GraphPolynomial& operator+=(const GraphPolynomial& q) {
    for (const auto& [g, c] : q.terms_) add_term(g, c);
    return *this;
  }
  GraphPolynomial& operator-=(const GraphPolynomial& q) {
    for (const auto& [g, c] : q.terms_) add_term(g, Coefficient(-c));
    return *this;
  }
  GraphPolynomial& operator*=(const Coefficient& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [g, c] : terms_) c *= s;
    return *this;
  }

  friend GraphPolynomial operator+(GraphPolynomial p, const GraphPolynomial& q) { return p += q; }
  friend GraphPolynomial operator-(GraphPolynomial p, const GraphPolynomial& q) { return p -= q; }
  friend GraphPolynomial operator-(GraphPolynomial p) { return p *= Coefficient(-1); }
  friend GraphPolynomial operator*(GraphPolynomial p, const Coefficient& s) { return p *= s; }
  friend GraphPolynomial operator*(const Coefficient& s, GraphPolynomial p) { return p *= s; }

  /// Bilinear extension of same-label composition of representatives.
  friend GraphPolynomial operator*(const GraphPolynomial& p, const GraphPolynomial& q) {
    GraphPolynomial out;
    for (const auto& [a, ca] : p.terms_)
      for (const auto& [b, cb] : q.terms_)
        out.add_term(compose(a.graph(), b.graph()), ca * cb);
    return out;
  }

  friend bool operator==(const GraphPolynomial&, const GraphPolynomial&) = default;

 private:
  Terms terms_;
};

inline GraphPolynomial poly_add(const GraphPolynomial& p, const GraphPolynomial& q) {
  return p + q;
}
inline GraphPolynomial poly_scale(const GraphPolynomial& p, const Coefficient& c) {
  return p * c;
}
inline GraphPolynomial poly_mul(const GraphPolynomial& p, const GraphPolynomial& q) {
  return p * q;
}

}  // namespace overlap
