#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "overlap/multigraph.hpp"
#include "overlap/pairing.hpp"
#include "overlap/polynomial.hpp"

namespace overlap {

/// A labeled monomial with a sign, used where labels must survive between
/// operator applications (the canonical polynomial forgets them).
struct SignedMonomial {
  Multigraph graph;
  int sign = 1;

  friend bool operator==(const SignedMonomial&, const SignedMonomial&) = default;
};

using LabeledTerms = std::vector<std::pair<Multigraph, Coefficient>>;

namespace detail {

inline void require_in_support(const Multigraph& g, Vertex v) {
  if (!g.contains(v))
    throw std::invalid_argument("vertex " + std::to_string(v) +
                                " is not in the support of the monomial");
}

inline Multigraph with_leg(Multigraph g, Vertex v) {
  g.add_leg(v);
  return g;
}

}  // namespace detail

/// {v} G: one more leg at v.
inline SignedMonomial apply_delta_plus(const SignedMonomial& m, Vertex v) {
  detail::require_in_support(m.graph, v);
  return {detail::with_leg(m.graph, v), m.sign};
}

/// -{v'} G where v' is the smallest positive label missing from the support.
inline SignedMonomial apply_delta_minus(const SignedMonomial& m, Vertex v) {
  detail::require_in_support(m.graph, v);
  return {detail::with_leg(m.graph, m.graph.first_free_vertex()), -m.sign};
}

inline GraphPolynomial delta_v_plus(const Multigraph& g, Vertex v) {
  auto r = apply_delta_plus({g, 1}, v);
  return GraphPolynomial(r.graph, r.sign);
}

inline GraphPolynomial delta_v_minus(const Multigraph& g, Vertex v) {
  auto r = apply_delta_minus({g, 1}, v);
  return GraphPolynomial(r.graph, r.sign);
}

/// delta G = sum over the support of (delta_v^+ + delta_v^-) G, keeping the
/// labels of G. All R minus-terms land on the same fresh vertex, so they are
/// returned merged as one term with coefficient -R.
inline LabeledTerms delta_labeled(const Multigraph& g) {
  LabeledTerms out;
  const auto support = g.support();
  if (support.empty()) return out;
  for (Vertex v : support) out.emplace_back(detail::with_leg(g, v), 1);
  out.emplace_back(detail::with_leg(g, g.first_free_vertex()),
                   -static_cast<long>(support.size()));
  return out;
}

/// Gaussian derivation, extended linearly. Maps grading (m,l) to (m,l+1).
inline GraphPolynomial delta(const GraphPolynomial& p) {
  GraphPolynomial out;
  for (const auto& [term, c] : p.terms()) {
    // Canonical support is {1..k}, so the fresh vertex is k+1.
    const auto k = static_cast<Vertex>(term.vertex_count());
    if (k == 0) continue;
    for (Vertex v = 1; v <= k; ++v) out.add_term(detail::with_leg(term.graph(), v), c);
    out.add_term(detail::with_leg(term.graph(), k + 1), Coefficient(-c * k));
  }
  return out;
}

namespace detail {

// Adds the Wick contraction of `g` (weighted by c) into a labeled accumulator.
// Legs are expanded into individual instances and every pairing is visited;
// a pair on one vertex contributes the factor c_vv = 1.
inline std::size_t wick_into(const Multigraph& g, const Coefficient& c,
                             std::map<Multigraph, Coefficient>& acc) {
  std::vector<Vertex> instances;
  for (const auto& [v, n] : g.legs())
    for (int i = 0; i < n; ++i) instances.push_back(v);
  if (instances.size() % 2 != 0) return 0;
  const Multigraph base = g.edges_only();
  std::size_t emitted = 0;
  for_each_pairing(instances.size(), [&](auto pairs) {
    Multigraph r = base;
    for (auto [a, b] : pairs)
      if (instances[a] != instances[b]) r.add_edge(instances[a], instances[b]);
    acc[std::move(r)] += c;
    ++emitted;
  });
  return emitted;
}

inline GraphPolynomial collect(const std::map<Multigraph, Coefficient>& acc) {
  GraphPolynomial out;
  for (const auto& [g, c] : acc) out.add_term(g, c);
  return out;
}

}  // namespace detail

/// Wick contraction. Edges pass through; terms with an odd number of legs
/// vanish. If `emitted` is given it receives the number of monomials produced
/// before any merging.
inline GraphPolynomial wick_contract(const GraphPolynomial& p,
                                     std::size_t* emitted = nullptr) {
  std::map<Multigraph, Coefficient> acc;
  std::size_t count = 0;
  for (const auto& [term, c] : p.terms()) count += detail::wick_into(term.graph(), c, acc);
  if (emitted) *emitted = count;
  return detail::collect(acc);
}

inline GraphPolynomial wick_contract(const Multigraph& g) {
  std::map<Multigraph, Coefficient> acc;
  detail::wick_into(g, 1, acc);
  return detail::collect(acc);
}

/// Delta = C delta^2. Intended for leg-free input, where the result is
/// leg-free; other inputs are accepted and handled by composition.
inline GraphPolynomial big_delta(const GraphPolynomial& p, std::size_t* emitted = nullptr) {
  return wick_contract(delta(delta(p)), emitted);
}

inline GraphPolynomial big_delta(const Multigraph& g) {
  return big_delta(GraphPolynomial(g));
}

/// Raw terms of the closed form
///   Delta G = (2 sum_{i<j<=R} c_ij - 2R sum_{i<=R} c_{i,R+1} + R(R+1) c_{R+1,R+2}) G
/// before any merging, R(R-1)/2 + R + 1 of them. The support of `g` is
/// relabeled order-preservingly to {1..R} first.
inline LabeledTerms closed_form_terms(const Multigraph& g) {
  if (!g.leg_free())
    throw std::invalid_argument("closed form applies to leg-free monomials only");
  LabeledTerms out;
  const auto support = g.support();
  const auto R = static_cast<Vertex>(support.size());
  if (R == 0) return out;
  const Multigraph base = g.relabeled([&](Vertex v) {
    return static_cast<Vertex>(
        std::lower_bound(support.begin(), support.end(), v) - support.begin() + 1);
  });
  auto times = [&](Vertex i, Vertex j) {
    Multigraph r = base;
    r.add_edge(i, j);
    return r;
  };
  for (Vertex i = 1; i <= R; ++i)
    for (Vertex j = i + 1; j <= R; ++j) out.emplace_back(times(i, j), 2);
  for (Vertex i = 1; i <= R; ++i) out.emplace_back(times(i, R + 1), -2 * static_cast<long>(R));
  out.emplace_back(times(R + 1, R + 2), static_cast<long>(R) * (R + 1));
  return out;
}

inline GraphPolynomial delta_formula_direct(const Multigraph& g) {
  GraphPolynomial out;
  for (const auto& [m, c] : closed_form_terms(g)) out.add_term(m, c);
  return out;
}

/// Product (delta-part of `a`) * b where `a` was produced from `base` by an
/// operator that may have introduced fresh vertices. Fresh vertices of `a`
/// (those outside support(base)) are moved above support(base) u support(b)
/// so they cannot be captured by labels of `b`.
inline Multigraph compose_fresh(const Multigraph& a, const Multigraph& base,
                                const Multigraph& b) {
  const auto base_support = base.support();
  Vertex top = 0;
  for (Vertex v : base_support) top = std::max(top, v);
  for (Vertex v : b.support()) top = std::max(top, v);
  std::map<Vertex, Vertex> fresh;
  for (Vertex v : a.support())
    if (!std::binary_search(base_support.begin(), base_support.end(), v))
      fresh.emplace(v, 0);
  for (auto& [from, to] : fresh) to = ++top;
  const Multigraph moved = a.relabeled([&](Vertex v) {
    auto it = fresh.find(v);
    return it == fresh.end() ? v : it->second;
  });
  return compose(moved, b);
}

/// A word in the operators delta ("d"), C ("C") and Delta ("D").
class OperatorWord {
 public:
  enum class Op { delta, wick, big_delta };

  OperatorWord() = default;
  explicit OperatorWord(std::vector<Op> ops) : ops_(std::move(ops)) {}

  /// Accepts "C d d", "Cdd", or "" (identity). Whitespace is ignored.
  static OperatorWord parse(std::string_view text) {
    std::vector<Op> ops;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char ch = text[i];
      if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
      switch (ch) {
        case 'd': ops.push_back(Op::delta); break;
        case 'C': ops.push_back(Op::wick); break;
        case 'D': ops.push_back(Op::big_delta); break;
        default:
          throw std::invalid_argument("unknown operator token '" + std::string(1, ch) +
                                      "' at offset " + std::to_string(i) +
                                      " (expected d, C or D)");
      }
    }
    return OperatorWord(std::move(ops));
  }

  [[nodiscard]] const std::vector<Op>& ops() const noexcept { return ops_; }
  [[nodiscard]] bool empty() const noexcept { return ops_.empty(); }

  [[nodiscard]] std::string to_string() const {
    std::string out;
    for (auto op : ops_) {
      if (!out.empty()) out += ' ';
      out += op == Op::delta ? 'd' : op == Op::wick ? 'C' : 'D';
    }
    return out;
  }

  friend bool operator==(const OperatorWord&, const OperatorWord&) = default;

 private:
  std::vector<Op> ops_;
};

/// Applies the word as an operator product: the rightmost letter acts first,
/// so [C, d, d] is C delta^2 = Delta.
inline GraphPolynomial apply_word(const OperatorWord& w, GraphPolynomial p) {
  for (auto it = w.ops().rbegin(); it != w.ops().rend(); ++it) {
    switch (*it) {
      case OperatorWord::Op::delta: p = delta(p); break;
      case OperatorWord::Op::wick: p = wick_contract(p); break;
      case OperatorWord::Op::big_delta: p = big_delta(p); break;
    }
  }
  return p;
}

}  // namespace overlap
