#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace overlap {

/// Replica label. Labels are positive; 0 is never a valid vertex.
using Vertex = std::uint32_t;

/// Bi-degree of a monomial: edges and legs, both counted with multiplicity.
struct Grading {
  std::size_t edges = 0;
  std::size_t legs = 0;

  friend auto operator<=>(const Grading&, const Grading&) = default;
};

struct EdgeSpec {
  Vertex i = 0;
  Vertex j = 0;
  int multiplicity = 1;
};

struct LegSpec {
  Vertex v = 0;
  int multiplicity = 1;
};

/// A monomial in overlap variables c_{i,j} (edges) and Gaussian insertions
/// h_v (legs).
///
/// Only positive multiplicities are stored. Edges are unordered pairs with
/// i != j, kept as (min, max). The diagonal c_{v,v} = 1 never appears, so
/// loops are rejected. The support is exactly the set of vertices mentioned
/// by an edge or a leg.
class Multigraph {
 public:
  using Edge = std::pair<Vertex, Vertex>;
  using EdgeMap = std::map<Edge, int>;
  using LegMap = std::map<Vertex, int>;

  Multigraph() = default;

  void add_edge(Vertex i, Vertex j, int multiplicity = 1) {
    check_vertex(i);
    check_vertex(j);
    if (i == j)
      throw std::invalid_argument("loop edge {" + std::to_string(i) + "," +
                                  std::to_string(j) + "} is not allowed");
    check_multiplicity(multiplicity);
    accumulate(edges_[ordered(i, j)], multiplicity);
  }

  void add_leg(Vertex v, int multiplicity = 1) {
    check_vertex(v);
    check_multiplicity(multiplicity);
    accumulate(legs_[v], multiplicity);
  }

  [[nodiscard]] const EdgeMap& edges() const noexcept { return edges_; }
  [[nodiscard]] const LegMap& legs() const noexcept { return legs_; }

  [[nodiscard]] int edge_multiplicity(Vertex i, Vertex j) const {
    if (i == j) return 0;
    auto it = edges_.find(ordered(i, j));
    return it == edges_.end() ? 0 : it->second;
  }

  [[nodiscard]] int leg_multiplicity(Vertex v) const {
    auto it = legs_.find(v);
    return it == legs_.end() ? 0 : it->second;
  }

  /// Sorted support.
  [[nodiscard]] std::vector<Vertex> support() const {
    std::vector<Vertex> out;
    out.reserve(2 * edges_.size() + legs_.size());
    for (const auto& [e, m] : edges_) {
      out.push_back(e.first);
      out.push_back(e.second);
    }
    for (const auto& [v, n] : legs_) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  [[nodiscard]] bool contains(Vertex v) const {
    if (legs_.contains(v)) return true;
    for (const auto& [e, m] : edges_)
      if (e.first == v || e.second == v) return true;
    return false;
  }

  [[nodiscard]] std::size_t vertex_count() const { return support().size(); }

  [[nodiscard]] Grading grading() const {
    Grading g;
    for (const auto& [e, m] : edges_) g.edges += static_cast<std::size_t>(m);
    for (const auto& [v, n] : legs_) g.legs += static_cast<std::size_t>(n);
    return g;
  }

  [[nodiscard]] bool empty() const noexcept {
    return edges_.empty() && legs_.empty();
  }
  [[nodiscard]] bool leg_free() const noexcept { return legs_.empty(); }

  /// Smallest positive label outside the support.
  [[nodiscard]] Vertex first_free_vertex() const {
    Vertex candidate = 1;
    for (Vertex v : support()) {
      if (v != candidate) break;
      ++candidate;
    }
    return candidate;
  }

  /// Copy with legs stripped.
  [[nodiscard]] Multigraph edges_only() const {
    Multigraph out;
    out.edges_ = edges_;
    return out;
  }

  /// Applies `map` to every vertex. `map` must be injective on the support.
  template <class Map>
  [[nodiscard]] Multigraph relabeled(Map&& map) const {
    Multigraph out;
    for (const auto& [e, m] : edges_) out.add_edge(map(e.first), map(e.second), m);
    for (const auto& [v, n] : legs_) out.add_leg(map(v), n);
    if (out.vertex_count() != vertex_count())
      throw std::invalid_argument("relabeling is not injective on the support");
    return out;
  }

  friend bool operator==(const Multigraph&, const Multigraph&) = default;
  friend auto operator<=>(const Multigraph& a, const Multigraph& b) {
    if (auto c = a.legs_ <=> b.legs_; c != 0) return c;
    return a.edges_ <=> b.edges_;
  }

 private:
  static Edge ordered(Vertex i, Vertex j) {
    return i < j ? Edge{i, j} : Edge{j, i};
  }
  static void check_vertex(Vertex v) {
    if (v == 0) throw std::invalid_argument("vertex labels must be positive");
  }
  static void accumulate(int& slot, int m) {
    if (slot > std::numeric_limits<int>::max() - m)
      throw std::overflow_error("multiplicity overflow");
    slot += m;
  }
  static void check_multiplicity(int m) {
    if (m < 1)
      throw std::invalid_argument("multiplicity must be >= 1, got " +
                                  std::to_string(m));
  }

  EdgeMap edges_;
  LegMap legs_;
};

/// Builds a monomial from edge and leg lists; repeated pairs accumulate.
inline Multigraph make_multigraph(std::span<const EdgeSpec> edges,
                                  std::span<const LegSpec> legs = {}) {
  Multigraph g;
  for (const auto& e : edges) g.add_edge(e.i, e.j, e.multiplicity);
  for (const auto& l : legs) g.add_leg(l.v, l.multiplicity);
  return g;
}

inline Multigraph make_multigraph(std::initializer_list<EdgeSpec> edges,
                                  std::initializer_list<LegSpec> legs = {}) {
  return make_multigraph(std::span<const EdgeSpec>(edges.begin(), edges.size()),
                         std::span<const LegSpec>(legs.begin(), legs.size()));
}

/// Same-label product: multiplicities add pointwise.
inline Multigraph compose(const Multigraph& a, const Multigraph& b) {
  Multigraph out = a;
  for (const auto& [e, m] : b.edges()) out.add_edge(e.first, e.second, m);
  for (const auto& [v, n] : b.legs()) out.add_leg(v, n);
  return out;
}

}  // namespace overlap
