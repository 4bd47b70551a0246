#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <tuple>
#include <utility>
#include <vector>

#include "overlap/multigraph.hpp"

namespace overlap {

/// A multigraph with support {1..k} that is the fixed representative of its
/// isomorphism class.
///
/// Ordering is by the encoding (k, sorted legs (v, n_v), sorted edges
/// (i, j, m_ij)), compared lexicographically.
class CanonicalMultigraph {
 public:
  CanonicalMultigraph() = default;

  [[nodiscard]] const Multigraph& graph() const noexcept { return graph_; }
  [[nodiscard]] std::size_t vertex_count() const noexcept { return k_; }
  [[nodiscard]] Grading grading() const { return graph_.grading(); }
  [[nodiscard]] bool empty() const noexcept { return graph_.empty(); }
  [[nodiscard]] bool leg_free() const noexcept { return graph_.leg_free(); }

  friend bool operator==(const CanonicalMultigraph&,
                         const CanonicalMultigraph&) = default;
  friend std::strong_ordering operator<=>(const CanonicalMultigraph& a,
                                          const CanonicalMultigraph& b) {
    if (auto c = a.k_ <=> b.k_; c != 0) return c;
    auto c = a.graph_ <=> b.graph_;
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  friend CanonicalMultigraph canonicalize(const Multigraph& g);
  CanonicalMultigraph(Multigraph g, std::size_t k) : graph_(std::move(g)), k_(k) {}

  Multigraph graph_;
  std::size_t k_ = 0;
};

namespace detail {

// Individualization-refinement search for the least encoding.
//
// Vertices are first split into cells by an isomorphism-invariant key and the
// ordered partition is refined by neighbour colours until stable. Leaves of
// the search tree are discrete partitions; each leaf fixes a labeling, and
// the least encoding over all leaves is the canonical one. Branches on
// twin vertices (same legs, same multiplicity to every other vertex) are
// skipped: the transposition is an automorphism fixing the current partition,
// so their subtrees yield identical encodings.
class Canonicalizer {
 public:
  explicit Canonicalizer(const Multigraph& g) : support_(g.support()) {
    k_ = support_.size();
    adj_.assign(k_ * k_, 0);
    legs_.assign(k_, 0);
    auto index = [&](Vertex v) {
      return static_cast<std::size_t>(
          std::lower_bound(support_.begin(), support_.end(), v) - support_.begin());
    };
    for (const auto& [e, m] : g.edges()) {
      auto a = index(e.first), b = index(e.second);
      adj_[a * k_ + b] = m;
      adj_[b * k_ + a] = m;
    }
    for (const auto& [v, n] : g.legs()) legs_[index(v)] = n;
  }

  Multigraph run() {
    if (k_ == 0) return {};
    search(initial_partition());
    Multigraph out;
    for (const auto& [v, n] : best_legs_) out.add_leg(v, n);
    for (const auto& [i, j, m] : best_edges_) out.add_edge(i, j, m);
    return out;
  }

  [[nodiscard]] std::size_t vertex_count() const noexcept { return k_; }

 private:
  using Cells = std::vector<std::vector<std::size_t>>;
  using LegList = std::vector<std::pair<Vertex, int>>;
  using EdgeList = std::vector<std::tuple<Vertex, Vertex, int>>;

  [[nodiscard]] int adj(std::size_t a, std::size_t b) const { return adj_[a * k_ + b]; }

  Cells initial_partition() const {
    // Leg-bearing vertices first (ascending leg multiplicity), then by
    // decreasing edge strength and degree.
    using Key = std::tuple<int, int, int, int>;
    std::vector<std::pair<Key, std::size_t>> keyed;
    for (std::size_t v = 0; v < k_; ++v) {
      int strength = 0, degree = 0;
      for (std::size_t w = 0; w < k_; ++w)
        if (adj(v, w) > 0) {
          strength += adj(v, w);
          ++degree;
        }
      keyed.push_back({Key{legs_[v] == 0 ? 1 : 0, legs_[v], -strength, -degree}, v});
    }
    std::sort(keyed.begin(), keyed.end());
    Cells cells;
    for (std::size_t i = 0; i < keyed.size(); ++i) {
      if (i == 0 || keyed[i].first != keyed[i - 1].first) cells.emplace_back();
      cells.back().push_back(keyed[i].second);
    }
    return cells;
  }

  void refine(Cells& cells) const {
    std::vector<std::size_t> colour(k_);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t c = 0; c < cells.size(); ++c)
        for (auto v : cells[c]) colour[v] = c;
      Cells next;
      next.reserve(k_);
      for (const auto& cell : cells) {
        if (cell.size() == 1) {
          next.push_back(cell);
          continue;
        }
        using Signature = std::vector<std::pair<std::size_t, int>>;
        std::vector<std::pair<Signature, std::size_t>> sig;
        sig.reserve(cell.size());
        for (auto v : cell) {
          Signature s;
          for (std::size_t w = 0; w < k_; ++w)
            if (adj(v, w) > 0) s.emplace_back(colour[w], adj(v, w));
          std::sort(s.begin(), s.end());
          sig.emplace_back(std::move(s), v);
        }
        std::stable_sort(sig.begin(), sig.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t before = next.size();
        for (std::size_t i = 0; i < sig.size(); ++i) {
          if (i == 0 || sig[i].first != sig[i - 1].first) next.emplace_back();
          next.back().push_back(sig[i].second);
        }
        if (next.size() - before > 1) changed = true;
      }
      cells = std::move(next);
    }
  }

  [[nodiscard]] bool twins(std::size_t u, std::size_t v) const {
    if (legs_[u] != legs_[v]) return false;
    for (std::size_t w = 0; w < k_; ++w) {
      if (w == u || w == v) continue;
      if (adj(u, w) != adj(v, w)) return false;
    }
    return true;
  }

  void search(Cells cells) {
    refine(cells);
    auto open = std::find_if(cells.begin(), cells.end(),
                             [](const auto& c) { return c.size() > 1; });
    if (open == cells.end()) {
      evaluate_leaf(cells);
      return;
    }
    const auto target = static_cast<std::size_t>(open - cells.begin());
    const auto members = cells[target];
    std::vector<std::size_t> tried;
    for (auto v : members) {
      if (std::any_of(tried.begin(), tried.end(),
                      [&](std::size_t u) { return twins(u, v); }))
        continue;
      tried.push_back(v);
      Cells child;
      child.reserve(cells.size() + 1);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c != target) {
          child.push_back(cells[c]);
          continue;
        }
        child.push_back({v});
        std::vector<std::size_t> rest;
        for (auto w : members)
          if (w != v) rest.push_back(w);
        child.push_back(std::move(rest));
      }
      search(std::move(child));
    }
  }

  void evaluate_leaf(const Cells& cells) {
    std::vector<Vertex> label(k_);
    for (std::size_t pos = 0; pos < cells.size(); ++pos)
      label[cells[pos].front()] = static_cast<Vertex>(pos + 1);
    LegList legs;
    EdgeList edges;
    for (std::size_t v = 0; v < k_; ++v) {
      if (legs_[v] > 0) legs.emplace_back(label[v], legs_[v]);
      for (std::size_t w = v + 1; w < k_; ++w)
        if (adj(v, w) > 0)
          edges.emplace_back(std::min(label[v], label[w]), std::max(label[v], label[w]),
                             adj(v, w));
    }
    std::sort(legs.begin(), legs.end());
    std::sort(edges.begin(), edges.end());
    if (!have_best_ || std::tie(legs, edges) < std::tie(best_legs_, best_edges_)) {
      best_legs_ = std::move(legs);
      best_edges_ = std::move(edges);
      have_best_ = true;
    }
  }

  std::vector<Vertex> support_;
  std::size_t k_ = 0;
  std::vector<int> adj_;
  std::vector<int> legs_;
  bool have_best_ = false;
  LegList best_legs_;
  EdgeList best_edges_;
};

}  // namespace detail

/// Relabels the support to {1..k} and picks the class representative.
/// Isomorphic inputs give equal outputs; isolated vertices never occur
/// because the support only holds vertices touched by an edge or leg.
inline CanonicalMultigraph canonicalize(const Multigraph& g) {
  detail::Canonicalizer c(g);
  const auto k = c.vertex_count();
  return CanonicalMultigraph(c.run(), k);
}

inline bool isomorphic(const Multigraph& a, const Multigraph& b) {
  return canonicalize(a) == canonicalize(b);
}

}  // namespace overlap
