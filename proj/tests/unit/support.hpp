#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "overlap/multigraph.hpp"
#include "overlap/polynomial.hpp"

namespace testing_support {

using overlap::Multigraph;
using overlap::Vertex;

/// Random monomial on labels drawn from 1..max_label.
inline Multigraph random_multigraph(std::mt19937_64& rng, int max_label, int max_edges,
                                    int max_legs, int max_mult = 3) {
  std::uniform_int_distribution<int> label(1, max_label);
  std::uniform_int_distribution<int> mult(1, max_mult);
  std::uniform_int_distribution<int> ne(0, max_edges);
  std::uniform_int_distribution<int> nl(0, max_legs);
  Multigraph g;
  const int e = ne(rng);
  for (int k = 0; k < e; ++k) {
    const int i = label(rng);
    int j = label(rng);
    if (i == j) j = i % max_label + 1;
    if (i == j) continue;
    g.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(j), mult(rng));
  }
  const int l = nl(rng);
  for (int k = 0; k < l; ++k) g.add_leg(static_cast<Vertex>(label(rng)), mult(rng));
  return g;
}

inline Multigraph random_leg_free(std::mt19937_64& rng, int max_label, int max_edges,
                                  int max_mult = 2) {
  return random_multigraph(rng, max_label, max_edges, 0, max_mult);
}

/// Relabels the support by a random injective map into 1..span.
inline Multigraph random_relabel(const Multigraph& g, std::mt19937_64& rng, Vertex span = 20) {
  const auto sup = g.support();
  std::vector<Vertex> pool(std::max<std::size_t>(span, sup.size()));
  std::iota(pool.begin(), pool.end(), Vertex{1});
  std::shuffle(pool.begin(), pool.end(), rng);
  return g.relabeled([&](Vertex v) {
    const auto pos = std::lower_bound(sup.begin(), sup.end(), v) - sup.begin();
    return pool[static_cast<std::size_t>(pos)];
  });
}

/// Brute-force canonical key: the least (legs, edges) encoding over every
/// bijection of the support onto 1..k.
inline std::pair<std::vector<std::pair<Vertex, int>>, std::vector<std::tuple<Vertex, Vertex, int>>>
brute_force_key(const Multigraph& g) {
  const auto sup = g.support();
  std::vector<Vertex> target(sup.size());
  std::iota(target.begin(), target.end(), Vertex{1});
  using Key = std::pair<std::vector<std::pair<Vertex, int>>,
                        std::vector<std::tuple<Vertex, Vertex, int>>>;
  Key best;
  bool first = true;
  do {
    auto map = [&](Vertex v) {
      return target[static_cast<std::size_t>(std::lower_bound(sup.begin(), sup.end(), v) -
                                             sup.begin())];
    };
    Key k;
    for (const auto& [v, n] : g.legs()) k.first.emplace_back(map(v), n);
    for (const auto& [e, m] : g.edges()) {
      Vertex a = map(e.first), b = map(e.second);
      if (a > b) std::swap(a, b);
      k.second.emplace_back(a, b, m);
    }
    std::sort(k.first.begin(), k.first.end());
    std::sort(k.second.begin(), k.second.end());
    if (first || k < best) best = k;
    first = false;
  } while (std::next_permutation(target.begin(), target.end()));
  return best;
}

inline bool brute_force_isomorphic(const Multigraph& a, const Multigraph& b) {
  if (a.vertex_count() != b.vertex_count()) return false;
  return brute_force_key(a) == brute_force_key(b);
}

/// Random polynomial with small integer coefficients.
inline overlap::GraphPolynomial random_polynomial(std::mt19937_64& rng, int terms) {
  std::uniform_int_distribution<int> coef(-7, 7);
  overlap::GraphPolynomial p;
  for (int t = 0; t < terms; ++t) p.add_term(random_multigraph(rng, 5, 3, 2), coef(rng));
  return p;
}

}  // namespace testing_support
