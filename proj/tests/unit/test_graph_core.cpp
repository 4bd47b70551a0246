#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "overlap/canonical.hpp"
#include "overlap/multigraph.hpp"
#include "overlap/pairing.hpp"
#include "overlap/polynomial.hpp"
#include "support.hpp"

using namespace overlap;
using testing_support::brute_force_isomorphic;
using testing_support::random_multigraph;
using testing_support::random_relabel;

TEST_CASE("multigraph construction and grading", "[multigraph]") {
  auto g = make_multigraph({{1, 2, 2}, {1, 3}}, {{2}});
  CHECK(g.grading().edges == 3);
  CHECK(g.grading().legs == 1);
  CHECK(g.support() == std::vector<Vertex>{1, 2, 3});
  CHECK(g.edge_multiplicity(2, 1) == 2);
  CHECK(g.leg_multiplicity(2) == 1);
  CHECK(g.leg_multiplicity(1) == 0);
  CHECK_FALSE(g.leg_free());
  CHECK(g.edges_only().leg_free());
}

TEST_CASE("multigraph rejects invalid input", "[multigraph]") {
  Multigraph g;
  CHECK_THROWS_AS(g.add_edge(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(g.add_edge(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(g.add_edge(1, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(g.add_leg(3, -1), std::invalid_argument);
  CHECK(g.empty());
}

TEST_CASE("repeated factors accumulate; edges are unordered", "[multigraph]") {
  auto a = make_multigraph({{2, 1}, {1, 2}});
  auto b = make_multigraph({{1, 2, 2}});
  CHECK(a == b);
}

TEST_CASE("first free vertex fills gaps", "[multigraph]") {
  CHECK(make_multigraph({{1, 3}}).first_free_vertex() == 2);
  CHECK(make_multigraph({{1, 2}}).first_free_vertex() == 3);
  CHECK(Multigraph{}.first_free_vertex() == 1);
  CHECK(make_multigraph({{2, 3}}).first_free_vertex() == 1);
}

TEST_CASE("relabeling must be injective", "[multigraph]") {
  auto g = make_multigraph({{1, 2}, {2, 3}});
  CHECK_THROWS_AS(g.relabeled([](Vertex v) { return v == 3 ? Vertex{1} : v; }),
                  std::invalid_argument);
  auto h = g.relabeled([](Vertex v) { return v + 10; });
  CHECK(h.support() == std::vector<Vertex>{11, 12, 13});
}

TEST_CASE("compose adds multiplicities", "[multigraph]") {
  auto g = compose(make_multigraph({{1, 2}}, {{1}}), make_multigraph({{1, 2}}, {{1}, {3}}));
  CHECK(g.edge_multiplicity(1, 2) == 2);
  CHECK(g.leg_multiplicity(1) == 2);
  CHECK(g.leg_multiplicity(3) == 1);
}

TEST_CASE("canonical form has support 1..k and preserves grading", "[canonical]") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const auto g = random_multigraph(rng, 7, 5, 3);
    const auto c = canonicalize(g);
    CHECK(c.vertex_count() == g.vertex_count());
    CHECK(c.grading() == g.grading());
    const auto sup = c.graph().support();
    for (std::size_t i = 0; i < sup.size(); ++i) CHECK(sup[i] == i + 1);
    CHECK(canonicalize(c.graph()) == c);
  }
}

TEST_CASE("canonical form is invariant under relabeling", "[canonical][property]") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 400; ++t) {
    const auto g = random_multigraph(rng, 6, 6, 3);
    const auto h = random_relabel(g, rng);
    CHECK(canonicalize(g) == canonicalize(h));
  }
}

TEST_CASE("canonical equality agrees with brute-force isomorphism", "[canonical][property]") {
  std::mt19937_64 rng(13);
  int iso = 0, non_iso = 0;
  for (int t = 0; t < 1500; ++t) {
    const auto a = random_multigraph(rng, 5, 4, 2, 2);
    const auto b = (t % 3 == 0) ? random_relabel(a, rng, 5) : random_multigraph(rng, 5, 4, 2, 2);
    const bool expected = brute_force_isomorphic(a, b);
    CHECK(isomorphic(a, b) == expected);
    (expected ? iso : non_iso)++;
  }
  CHECK(iso > 100);
  CHECK(non_iso > 100);
}

TEST_CASE("regular graphs with many automorphisms", "[canonical]") {
  // 6-cycle vs two triangles: same degree sequence, not isomorphic.
  auto c6 = make_multigraph({{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 1}});
  auto tt = make_multigraph({{1, 2}, {2, 3}, {3, 1}, {4, 5}, {5, 6}, {6, 4}});
  CHECK_FALSE(isomorphic(c6, tt));
  auto c6b = make_multigraph({{1, 3}, {3, 5}, {5, 2}, {2, 4}, {4, 6}, {6, 1}});
  CHECK(isomorphic(c6, c6b));
  // K4 and its relabelings.
  auto k4 = make_multigraph({{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
  auto k4b = make_multigraph({{5, 9}, {5, 7}, {5, 8}, {9, 7}, {9, 8}, {7, 8}});
  CHECK(canonicalize(k4) == canonicalize(k4b));
}

TEST_CASE("the {1,2}{2,3} class contains {1,2}{1,3}", "[canonical]") {
  CHECK(isomorphic(make_multigraph({{1, 2}, {2, 3}}), make_multigraph({{1, 2}, {1, 3}})));
  CHECK_FALSE(isomorphic(make_multigraph({{1, 2}, {2, 3}}), make_multigraph({{1, 2}, {3, 4}})));
}

TEST_CASE("legs and multiplicities distinguish classes", "[canonical]") {
  CHECK_FALSE(isomorphic(make_multigraph({{1, 2}}, {{1}}), make_multigraph({{1, 2}}, {{1, 2}})));
  CHECK(isomorphic(make_multigraph({{1, 2}}, {{1}}), make_multigraph({{1, 2}}, {{2}})));
  CHECK(isomorphic(make_multigraph({{1, 2, 2}, {2, 3}}), make_multigraph({{1, 2}, {2, 3, 2}})));
  CHECK_FALSE(isomorphic(make_multigraph({{1, 2, 2}, {2, 3}}), make_multigraph({{1, 2, 2}, {3, 4}})));
}

TEST_CASE("polynomial arithmetic merges classes and drops zeros", "[polynomial]") {
  GraphPolynomial p;
  p.add_term(make_multigraph({{1, 2}, {2, 3}}), 3);
  p.add_term(make_multigraph({{4, 1}, {1, 7}}), -3);
  CHECK(p.is_zero());
  GraphPolynomial a(make_multigraph({{1, 2}}), 2);
  GraphPolynomial b(make_multigraph({{3, 5}}), 5);
  CHECK((a + b).coefficient(make_multigraph({{1, 2}})) == 7);
  CHECK((a - a).is_zero());
  CHECK((a * Coefficient(3)).coefficient(make_multigraph({{1, 2}})) == 6);
  CHECK((a * b).coefficient(make_multigraph({{1, 2, 2}})) == 10);
  CHECK(GraphPolynomial::one().coefficient(Multigraph{}) == 1);
}

TEST_CASE("polynomial addition is commutative and associative", "[polynomial][property]") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 100; ++t) {
    auto a = testing_support::random_polynomial(rng, 4);
    auto b = testing_support::random_polynomial(rng, 4);
    auto c = testing_support::random_polynomial(rng, 4);
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a - b) + b == a);
  }
}

namespace {
// Counts perfect matchings of the set bits of `mask` by pairing the lowest
// element with each remaining one.
long long count_matchings_mask(unsigned mask) {
  if (mask == 0) return 1;
  const unsigned low = mask & (~mask + 1);
  const unsigned rest = mask & ~low;
  long long total = 0;
  for (unsigned m = rest; m; m &= m - 1) total += count_matchings_mask(rest & ~(m & (~m + 1)));
  return total;
}
long long count_matchings(int n) { return count_matchings_mask((1u << n) - 1u); }
}  // namespace

TEST_CASE("pairing counts are double factorials", "[pairing]") {
  const long long expected[] = {1, 3, 15, 105, 945, 10395};
  for (int m = 1; m <= 6; ++m) {
    const auto all = enumerate_pairings(static_cast<std::size_t>(2 * m));
    CHECK(all.size() == static_cast<std::size_t>(expected[m - 1]));
    CHECK(all.size() == static_cast<std::size_t>(count_matchings(2 * m)));
    CHECK(double_factorial(2 * m - 1) == expected[m - 1]);
  }
  CHECK(double_factorial(-1) == 1);
  CHECK(enumerate_pairings(std::size_t{5}).empty());
  CHECK(enumerate_pairings(std::size_t{0}).size() == 1);
}

TEST_CASE("pairings are normalized and distinct perfect matchings", "[pairing]") {
  for (std::size_t n : {2u, 4u, 6u, 8u}) {
    const auto all = enumerate_pairings(n);
    std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
    for (const auto& p : all) {
      std::vector<bool> used(n, false);
      for (std::size_t i = 0; i < p.pairs.size(); ++i) {
        const auto [a, b] = p.pairs[i];
        CHECK(a < b);
        if (i + 1 < p.pairs.size()) CHECK(a < p.pairs[i + 1].first);
        CHECK_FALSE(used[a]);
        CHECK_FALSE(used[b]);
        used[a] = used[b] = true;
      }
      CHECK(std::all_of(used.begin(), used.end(), [](bool x) { return x; }));
      seen.insert(p.pairs);
    }
    CHECK(seen.size() == all.size());
  }
}

TEST_CASE("labelled pairings carry labels", "[pairing]") {
  const std::vector<char> labels{'a', 'b', 'c', 'd'};
  const auto all = enumerate_pairings(std::span<const char>(labels));
  REQUIRE(all.size() == 3);
  CHECK(all[0].pairs.front().first == 'a');
}
