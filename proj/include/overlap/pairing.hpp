#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "overlap/polynomial.hpp"

namespace overlap {

/// Perfect matching of an ordered label set, written as ordered pairs
/// (a_1,b_1),...,(a_m,b_m) with a_i < b_i and a_1 < a_2 < ... < a_m.
template <class Label = std::size_t>
struct Pairing {
  std::vector<std::pair<Label, Label>> pairs;

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

/// (n)!! for n >= -1, with (-1)!! = 0!! = 1.
inline Coefficient double_factorial(long n) {
  Coefficient out = 1;
  for (long k = n; k > 1; k -= 2) out *= k;
  return out;
}

namespace detail {

template <class Fn>
void for_each_pairing_impl(std::vector<std::size_t>& free_slots,
                           std::vector<std::pair<std::size_t, std::size_t>>& acc,
                           Fn& fn) {
  if (free_slots.empty()) {
    fn(std::span<const std::pair<std::size_t, std::size_t>>(acc));
    return;
  }
  // The smallest unused index opens the next pair.
  const std::size_t first = free_slots.front();
  for (std::size_t pick = 1; pick < free_slots.size(); ++pick) {
    const std::size_t partner = free_slots[pick];
    std::vector<std::size_t> rest;
    rest.reserve(free_slots.size() - 2);
    for (std::size_t i = 1; i < free_slots.size(); ++i)
      if (i != pick) rest.push_back(free_slots[i]);
    acc.emplace_back(first, partner);
    for_each_pairing_impl(rest, acc, fn);
    acc.pop_back();
  }
}

}  // namespace detail

/// Calls `fn(span<const pair<size_t,size_t>>)` once per pairing of the
/// indices {0..count-1}. Odd counts produce no calls.
template <class Fn>
void for_each_pairing(std::size_t count, Fn&& fn) {
  if (count % 2 != 0) return;
  std::vector<std::size_t> slots(count);
  for (std::size_t i = 0; i < count; ++i) slots[i] = i;
  std::vector<std::pair<std::size_t, std::size_t>> acc;
  acc.reserve(count / 2);
  detail::for_each_pairing_impl(slots, acc, fn);
}

/// All pairings of `labels` (taken in the given order). An odd-sized set
/// has none, which callers treat as annihilation under Wick contraction.
template <class Label>
std::vector<Pairing<Label>> enumerate_pairings(std::span<const Label> labels) {
  std::vector<Pairing<Label>> out;
  for_each_pairing(labels.size(), [&](auto pairs) {
    Pairing<Label> p;
    p.pairs.reserve(pairs.size());
    for (auto [a, b] : pairs) p.pairs.emplace_back(labels[a], labels[b]);
    out.push_back(std::move(p));
  });
  return out;
}

inline std::vector<Pairing<std::size_t>> enumerate_pairings(std::size_t count) {
  std::vector<std::size_t> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = i;
  return enumerate_pairings(std::span<const std::size_t>(labels));
}

}  // namespace overlap
