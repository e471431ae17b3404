#pragma once

// Brute-force reference computations for the test suites. Nothing here calls the
// library's set finders or completion routines; only raw group multiplication is shared.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "groupset/group.hpp"
#include "groupset/set_rules.hpp"
#include "groupset/variants.hpp"

namespace oracle {

// All even permutations of {0..n-1} via std::next_permutation and an inversion count.
inline std::vector<std::vector<int>> even_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (p[i] > p[j]) ++inv;
    if (inv % 2 == 0) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Order of an element by multiplying until the identity comes back.
inline std::uint64_t order_by_powers(const groupset::Group& g, const groupset::Element& a) {
  groupset::Element x = a;
  std::uint64_t k = 1;
  while (x.index != 0) {
    x = g.compose(x, a);
    ++k;
  }
  return k;
}

// Product of element indices in order, using only Group::mul.
inline std::uint32_t product(const groupset::Group& g, const std::vector<std::uint32_t>& xs) {
  std::uint32_t acc = 0;
  for (auto x : xs) acc = g.mul(acc, x);
  return acc;
}

// Does some ordering of the distinct elements multiply to the identity? All permutations.
inline bool some_order_is_identity(const groupset::Group& g, std::vector<std::uint32_t> xs) {
  std::sort(xs.begin(), xs.end());
  do {
    if (product(g, xs) == 0) return true;
  } while (std::next_permutation(xs.begin(), xs.end()));
  return false;
}

// Every subset of the table (as sorted card ids) that contains a set, checking every
// ordered tuple of every admissible arity straight from the definitions.
inline std::set<std::vector<std::uint32_t>> all_sets(const groupset::Deck& deck, const std::vector<std::uint32_t>& ids) {
  const auto& g = deck.group();
  const auto& rule = deck.variant().rule;
  std::set<std::vector<std::uint32_t>> out;
  const std::size_t t = ids.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << t); ++mask) {
    std::vector<std::uint32_t> sub, elems;
    for (std::size_t i = 0; i < t; ++i)
      if (mask >> i & 1) {
        sub.push_back(ids[i]);
        elems.push_back(deck.element_index(ids[i]));
      }
    if (!rule.accepts_arity(sub.size())) continue;
    bool hit = false;
    if (rule.is_ap()) {
      std::sort(elems.begin(), elems.end());
      do {
        const auto a = elems[0], b = elems[1], c = elems[2];
        if (g.mul(b, g.inv(a)) == g.mul(c, g.inv(b))) hit = true;
      } while (!hit && std::next_permutation(elems.begin(), elems.end()));
    } else {
      hit = some_order_is_identity(g, elems);
    }
    if (hit) {
      std::sort(sub.begin(), sub.end());
      out.insert(sub);
    }
  }
  return out;
}

// Every k-subset of the deck tested directly: returns true if some subset of `ids` of
// any admissible size is a set.
inline bool any_set(const groupset::Deck& deck, const std::vector<std::uint32_t>& ids) {
  return !all_sets(deck, ids).empty();
}

}  // namespace oracle
