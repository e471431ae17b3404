#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groupset/errors.hpp"
#include "groupset/group.hpp"
#include "groupset/random.hpp"

namespace groupset {

// Which card tuples count as a set.
//
// ProductIdentity: the cards, multiplied in the given order, give the identity. Either a
// fixed number of cards or any number >= 3.
// ArithmeticProgression: three cards a, b, c with b * a^-1 == c * b^-1.
struct SetRule {
  enum class Kind { ProductIdentity, ArithmeticProgression };

  Kind kind = Kind::ProductIdentity;
  unsigned fixed_size = 3;  // 0 means "any size >= kAnyMinimum"

  static constexpr unsigned kAnyMinimum = 3;

  static SetRule product(unsigned k) { return {Kind::ProductIdentity, k}; }
  static SetRule product_any() { return {Kind::ProductIdentity, 0}; }
  static SetRule arithmetic_progression() { return {Kind::ArithmeticProgression, 3}; }

  bool is_any() const noexcept { return kind == Kind::ProductIdentity && fixed_size == 0; }
  bool is_ap() const noexcept { return kind == Kind::ArithmeticProgression; }

  // Whether the order of the cards matters when checking a tuple.
  bool ordered(const Group& g) const noexcept { return is_ap() || !g.is_abelian(); }

  // Smallest tuple size the rule accepts.
  unsigned min_arity() const noexcept { return is_any() ? kAnyMinimum : fixed_size; }

  bool accepts_arity(std::size_t n) const noexcept {
    return is_any() ? n >= kAnyMinimum : n == fixed_size;
  }

  // Number of cards a completion fixes; also the default number of cards dealt when stuck.
  unsigned arity_hint() const noexcept { return is_any() ? 3 : fixed_size; }

  friend bool operator==(const SetRule&, const SetRule&) = default;
};

inline std::string to_string(const SetRule& r) {
  if (r.is_ap()) return "arithmetic-progression";
  if (r.is_any()) return "product-identity(any)";
  return "product-identity(" + std::to_string(r.fixed_size) + ")";
}

// ---------------------------------------------------------------------------
// Index-level predicates. Indices are element positions in the group's enumeration; no
// arity or duplicate validation happens here.

inline std::uint32_t product_of(const Group& g, std::span<const std::uint32_t> cards) {
  std::uint32_t acc = 0;
  for (auto c : cards) acc = g.mul(acc, c);
  return acc;
}

inline bool is_ap_indices(const Group& g, std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  return g.mul(b, g.inv(a)) == g.mul(c, g.inv(b));
}

// The rule's relation on an ordered tuple, ignoring distinctness.
inline bool rule_holds(const SetRule& rule, const Group& g, std::span<const std::uint32_t> cards) {
  if (rule.is_ap()) return cards.size() == 3 && is_ap_indices(g, cards[0], cards[1], cards[2]);
  return product_of(g, cards) == 0;
}

// ---------------------------------------------------------------------------
// Element-level operations.

// True iff the ordered tuple is a set. Throws RuleError on wrong arity or repeated cards.
inline bool is_set(const SetRule& rule, const Group& g, std::span<const Element> cards) {
  if (!rule.accepts_arity(cards.size()))
    throw RuleError("rule " + to_string(rule) + " does not accept " + std::to_string(cards.size()) + " cards");
  std::vector<std::uint32_t> idx;
  idx.reserve(cards.size());
  for (const auto& c : cards) {
    if (!g.contains(c)) throw ElementMismatch("card is not an element of the group");
    idx.push_back(static_cast<std::uint32_t>(c.index));
  }
  std::vector<std::uint32_t> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw RuleError("duplicate cards");
  return rule_holds(rule, g, idx);
}

// Some ordering of distinct element indices that satisfies the rule, or nullopt. Product
// rules search all orderings through the products reachable by each subset; claims wider
// than the search limit report nullopt unless the given order already works.
inline std::optional<std::vector<std::uint32_t>> satisfying_order(const SetRule& rule, const Group& g,
                                                                  std::span<const std::uint32_t> cards) {
  if (!rule.accepts_arity(cards.size())) return std::nullopt;
  std::vector<std::uint32_t> order(cards.begin(), cards.end());
  if (rule_holds(rule, g, order)) return order;
  if (rule.is_ap()) {
    std::sort(order.begin(), order.end());
    do {
      if (rule_holds(rule, g, order)) return order;
    } while (std::next_permutation(order.begin(), order.end()));
    return std::nullopt;
  }
  if (g.is_abelian()) return std::nullopt;

  const std::size_t k = cards.size();
  const std::size_t words = static_cast<std::size_t>((g.order() + 63) / 64);
  if (k > 24 || (std::size_t{1} << k) * words > (std::size_t{1} << 22)) return std::nullopt;
  const std::size_t masks = std::size_t{1} << k;
  std::vector<std::uint64_t> reach(masks * words, 0);
  auto has = [&](std::size_t m, std::uint32_t e) { return (reach[m * words + e / 64] >> (e % 64)) & 1; };
  reach[0] = 1;
  for (std::size_t m = 0; m < masks; ++m)
    for (std::size_t w = 0; w < words; ++w)
      for (std::uint64_t bits = reach[m * words + w]; bits; bits &= bits - 1) {
        const auto p = static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        for (std::size_t x = 0; x < k; ++x) {
          if (m >> x & 1) continue;
          const std::uint32_t q = g.mul(p, cards[x]);
          reach[(m | std::size_t{1} << x) * words + q / 64] |= std::uint64_t{1} << (q % 64);
        }
      }
  if (!has(masks - 1, 0)) return std::nullopt;
  // Peel cards off the end, keeping the remaining product reachable.
  order.clear();
  std::size_t rest = masks - 1;
  std::uint32_t target = 0;
  while (rest) {
    for (std::size_t x = 0; x < k; ++x) {
      if (!(rest >> x & 1)) continue;
      const std::uint32_t before = g.mul(target, g.inv(cards[x]));
      const std::size_t smaller = rest & ~(std::size_t{1} << x);
      if (has(smaller, before)) {
        order.push_back(cards[x]);
        rest = smaller;
        target = before;
        break;
      }
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

// Result of solving for the missing card of a set.
struct Completion {
  Element card;
  // AP: the completion equals a, so no third card exists. Product: it repeats a given card.
  bool degenerate = false;
};

// c = b * a^-1 * b, the unique card with (a, b, c) an arithmetic progression.
inline Completion complete_ap(const Group& g, const Element& a, const Element& b) {
  if (a == b) throw RuleError("complete_ap needs two different cards");
  Element c = g.compose(g.compose(b, g.inverse(a)), b);
  const bool degenerate = c == a;
  return {std::move(c), degenerate};
}

// The element x that, inserted at `position`, makes the ordered product of k cards the
// identity. With prefix L and suffix R around the gap, x = L^-1 * R^-1.
inline Completion complete_product(const Group& g, unsigned k, std::span<const Element> cards,
                                   std::size_t position) {
  if (k < 2) throw RuleError("product rule needs k >= 2");
  if (cards.size() + 1 != k) throw RuleError("complete_product needs k-1 cards");
  if (position >= k) throw RuleError("position out of range");
  Element prefix = g.identity();
  Element suffix = g.identity();
  for (std::size_t i = 0; i < cards.size(); ++i) {
    if (i < position)
      prefix = g.compose(prefix, cards[i]);
    else
      suffix = g.compose(suffix, cards[i]);
  }
  Element x = g.compose(g.inverse(prefix), g.inverse(suffix));
  const bool dup = std::find(cards.begin(), cards.end(), x) != cards.end();
  return {std::move(x), dup};
}

struct Fraction {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  std::string str() const { return std::to_string(numerator) + "/" + std::to_string(denominator); }

  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.numerator == b.numerator && a.denominator == b.denominator;
  }
};

// Share of group elements of order 2: the chance that an ordered pair fails to complete,
// counted over the whole group as the paper-level figure (denominator = group order).
inline Fraction completion_failure_rate(const Group& g) {
  auto h = g.order_histogram();
  return {h.count(2) ? h[2] : 0, g.order()};
}

// The same failure rate conditioned on a != b: b * a^-1 ranges over non-identity elements.
inline Fraction ap_degeneracy_rate(const Group& g) {
  auto h = g.order_histogram();
  return {h.count(2) ? h[2] : 0, g.order() - 1};
}

// ---------------------------------------------------------------------------
// Translation (torsor) invariance.

enum class Side { Left, Right };

struct TorsorCheck {
  bool invariant = true;
  bool exhaustive = true;
  std::uint64_t cases = 0;
  // First violation found: translating `tuple` by `translation` flips the rule's verdict.
  std::optional<std::uint32_t> translation;
  std::vector<std::uint32_t> tuple;
};

struct TorsorOptions {
  // Exhaustive when (#tuples * #translations) stays within this many cases.
  std::uint64_t exhaustive_limit = 20'000'000;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 0;
};

// Checks whether translating every card of a tuple by the same element (g*x or x*g)
// preserves the rule. Tuples range over all ordered tuples of group elements, repeats
// allowed, of each arity the rule uses (3 and 4 for the "any size" rule).
inline TorsorCheck rule_is_torsor_invariant(const SetRule& rule, const Group& g, Side side,
                                            const TorsorOptions& opt = {}) {
  std::vector<unsigned> arities;
  if (rule.is_any())
    arities = {3, 4};
  else
    arities = {rule.fixed_size};

  const std::uint64_t n = g.order();
  std::uint64_t total = 0;
  bool fits = true;
  for (unsigned k : arities) {
    std::uint64_t c = n;
    for (unsigned i = 0; i < k && fits; ++i) {
      if (c > opt.exhaustive_limit / n) fits = false;
      c *= n;
    }
    total += c;
  }
  fits = fits && total <= opt.exhaustive_limit;

  TorsorCheck result;
  result.exhaustive = fits;
  std::vector<std::uint32_t> moved;

  auto test = [&](std::span<const std::uint32_t> tuple, std::uint32_t t) {
    moved.assign(tuple.begin(), tuple.end());
    for (auto& x : moved) x = side == Side::Left ? g.mul(t, x) : g.mul(x, t);
    ++result.cases;
    if (rule_holds(rule, g, tuple) != rule_holds(rule, g, moved)) {
      result.invariant = false;
      result.translation = t;
      result.tuple.assign(tuple.begin(), tuple.end());
      return false;
    }
    return true;
  };

  if (fits) {
    for (unsigned k : arities) {
      std::vector<std::uint32_t> tuple(k, 0);
      while (true) {
        const bool base = rule_holds(rule, g, tuple);
        for (std::uint64_t t = 1; t < n; ++t) {
          moved.assign(tuple.begin(), tuple.end());
          for (auto& x : moved)
            x = side == Side::Left ? g.mul(static_cast<std::uint32_t>(t), x)
                                   : g.mul(x, static_cast<std::uint32_t>(t));
          ++result.cases;
          if (rule_holds(rule, g, moved) != base) {
            result.invariant = false;
            result.translation = static_cast<std::uint32_t>(t);
            result.tuple = tuple;
            return result;
          }
        }
        std::size_t i = k;
        while (i > 0 && ++tuple[i - 1] == n) tuple[--i] = 0;
        if (i == 0) break;
      }
    }
    return result;
  }

  // Sampled: random tuples, with half of them forced onto the rule so both verdicts are exercised.
  Rng rng(opt.seed, 0x70250);
  for (std::uint64_t s = 0; s < opt.samples; ++s) {
    const unsigned k = arities[s % arities.size()];
    std::vector<std::uint32_t> tuple(k);
    for (auto& x : tuple) x = static_cast<std::uint32_t>(rng.below(n));
    if (s % 2 == 1) {
      if (rule.is_ap())
        tuple[2] = g.mul(g.mul(tuple[1], g.inv(tuple[0])), tuple[1]);
      else
        tuple[k - 1] = g.inv(product_of(g, std::span(tuple).first(k - 1)));
    }
    const auto t = static_cast<std::uint32_t>(rng.below(n));
    if (!test(tuple, t)) return result;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Residue multisets and feature predicates.

// n residues modulo n, e.g. the five pentagon directions of one attribute in a 5-card set.
struct ResidueMultiset {
  unsigned modulus = 0;
  std::vector<unsigned> values;

  static ResidueMultiset make(unsigned modulus, std::vector<unsigned> values) {
    if (modulus < 1) throw RuleError("modulus must be >= 1");
    if (values.size() != modulus) throw RuleError("multiset must hold exactly n values");
    for (auto v : values)
      if (v >= modulus) throw RuleError("value out of range");
    return {modulus, std::move(values)};
  }
};

inline bool sum_zero(const ResidueMultiset& m) {
  std::uint64_t s = 0;
  for (auto v : m.values) s += v;
  return s % m.modulus == 0;
}

// True iff some reflection v -> (k - v) mod n maps the multiset onto itself. Axes through a
// vertex and through an edge midpoint are both of this form.
inline bool pentagon_symmetry(const ResidueMultiset& m) {
  const unsigned n = m.modulus;
  std::vector<unsigned> counts(n, 0);
  for (auto v : m.values) ++counts[v];
  for (unsigned k = 0; k < n; ++k) {
    bool ok = true;
    for (unsigned v = 0; v < n && ok; ++v) ok = counts[v] == counts[(k + n - v) % n];
    if (ok) return true;
  }
  return false;
}

enum class FeatureGame { Set, Quads };

// Card-level rule for one attribute: SET wants all-same or all-different over three values;
// EvenQuads also allows two pairs over four values.
inline bool feature_predicate_set(FeatureGame game, std::span<const unsigned> values) {
  const std::size_t arity = game == FeatureGame::Set ? 3 : 4;
  const unsigned domain = game == FeatureGame::Set ? 3 : 4;
  if (values.size() != arity) throw RuleError("wrong number of feature values");
  std::vector<unsigned> counts(domain, 0);
  for (auto v : values) {
    if (v >= domain) throw RuleError("feature value out of domain");
    ++counts[v];
  }
  std::vector<unsigned> shape;
  for (auto c : counts)
    if (c) shape.push_back(c);
  std::sort(shape.begin(), shape.end());
  if (shape.size() == 1 || shape.size() == arity) return true;
  return game == FeatureGame::Quads && shape == std::vector<unsigned>{2, 2};
}

}  // namespace groupset
