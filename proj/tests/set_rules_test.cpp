#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <numeric>

#include "groupset/group.hpp"
#include "groupset/group_expr.hpp"
#include "groupset/set_rules.hpp"
#include "oracles.hpp"

using namespace groupset;

namespace {

Group G(const char* text) { return Group(parse_group_expr(text)); }

std::vector<Element> elems(const Group& g, std::vector<std::vector<std::uint32_t>> values) {
  std::vector<Element> out;
  for (auto& v : values) out.push_back(g.make(std::move(v)));
  return out;
}

}  // namespace

TEST(IsSet, ClassicSumToZero) {
  Group g = G("C3^4");
  EXPECT_TRUE(is_set(SetRule::product(3), g, elems(g, {{0, 0, 0, 0}, {1, 1, 1, 1}, {2, 2, 2, 2}})));
  EXPECT_FALSE(is_set(SetRule::product(3), g, elems(g, {{0, 0, 0, 0}, {1, 1, 1, 1}, {2, 2, 2, 1}})));
}

TEST(IsSet, C53tApFromLinearExample) {
  Group g = G("C5^3");
  // Both differences are (4, 1, 2).
  EXPECT_TRUE(is_set(SetRule::arithmetic_progression(), g, elems(g, {{0, 3, 4}, {4, 4, 1}, {3, 0, 3}})));
  EXPECT_FALSE(is_set(SetRule::arithmetic_progression(), g, elems(g, {{0, 3, 4}, {3, 0, 3}, {4, 4, 1}})));
}

TEST(IsSet, C53tFiveCardSet) {
  Group g = G("C5^3");
  // Per dimension: 0+1+0+0+4, 2+4+1+2+1, 0+2+3+1+4.
  auto cards = elems(g, {{0, 2, 0}, {1, 4, 2}, {0, 1, 3}, {0, 2, 1}, {4, 1, 4}});
  EXPECT_TRUE(is_set(SetRule::product(5), g, cards));
}

TEST(IsSet, C4FourCards) {
  Group g = G("C4");
  EXPECT_FALSE(is_set(SetRule::product(4), g, elems(g, {{0}, {1}, {2}, {3}})));
  // Repeated values are real cards only in a multi-attribute deck; check the sum directly.
  const std::array<std::uint32_t, 4> vals{1, 1, 3, 3};
  EXPECT_TRUE(rule_holds(SetRule::product(4), g, vals));
}

TEST(IsSet, ArityAndDuplicates) {
  Group g = G("S3");
  auto three = g.enumerate();
  EXPECT_THROW(is_set(SetRule::arithmetic_progression(), g, std::span(three).first(2)), RuleError);
  EXPECT_THROW(is_set(SetRule::product(4), g, std::span(three).first(3)), RuleError);
  EXPECT_THROW(is_set(SetRule::product_any(), g, std::span(three).first(2)), RuleError);
  std::vector<Element> dup{three[1], three[1], three[2]};
  EXPECT_THROW(is_set(SetRule::product(3), g, dup), RuleError);
  EXPECT_NO_THROW(is_set(SetRule::product_any(), g, std::span(three).first(5)));
}

TEST(IsSet, OrderMattersInNonAbelianGroups) {
  Group g = G("S3");
  // Find three distinct non-identity elements whose product is the identity in one order only.
  bool found = false;
  for (std::uint32_t a = 1; a < 6 && !found; ++a)
    for (std::uint32_t b = 1; b < 6 && !found; ++b) {
      const std::uint32_t c = g.inv(g.mul(a, b));
      if (a == b || c == a || c == b || c == 0) continue;
      const std::array<std::uint32_t, 3> abc{a, b, c};
      const std::array<std::uint32_t, 3> bac{b, a, c};
      if (rule_holds(SetRule::product(3), g, abc) && !rule_holds(SetRule::product(3), g, bac)) found = true;
    }
  EXPECT_TRUE(found);
  EXPECT_TRUE(SetRule::product(3).ordered(g));
  EXPECT_FALSE(SetRule::product(3).ordered(G("C3^4")));
  EXPECT_TRUE(SetRule::arithmetic_progression().ordered(G("C5^3")));
}

TEST(CompleteAp, Examples) {
  Group c3 = G("C3");
  auto r = complete_ap(c3, c3.element_at(0), c3.element_at(1));
  EXPECT_EQ(r.card, c3.element_at(2));
  EXPECT_FALSE(r.degenerate);

  Group w = G("C2 wr S3");
  const Element a = w.make({0, 0, 0, 2, 1, 0});
  const Element b = w.make({1, 0, 0, 0, 1, 2});
  auto fig = complete_ap(w, a, b);
  EXPECT_EQ(fig.card.value, (std::vector<std::uint32_t>{1, 0, 1, 2, 1, 0}));
  EXPECT_FALSE(fig.degenerate);

  EXPECT_THROW(complete_ap(c3, c3.identity(), c3.identity()), RuleError);
}

TEST(CompleteAp, C2PowerIsAlwaysDegenerate) {
  Group g = G("C2^6");
  for (std::uint32_t a = 0; a < 64; ++a)
    for (std::uint32_t b = 0; b < 64; ++b) {
      if (a == b) continue;
      auto r = complete_ap(g, g.element_at(a), g.element_at(b));
      ASSERT_TRUE(r.degenerate);
      ASSERT_EQ(r.card.index, a);
    }
}

TEST(CompleteAp, DegenerateIffDifferenceHasOrderTwo) {
  Group g = G("C2 x S4");
  const auto n = static_cast<std::uint32_t>(g.order());
  std::uint64_t degenerate = 0, pairs = 0;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      if (a == b) continue;
      auto r = complete_ap(g, g.element_at(a), g.element_at(b));
      const bool involution = oracle::order_by_powers(g, g.element_at(g.mul(b, g.inv(a)))) == 2;
      ASSERT_EQ(r.degenerate, involution);
      // The completion really is an AP.
      ASSERT_TRUE(is_ap_indices(g, a, b, static_cast<std::uint32_t>(r.card.index)));
      degenerate += r.degenerate;
      ++pairs;
    }
  const Fraction rate = ap_degeneracy_rate(g);
  EXPECT_EQ(degenerate * rate.denominator, pairs * rate.numerator);
  EXPECT_EQ(rate, (Fraction{19, 47}));
}

TEST(CompleteProduct, Examples) {
  Group g = G("C3^4");
  auto r = complete_product(g, 3, elems(g, {{1, 1, 1, 1}, {2, 2, 2, 2}}), 2);
  EXPECT_EQ(r.card.value, (std::vector<std::uint32_t>{0, 0, 0, 0}));
  EXPECT_FALSE(r.degenerate);

  Group c5 = G("C5");
  auto five = complete_product(c5, 5, elems(c5, {{0}, {0}, {0}, {2}}), 4);
  EXPECT_EQ(five.card.value, (std::vector<std::uint32_t>{3}));

  Group s3 = G("S3");
  auto inv = complete_product(s3, 3, elems(s3, {{1, 0, 2}, {1, 0, 2}}), 2);
  EXPECT_EQ(inv.card, s3.identity());
}

TEST(CompleteProduct, EveryPositionSolvesTheProduct) {
  Group g = G("S4");
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const unsigned k = 3 + static_cast<unsigned>(rng.below(3));
    std::vector<Element> given;
    for (unsigned i = 0; i + 1 < k; ++i) given.push_back(g.element_at(rng.below(24)));
    const auto pos = static_cast<std::size_t>(rng.below(k));
    auto r = complete_product(g, k, given, pos);
    std::vector<std::uint32_t> full;
    for (const auto& e : given) full.push_back(static_cast<std::uint32_t>(e.index));
    full.insert(full.begin() + static_cast<std::ptrdiff_t>(pos), static_cast<std::uint32_t>(r.card.index));
    ASSERT_EQ(oracle::product(g, full), 0u);
  }
}

TEST(FailureRate, Values) {
  EXPECT_EQ(completion_failure_rate(G("C2 x S4")), (Fraction{19, 48}));
  EXPECT_EQ(completion_failure_rate(G("C3^4")), (Fraction{0, 81}));
  EXPECT_EQ(completion_failure_rate(G("C2^6")), (Fraction{63, 64}));
  EXPECT_EQ(completion_failure_rate(G("C2 x S4")).str(), "19/48");
}

TEST(Torsor, PinnedExamples) {
  for (Side side : {Side::Left, Side::Right}) {
    auto ap = rule_is_torsor_invariant(SetRule::arithmetic_progression(), G("S3"), side);
    EXPECT_TRUE(ap.invariant);
    EXPECT_TRUE(ap.exhaustive);
  }
  auto k4 = rule_is_torsor_invariant(SetRule::product(4), G("C5"), Side::Left);
  ASSERT_FALSE(k4.invariant);
  ASSERT_TRUE(k4.translation.has_value());
  // The reported witness really flips the verdict.
  Group c5 = G("C5");
  std::vector<std::uint32_t> moved = k4.tuple;
  for (auto& x : moved) x = c5.mul(*k4.translation, x);
  EXPECT_NE(rule_holds(SetRule::product(4), c5, k4.tuple), rule_holds(SetRule::product(4), c5, moved));

  EXPECT_TRUE(rule_is_torsor_invariant(SetRule::product(5), G("C5"), Side::Left).invariant);
  EXPECT_TRUE(rule_is_torsor_invariant(SetRule::product(3), G("C3"), Side::Left).invariant);
}

TEST(Torsor, LargeGroupsAreSampled) {
  auto r = rule_is_torsor_invariant(SetRule::product(3), G("C3^4"), Side::Right);
  EXPECT_TRUE(r.invariant);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_EQ(r.cases, 100'000u);
  auto bad = rule_is_torsor_invariant(SetRule::product(3), G("C2 x S4"), Side::Left);
  EXPECT_FALSE(bad.invariant);
}

TEST(Torsor, SumRuleInvariantIffModulusDividesK) {
  for (unsigned n : {2u, 3u, 4u, 5u})
    for (unsigned k : {3u, 4u, 5u, 6u}) {
      Group g(GroupSpec::cyclic(n));
      auto r = rule_is_torsor_invariant(SetRule::product(k), g, Side::Left);
      EXPECT_TRUE(r.exhaustive);
      EXPECT_EQ(r.invariant, k % n == 0) << "n=" << n << " k=" << k;
    }
}

TEST(Torsor, ApTranslationExhaustive) {
  for (const char* text : {"S3", "C5", "C2 x S4"}) {
    Group g = G(text);
    const auto n = static_cast<std::uint32_t>(g.order());
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b) {
        // Every c, not only the completion, so both verdicts are covered.
        for (std::uint32_t c = 0; c < n; ++c) {
          const bool base = is_ap_indices(g, a, b, c);
          for (std::uint32_t t = 0; t < n; ++t) {
            ASSERT_EQ(base, is_ap_indices(g, g.mul(t, a), g.mul(t, b), g.mul(t, c)));
            ASSERT_EQ(base, is_ap_indices(g, g.mul(a, t), g.mul(b, t), g.mul(c, t)));
          }
        }
        const std::uint32_t c = g.mul(g.mul(b, g.inv(a)), b);
        for (std::uint32_t t = 0; t < n; ++t) {
          ASSERT_TRUE(is_ap_indices(g, g.mul(t, a), g.mul(t, b), g.mul(t, c)));
          ASSERT_TRUE(is_ap_indices(g, g.mul(a, t), g.mul(b, t), g.mul(c, t)));
        }
      }
  }
}

TEST(AbelianOrderIndependence, ProductRuleExhaustive) {
  for (const char* text : {"C3^2", "C2^3", "C5", "C2 x C4"}) {
    Group g = G(text);
    const auto n = static_cast<std::uint32_t>(g.order());
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        for (std::uint32_t c = 0; c < n; ++c) {
          std::array<std::uint32_t, 3> t{a, b, c};
          const bool base = rule_holds(SetRule::product(3), g, t);
          std::sort(t.begin(), t.end());
          do {
            ASSERT_EQ(rule_holds(SetRule::product(3), g, t), base);
          } while (std::next_permutation(t.begin(), t.end()));
        }
  }
}

TEST(ApOrderThree, AnyOrderIsASet) {
  Group g = G("C2 x S4");
  const auto n = static_cast<std::uint32_t>(g.order());
  int checked = 0;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      if (a == b || g.order_of_index(g.mul(b, g.inv(a))) != 3) continue;
      const std::uint32_t c = g.mul(g.mul(b, g.inv(a)), b);
      std::array<std::uint32_t, 3> t{a, b, c};
      std::sort(t.begin(), t.end());
      do {
        ASSERT_TRUE(is_ap_indices(g, t[0], t[1], t[2]));
      } while (std::next_permutation(t.begin(), t.end()));
      ++checked;
    }
  EXPECT_EQ(checked, 48 * 8);
}

TEST(Multiset, PinnedExamples) {
  EXPECT_TRUE(pentagon_symmetry(ResidueMultiset::make(5, {3, 2, 1, 2, 2})));
  EXPECT_FALSE(pentagon_symmetry(ResidueMultiset::make(7, {0, 0, 0, 0, 1, 2, 4})));
  const auto m4 = ResidueMultiset::make(4, {0, 0, 3, 3});
  EXPECT_TRUE(pentagon_symmetry(m4));
  EXPECT_FALSE(sum_zero(m4));

  EXPECT_TRUE(sum_zero(ResidueMultiset::make(5, {0, 1, 2, 3, 4})));
  EXPECT_TRUE(sum_zero(ResidueMultiset::make(5, {1, 1, 1, 3, 4})));
  EXPECT_FALSE(sum_zero(ResidueMultiset::make(4, {1, 1, 2, 2})));
  EXPECT_TRUE(sum_zero(ResidueMultiset::make(4, {1, 1, 3, 3})));
  EXPECT_FALSE(sum_zero(ResidueMultiset::make(4, {0, 1, 2, 3})));

  EXPECT_THROW(ResidueMultiset::make(5, {0, 1}), RuleError);
  EXPECT_THROW(ResidueMultiset::make(3, {0, 1, 3}), RuleError);
}

namespace {

// Every multiset of n values in [0,n), as nondecreasing sequences.
template <class F>
void for_each_multiset(unsigned n, F&& f) {
  std::vector<unsigned> v(n, 0);
  while (true) {
    f(v);
    int i = static_cast<int>(n) - 1;
    while (i >= 0 && v[i] == n - 1) --i;
    if (i < 0) return;
    ++v[i];
    for (unsigned j = static_cast<unsigned>(i) + 1; j < n; ++j) v[j] = v[i];
  }
}

}  // namespace

TEST(Multiset, SymmetryEqualsSumZeroExactlyForThreeAndFive) {
  for (unsigned n : {3u, 5u})
    for_each_multiset(n, [&](const std::vector<unsigned>& v) {
      auto m = ResidueMultiset::make(n, v);
      ASSERT_EQ(pentagon_symmetry(m), sum_zero(m)) << "n=" << n;
    });
  for (unsigned n : {4u, 7u}) {
    bool differ = false;
    for_each_multiset(n, [&](const std::vector<unsigned>& v) {
      auto m = ResidueMultiset::make(n, v);
      if (pentagon_symmetry(m) != sum_zero(m)) differ = true;
    });
    EXPECT_TRUE(differ) << "n=" << n;
  }
}

TEST(Multiset, SumOfAllResiduesVanishesIffOdd) {
  for (unsigned n = 2; n <= 100; ++n) {
    std::vector<unsigned> v(n);
    std::iota(v.begin(), v.end(), 0u);
    EXPECT_EQ(sum_zero(ResidueMultiset::make(n, v)), n % 2 == 1) << n;
  }
}

TEST(FeaturePredicate, Examples) {
  const std::array<unsigned, 3> shapes{0, 1, 2};
  EXPECT_TRUE(feature_predicate_set(FeatureGame::Set, shapes));
  const std::array<unsigned, 4> pairs{2, 2, 3, 3};
  EXPECT_TRUE(feature_predicate_set(FeatureGame::Quads, pairs));
  const std::array<unsigned, 4> three_one{2, 2, 2, 3};
  EXPECT_FALSE(feature_predicate_set(FeatureGame::Quads, three_one));
  const std::array<unsigned, 2> short_set{0, 1};
  EXPECT_THROW(feature_predicate_set(FeatureGame::Set, short_set), RuleError);
  const std::array<unsigned, 3> out_of_domain{0, 1, 3};
  EXPECT_THROW(feature_predicate_set(FeatureGame::Set, out_of_domain), RuleError);
}

TEST(FeaturePredicate, SetMatchesSumZeroOverZ3) {
  for (unsigned a = 0; a < 3; ++a)
    for (unsigned b = 0; b < 3; ++b)
      for (unsigned c = 0; c < 3; ++c) {
        const std::array<unsigned, 3> v{a, b, c};
        EXPECT_EQ(feature_predicate_set(FeatureGame::Set, v), (a + b + c) % 3 == 0);
      }
}

TEST(FeaturePredicate, QuadsMatchesXorOverC2Squared) {
  // Values {neither, one, the other, both} map to 0, 1, 2, 3 as two bits.
  for (unsigned x = 0; x < 256; ++x) {
    const std::array<unsigned, 4> v{x & 3, x >> 2 & 3, x >> 4 & 3, x >> 6 & 3};
    EXPECT_EQ(feature_predicate_set(FeatureGame::Quads, v), (v[0] ^ v[1] ^ v[2] ^ v[3]) == 0);
  }
}
