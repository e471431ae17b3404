#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "groupset/analysis.hpp"
#include "groupset/group_expr.hpp"
#include "groupset/set_rules.hpp"
#include "groupset/variants.hpp"

// The machine-checked fact suite behind `groupset verify` and GET /facts. Each fact is
// recomputed from scratch; a failure is a report entry, never an exception.

namespace groupset {

struct Fact {
  std::string id;
  std::string statement;
  std::string expected;
  std::string observed;
  bool pass = false;
  double elapsed_ms = 0;
};

struct FactReport {
  std::vector<Fact> facts;
  bool all_pass() const {
    return std::all_of(facts.begin(), facts.end(), [](const Fact& f) { return f.pass; });
  }
};

struct FactOptions {
  std::uint64_t probability_trials = 1'000'000;
  std::uint64_t quad_tables = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

namespace detail {

inline std::string histogram_str(const std::map<std::uint64_t, std::uint64_t>& h) {
  std::string s = "{";
  for (const auto& [k, v] : h) s += (s.size() > 1 ? ", " : "") + std::to_string(k) + ":" + std::to_string(v);
  return s + "}";
}

// Calls f on every multiset of `size` values from [0, n), as a sorted vector.
inline void each_multiset(unsigned n, unsigned size, const std::function<void(const std::vector<unsigned>&)>& f) {
  std::vector<unsigned> v(size, 0);
  while (true) {
    f(v);
    int i = static_cast<int>(size) - 1;
    while (i >= 0 && v[i] == n - 1) --i;
    if (i < 0) return;
    ++v[i];
    for (unsigned j = i + 1; j < size; ++j) v[j] = v[i];
  }
}

}  // namespace detail

inline FactReport verify_facts(const FactOptions& opt = {}) {
  FactReport report;
  auto add = [&](std::string id, std::string statement, const std::function<std::pair<std::string, std::string>()>& run,
                 const std::function<bool(const std::string&, const std::string&)>& ok = {}) {
    Fact f;
    f.id = std::move(id);
    f.statement = std::move(statement);
    const auto start = std::chrono::steady_clock::now();
    try {
      auto [expected, observed] = run();
      f.expected = expected;
      f.observed = observed;
      f.pass = ok ? ok(expected, observed) : expected == observed;
    } catch (const std::exception& e) {
      f.observed = std::string("error: ") + e.what();
      f.pass = false;
    }
    f.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.facts.push_back(std::move(f));
  };
  auto yes = [](bool b) { return std::string(b ? "true" : "false"); };
  auto G = [](std::string_view text) { return Group(parse_group_expr(text)); };

  add("deck-sizes", "deck sizes of the ten catalog variants", [&] {
    const std::vector<std::pair<std::string, std::uint64_t>> want{
        {"classic-set", 81}, {"proset", 63}, {"evenquads", 64}, {"c53t", 125}, {"octa", 48},
        {"a5set", 60},       {"nf-s3", 5},   {"nf-s4", 23},     {"nf-s3sq", 35}, {"nf-wreath", 47}};
    std::string e, o;
    for (const auto& [id, n] : want) {
      e += id + "=" + std::to_string(n) + " ";
      o += id + "=" + std::to_string(catalog_deck(id)->size()) + " ";
    }
    return std::pair{e, o};
  });

  add("c2xs4-orders", "element orders of C2 x S4", [&] {
    return std::pair{std::string("{1:1, 2:19, 3:8, 4:12, 6:8}"), detail::histogram_str(G("C2 x S4").order_histogram())};
  });

  add("s4-order-2", "S4 has 9 elements of order 2", [&] {
    return std::pair{std::string("9"), std::to_string(G("S4").order_histogram()[2])};
  });

  add("c2xs4-completion-failure", "an ordered pair in C2 x S4 fails to complete with probability 19/48",
      [&] { return std::pair{std::string("19/48"), completion_failure_rate(G("C2 x S4")).str()}; });

  add("c2^6-ap-degenerate", "in C2^6 every ordered pair of distinct cards completes to the first card", [&] {
    Group g = G("C2^6");
    std::uint64_t degenerate = 0, pairs = 0;
    for (const auto& a : g.enumerate())
      for (const auto& b : g.enumerate())
        if (a != b) {
          ++pairs;
          degenerate += complete_ap(g, a, b).degenerate;
        }
    return std::pair{std::to_string(pairs), std::to_string(degenerate)};
  });

  add("ap-torsor", "the progression rule is left and right translation invariant on S3, C5, C2 x S4", [&] {
    std::string o;
    bool all = true;
    for (const char* text : {"S3", "C5", "C2 x S4"}) {
      Group g = G(text);
      for (Side side : {Side::Left, Side::Right}) {
        auto r = rule_is_torsor_invariant(SetRule::arithmetic_progression(), g, side);
        all = all && r.invariant && r.exhaustive;
        o += std::string(text) + (side == Side::Left ? ":left=" : ":right=") + yes(r.invariant && r.exhaustive) + " ";
      }
    }
    return std::pair{std::string("true"), yes(all) + " (" + o + ")"};
  }, [](const std::string& e, const std::string& o) { return o.rfind(e + " ", 0) == 0; });

  add("fixed-k-torsor", "k-card sum-zero rule on Cn is translation invariant iff n divides k (n 2..5, k 3..6)", [&] {
    std::string mismatches;
    for (unsigned n = 2; n <= 5; ++n)
      for (unsigned k = 3; k <= 6; ++k) {
        Group g = G("C" + std::to_string(n));
        auto r = rule_is_torsor_invariant(SetRule::product(k), g, Side::Left);
        if (!r.exhaustive || r.invariant != (k % n == 0))
          mismatches += "n=" + std::to_string(n) + ",k=" + std::to_string(k) + " ";
      }
    return std::pair{std::string("no mismatches"), mismatches.empty() ? std::string("no mismatches") : mismatches};
  });

  add("symmetry-sum-zero", "n residues mod n have a reflection symmetry iff they sum to zero, for n = 3 and 5", [&] {
    std::string o;
    for (unsigned n : {3u, 5u}) {
      std::uint64_t checked = 0, bad = 0;
      detail::each_multiset(n, n, [&](const std::vector<unsigned>& v) {
        auto m = ResidueMultiset::make(n, v);
        ++checked;
        bad += pentagon_symmetry(m) != sum_zero(m);
      });
      o += "n=" + std::to_string(n) + ":" + std::to_string(bad) + "/" + std::to_string(checked) + " ";
    }
    return std::pair{std::string("n=3:0/10 n=5:0/126 "), o};
  });

  add("symmetry-counterexamples", "the equivalence fails for n = 4 and n = 7", [&] {
    auto both = [](unsigned n, std::vector<unsigned> v) {
      auto m = ResidueMultiset::make(n, std::move(v));
      return std::string(pentagon_symmetry(m) ? "sym" : "asym") + "/" + (sum_zero(m) ? "zero" : "nonzero");
    };
    return std::pair{std::string("{0,0,3,3}:sym/nonzero {0,1,2,3}:sym/nonzero {0,0,0,0,1,2,4}:asym/zero"),
                     "{0,0,3,3}:" + both(4, {0, 0, 3, 3}) + " {0,1,2,3}:" + both(4, {0, 1, 2, 3}) +
                         " {0,0,0,0,1,2,4}:" + both(7, {0, 0, 0, 0, 1, 2, 4})};
  });

  add("c53-progression", "(0,3,4), (4,4,1), (3,0,3) is a progression with both differences (4,1,2)", [&] {
    Group g = G("C5^3");
    const auto a = g.make({0, 3, 4}), b = g.make({4, 4, 1}), c = g.make({3, 0, 3});
    const std::vector<Element> cards{a, b, c};
    const auto d1 = g.compose(b, g.inverse(a)), d2 = g.compose(c, g.inverse(b));
    std::ostringstream o;
    o << yes(is_set(SetRule::arithmetic_progression(), g, cards)) << " (" << d1.value[0] << "," << d1.value[1] << ","
      << d1.value[2] << ") (" << d2.value[0] << "," << d2.value[1] << "," << d2.value[2] << ")";
    return std::pair{std::string("true (4,1,2) (4,1,2)"), o.str()};
  });

  add("c53t-five-card-set", "(0,2,0), (1,4,2), (0,1,3), (0,2,1), (4,1,4) sum to zero in C5^3", [&] {
    Group g = G("C5^3");
    const std::vector<Element> cards{g.make({0, 2, 0}), g.make({1, 4, 2}), g.make({0, 1, 3}), g.make({0, 2, 1}),
                                     g.make({4, 1, 4})};
    return std::pair{std::string("true"), yes(is_set(SetRule::product(5), g, cards))};
  });

  add("wreath-completion", "in C2 wr S3 the card completing (a, b) is b a b, not a", [&] {
    Group w = G("C2 wr S3");
    const Element a = w.make({0, 0, 0, 2, 1, 0}), b = w.make({1, 0, 0, 0, 1, 2});
    const Element bab = w.compose(w.compose(b, a), b);
    std::string o;
    for (auto v : bab.value) o += std::to_string(v);
    return std::pair{std::string("101210 differs-from-a"), o + (bab != a ? " differs-from-a" : " equals-a")};
  });

  add("odd-n-divisibility", "0 + 1 + ... + (n-1) is divisible by n iff n is odd, n = 2..100", [&] {
    std::string bad;
    for (std::uint64_t n = 2; n <= 100; ++n)
      if (((n * (n - 1) / 2) % n == 0) != (n % 2 == 1)) bad += std::to_string(n) + " ";
    return std::pair{std::string("no exceptions"), bad.empty() ? std::string("no exceptions") : bad};
  });

  add("set-feature-rule", "all-same-or-all-different on three values iff the sum is 0 mod 3; card level on C(81,3)",
      [&] {
        std::uint64_t bad = 0, cases = 0;
        for (unsigned a = 0; a < 3; ++a)
          for (unsigned b = 0; b < 3; ++b)
            for (unsigned c = 0; c < 3; ++c) {
              const std::array<unsigned, 3> v{a, b, c};
              ++cases;
              bad += feature_predicate_set(FeatureGame::Set, v) != ((a + b + c) % 3 == 0);
            }
        auto deck = catalog_deck("classic-set");
        const auto& g = deck->group();
        std::uint64_t triples = 0;
        for (std::uint32_t a = 0; a < 81; ++a)
          for (std::uint32_t b = a + 1; b < 81; ++b)
            for (std::uint32_t c = b + 1; c < 81; ++c) {
              ++triples;
              bool feature = true;
              for (unsigned i = 0; i < 4; ++i) {
                const std::array<unsigned, 3> v{std::get<Set4Features>(deck->card(a).features).digits[i],
                                                std::get<Set4Features>(deck->card(b).features).digits[i],
                                                std::get<Set4Features>(deck->card(c).features).digits[i]};
                feature = feature && feature_predicate_set(FeatureGame::Set, v);
              }
              const std::array<std::uint32_t, 3> t{a, b, c};
              bad += feature != rule_holds(SetRule::product(3), g, t);
            }
        return std::pair{std::string("0 mismatches in 27 + 85320"),
                         std::to_string(bad) + " mismatches in " + std::to_string(cases) + " + " +
                             std::to_string(triples)};
      });

  add("quads-feature-rule", "all-same, all-different or two pairs on four values iff they XOR to 0 in C2^2", [&] {
    std::uint64_t bad = 0, cases = 0;
    for (unsigned x = 0; x < 256; ++x) {
      const std::array<unsigned, 4> v{x & 3, (x >> 2) & 3, (x >> 4) & 3, (x >> 6) & 3};
      ++cases;
      bad += feature_predicate_set(FeatureGame::Quads, v) != ((v[0] ^ v[1] ^ v[2] ^ v[3]) == 0);
    }
    return std::pair{std::string("0 mismatches in 256"),
                     std::to_string(bad) + " mismatches in " + std::to_string(cases)};
  });

  add("classic-set-12-card-probability", "a random 12-card SET table holds a set about 96.77% of the time", [&] {
    auto p = set_probability(*catalog_deck("classic-set"), 12, opt.probability_trials, opt.seed, opt.threads);
    std::ostringstream o;
    o.precision(6);
    o << std::fixed << p.estimate << " (se " << p.standard_error << ", " << p.trials << " trials, seed " << p.seed
      << ")";
    return std::pair{std::string("0.9677 +/- 0.005"), o.str()};
  }, [](const std::string&, const std::string& o) {
    const double v = std::stod(o);
    return v >= 0.9627 && v <= 0.9727;
  });

  add("proset-threshold", "seven ProSet cards always contain a set; six need not", [&] {
    auto t = guarantee_threshold(*catalog_deck("proset"), 7);
    const bool witness = t.largest_witness && t.largest_witness->size() == 6 &&
                         verify_set_free(*catalog_deck("proset"), *t.largest_witness);
    return std::pair{std::string("7 exact, verified 6-card witness"),
                     (t.threshold ? std::to_string(*t.threshold) : std::string("none")) + (t.exact ? " exact" : " inexact") +
                         (witness ? ", verified 6-card witness" : ", no witness")};
  });

  add("evenquads-nine", "nine EvenQuads cards can avoid a quad; random ten-card tables all contain one", [&] {
    auto deck = catalog_deck("evenquads");
    auto r = cap_search(*deck, 9, kDefaultCapBudget, opt.seed);
    const bool witness = r.witness && verify_set_free(*deck, *r.witness);
    auto p = set_probability(*deck, 10, opt.quad_tables, opt.seed, opt.threads);
    return std::pair{std::string("witness, " + std::to_string(opt.quad_tables) + "/" + std::to_string(opt.quad_tables) +
                                 " tables, threshold 10 not proven exactly"),
                     std::string(witness ? "witness" : "no witness") + ", " + std::to_string(p.hits) + "/" +
                         std::to_string(p.trials) + " tables, threshold 10 not proven exactly"};
  });

  return report;
}

inline nlohmann::json to_json(const FactReport& r) {
  nlohmann::json facts = nlohmann::json::array();
  std::size_t passed = 0;
  for (const auto& f : r.facts) {
    passed += f.pass;
    facts.push_back({{"id", f.id},
                     {"statement", f.statement},
                     {"expected", f.expected},
                     {"observed", f.observed},
                     {"pass", f.pass},
                     {"elapsed_ms", f.elapsed_ms}});
  }
  return {{"all_pass", r.all_pass()}, {"passed", passed}, {"total", r.facts.size()}, {"facts", facts}};
}

}  // namespace groupset
