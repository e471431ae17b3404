#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "groupset/errors.hpp"
#include "groupset/gf2.hpp"
#include "groupset/group.hpp"
#include "groupset/random.hpp"
#include "groupset/set_rules.hpp"
#include "groupset/variants.hpp"

namespace groupset {

struct TableAnalysis {
  std::vector<std::uint32_t> table;
  // One entry per unordered set, as card ids in an order that satisfies the rule.
  std::vector<std::vector<std::uint32_t>> sets_found;
  // False when some candidate subsets were only sampled (large non-abelian "any size" tables).
  bool exhaustive = true;
  std::chrono::nanoseconds elapsed{0};
};

inline constexpr std::size_t kAnyRuleTableLimit = 25;

namespace detail {

// C2^d in any arrangement of products and powers.
inline bool is_elementary_abelian_2(const GroupSpec& s) {
  using K = GroupSpec::Kind;
  switch (s.kind) {
    case K::Cyclic:
      return s.param == 2;
    case K::DirectProduct:
    case K::Power:
      for (const auto& c : s.children)
        if (!is_elementary_abelian_2(c)) return false;
      return true;
    default:
      return false;
  }
}

// Cards removed from consideration after this many orderings of one large subset.
inline constexpr unsigned kRandomOrderings = 1000;
// Largest subset whose orderings are all tried in the fallback scan.
inline constexpr std::size_t kFullOrderingLimit = 6;
// Total multiplications spent on random orderings per fallback scan.
inline constexpr std::uint64_t kSampledOrderingWork = 20'000'000;

}  // namespace detail

// Set enumeration over tables of one deck. Keeps scratch buffers between calls, so one
// finder per thread; the deck itself is shared read-only.
class SetFinder {
 public:
  explicit SetFinder(const Deck& deck)
      : deck_(deck), g_(deck.group()), rule_(deck.variant().rule), pos_(static_cast<std::size_t>(g_.order()), -1) {
    bits_ = detail::is_elementary_abelian_2(g_.spec()) && g_.width() <= 64;
    if (bits_) {
      masks_.resize(static_cast<std::size_t>(g_.order()));
      for (std::uint64_t i = 0; i < g_.order(); ++i) {
        const Element el = g_.element_at(i);
        std::uint64_t m = 0;
        for (std::size_t b = 0; b < el.value.size(); ++b)
          if (el.value[b]) m |= std::uint64_t{1} << b;
        masks_[static_cast<std::size_t>(i)] = m;
      }
    }
  }

  const Deck& deck() const noexcept { return deck_; }

  // Whether the table holds at least one set. Card ids are trusted (no validation).
  bool has_set(std::span<const std::uint32_t> table) {
    // Any-size rule over C2^d: a set exists iff the cards are linearly dependent. Distinct
    // non-zero vectors cannot depend in fewer than three, so the identity card is excluded.
    if (rule_.is_any() && bits_ && table.size() <= 64) {
      std::uint64_t rows[64];
      bool identity = false;
      for (std::size_t i = 0; i < table.size(); ++i) {
        rows[i] = masks_[deck_.element_index(table[i])];
        identity = identity || rows[i] == 0;
      }
      if (!identity) return gf2::dependent(std::span<const std::uint64_t>(rows, table.size()));
    }
    bool found = false;
    bool exhaustive = true;
    scan(table, exhaustive, [&](std::span<const std::uint32_t>) {
      found = true;
      return false;
    });
    return found;
  }

  // The first set in scan order, as card ids in a valid order. Card ids are trusted.
  std::optional<std::vector<std::uint32_t>> first_set(std::span<const std::uint32_t> table) {
    std::optional<std::vector<std::uint32_t>> out;
    bool exhaustive = true;
    scan(table, exhaustive, [&](std::span<const std::uint32_t> positions) {
      std::vector<std::uint32_t> ids;
      for (auto p : positions) ids.push_back(table[p]);
      out = std::move(ids);
      return false;
    });
    return out;
  }

  // All sets on the table. Throws NotFound / RuleError / InvalidArgument on bad tables.
  TableAnalysis find_sets(std::span<const std::uint32_t> table) {
    validate(table);
    const auto start = std::chrono::steady_clock::now();
    TableAnalysis out;
    out.table.assign(table.begin(), table.end());
    std::set<std::vector<std::uint32_t>> seen;
    scan(table, out.exhaustive, [&](std::span<const std::uint32_t> positions) {
      std::vector<std::uint32_t> key(positions.begin(), positions.end());
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) {
        std::vector<std::uint32_t> ids;
        ids.reserve(positions.size());
        for (auto p : positions) ids.push_back(table[p]);
        out.sets_found.push_back(std::move(ids));
      }
      return true;
    });
    out.elapsed = std::chrono::steady_clock::now() - start;
    return out;
  }

  void validate(std::span<const std::uint32_t> table) const {
    std::vector<std::uint32_t> sorted(table.begin(), table.end());
    for (auto id : sorted)
      if (!deck_.has_card(id)) throw NotFound("card " + std::to_string(id) + " is not in the deck");
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw RuleError("table lists a card more than once");
    if (rule_.is_any() && table.size() > kAnyRuleTableLimit)
      throw InvalidArgument("tables for the any-size rule are limited to " + std::to_string(kAnyRuleTableLimit) +
                            " cards");
  }

 private:
  // Calls visit(positions) for each set found (positions index into `table`, in a valid
  // order). visit returns false to stop. Sets may be visited more than once.
  void scan(std::span<const std::uint32_t> table, bool& exhaustive,
            const std::function<bool(std::span<const std::uint32_t>)>& visit) {
    const std::size_t t = table.size();
    elems_.resize(t);
    for (std::size_t i = 0; i < t; ++i) {
      elems_[i] = deck_.element_index(table[i]);
      pos_[elems_[i]] = static_cast<std::int32_t>(i);
    }
    struct Reset {
      SetFinder& f;
      ~Reset() {
        for (auto e : f.elems_) f.pos_[e] = -1;
      }
    } reset{*this};

    if (t < rule_.min_arity()) return;
    if (rule_.is_ap())
      scan_ap(visit);
    else if (!rule_.is_any() && g_.is_abelian())
      scan_fixed_abelian(visit);
    else if (!rule_.is_any())
      scan_fixed_ordered(visit);
    else if (g_.is_abelian())
      scan_any_abelian(visit);
    else
      scan_any_ordered(visit, exhaustive);
  }

  using Visit = std::function<bool(std::span<const std::uint32_t>)>;

  void scan_ap(const Visit& visit) {
    const auto t = static_cast<std::uint32_t>(elems_.size());
    for (std::uint32_t i = 0; i < t; ++i) {
      const std::uint32_t ai = g_.inv(elems_[i]);
      for (std::uint32_t j = 0; j < t; ++j) {
        if (i == j) continue;
        const std::uint32_t c = g_.mul(g_.mul(elems_[j], ai), elems_[j]);
        const std::int32_t k = pos_[c];
        if (k < 0 || static_cast<std::uint32_t>(k) == i) continue;
        const std::uint32_t tuple[3] = {i, j, static_cast<std::uint32_t>(k)};
        if (!visit(tuple)) return;
      }
    }
  }

  // Choose k-1 cards in increasing position; the completion must sit at a later position.
  void scan_fixed_abelian(const Visit& visit) {
    const unsigned k = rule_.fixed_size;
    std::vector<std::uint32_t> chosen;
    chosen.reserve(k);
    bool stop = false;
    std::function<void(std::uint32_t, std::uint32_t)> rec = [&](std::uint32_t from, std::uint32_t prod) {
      if (chosen.size() + 1 == k) {
        const std::int32_t c = pos_[g_.inv(prod)];
        if (c >= 0 && (chosen.empty() || static_cast<std::uint32_t>(c) > chosen.back())) {
          chosen.push_back(static_cast<std::uint32_t>(c));
          if (!visit(chosen)) stop = true;
          chosen.pop_back();
        }
        return;
      }
      for (std::uint32_t i = from; i < elems_.size() && !stop; ++i) {
        chosen.push_back(i);
        rec(i + 1, g_.mul(prod, elems_[i]));
        chosen.pop_back();
      }
    };
    rec(0, 0);
  }

  // Returns true (and leaves the order in `perm`) if some ordering of the positions in
  // `perm` multiplies to the identity. The first card stays fixed: rotations of a solution
  // are solutions too.
  bool some_ordering_works(std::vector<std::uint32_t>& perm) const {
    std::sort(perm.begin() + 1, perm.end());
    do {
      std::uint32_t acc = 0;
      for (auto p : perm) acc = g_.mul(acc, elems_[p]);
      if (acc == 0) return true;
    } while (std::next_permutation(perm.begin() + 1, perm.end()));
    return false;
  }

  void scan_fixed_ordered(const Visit& visit) {
    const unsigned k = rule_.fixed_size;
    std::vector<std::uint32_t> chosen;
    bool stop = false;
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t from) {
      if (chosen.size() == k) {
        std::vector<std::uint32_t> perm = chosen;
        if (some_ordering_works(perm) && !visit(perm)) stop = true;
        return;
      }
      for (std::uint32_t i = from; i < elems_.size() && !stop; ++i) {
        chosen.push_back(i);
        rec(i + 1);
        chosen.pop_back();
      }
    };
    rec(0);
  }

  void scan_any_abelian(const Visit& visit) {
    std::vector<std::uint32_t> chosen;
    bool stop = false;
    std::function<void(std::uint32_t, std::uint32_t)> rec = [&](std::uint32_t from, std::uint32_t prod) {
      for (std::uint32_t i = from; i < elems_.size() && !stop; ++i) {
        chosen.push_back(i);
        const std::uint32_t p = g_.mul(prod, elems_[i]);
        if (p == 0 && chosen.size() >= SetRule::kAnyMinimum && !visit(chosen)) stop = true;
        if (!stop) rec(i + 1, p);
        chosen.pop_back();
      }
    };
    rec(0, 0);
  }

  // Non-abelian, any size: for every subset, the set of products over all its orderings,
  // built up one card at a time. Falls back to trying orderings when the table is too wide.
  void scan_any_ordered(const Visit& visit, bool& exhaustive) {
    const std::size_t t = elems_.size();
    const std::uint64_t n = g_.order();
    const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
    const std::uint64_t masks = std::uint64_t{1} << t;
    if (masks * words <= (std::uint64_t{1} << 23) && masks * t * n <= 200'000'000ull) {
      scan_any_dp(visit, words);
      return;
    }
    std::vector<std::uint32_t> chosen;
    bool stop = false;
    // Multiplications allowed for the random orderings of large subsets, over the whole table.
    std::uint64_t work = detail::kSampledOrderingWork;
    std::function<void(std::uint32_t)> rec = [&](std::uint32_t from) {
      for (std::uint32_t i = from; i < t && !stop; ++i) {
        chosen.push_back(i);
        if (chosen.size() > detail::kFullOrderingLimit && work == 0) {
          exhaustive = false;
        } else if (chosen.size() >= SetRule::kAnyMinimum) {
          std::vector<std::uint32_t> perm = chosen;
          bool ok = false;
          if (perm.size() <= detail::kFullOrderingLimit) {
            ok = some_ordering_works(perm);
          } else {
            std::uint64_t key = 0;
            for (auto p : chosen) key |= std::uint64_t{1} << p;
            Rng rng(key, 0x0DE5);
            for (unsigned tries = 0; tries < detail::kRandomOrderings && !ok && work > 0; ++tries) {
              rng.shuffle(std::span(perm));
              std::uint32_t acc = 0;
              for (auto p : perm) acc = g_.mul(acc, elems_[p]);
              ok = acc == 0;
              work -= std::min<std::uint64_t>(work, perm.size());
            }
            if (!ok) exhaustive = false;
          }
          if (ok && !visit(perm)) stop = true;
        }
        if (!stop) rec(i + 1);
        chosen.pop_back();
      }
    };
    rec(0);
  }

  void scan_any_dp(const Visit& visit, std::size_t words) {
    const std::size_t t = elems_.size();
    const std::size_t masks = std::size_t{1} << t;
    const auto n = static_cast<std::uint32_t>(g_.order());
    std::vector<std::uint64_t> reach(masks * words, 0);
    auto row = [&](std::size_t m) { return reach.data() + m * words; };
    row(0)[0] = 1;  // empty product = identity (index 0)
    for (std::size_t m = 0; m < masks; ++m) {
      const std::uint64_t* src = row(m);
      for (std::size_t x = 0; x < t; ++x) {
        if (m >> x & 1) continue;
        std::uint64_t* dst = row(m | (std::size_t{1} << x));
        for (std::uint32_t p = 0; p < n; ++p)
          if (src[p / 64] >> (p % 64) & 1) {
            const std::uint32_t q = g_.mul(p, elems_[x]);
            dst[q / 64] |= std::uint64_t{1} << (q % 64);
          }
      }
    }
    auto contains = [&](std::size_t m, std::uint32_t e) { return (row(m)[e / 64] >> (e % 64)) & 1; };
    for (std::size_t m = 0; m < masks; ++m) {
      if (static_cast<unsigned>(std::popcount(m)) < SetRule::kAnyMinimum || !contains(m, 0)) continue;
      // Peel cards off the end: the product so far must be reachable by the remaining cards.
      std::vector<std::uint32_t> order;
      std::size_t rest = m;
      std::uint32_t target = 0;
      while (rest) {
        for (std::size_t x = 0; x < t; ++x) {
          if (!(rest >> x & 1)) continue;
          const std::uint32_t before = g_.mul(target, g_.inv(elems_[x]));
          const std::size_t smaller = rest & ~(std::size_t{1} << x);
          if (contains(smaller, before)) {
            order.push_back(static_cast<std::uint32_t>(x));
            rest = smaller;
            target = before;
            break;
          }
        }
      }
      std::reverse(order.begin(), order.end());
      if (!visit(order)) return;
    }
  }

  const Deck& deck_;
  const Group& g_;
  SetRule rule_;
  bool bits_ = false;
  std::vector<std::uint64_t> masks_;
  std::vector<std::int32_t> pos_;
  std::vector<std::uint32_t> elems_;
};

inline TableAnalysis find_sets(const Deck& deck, std::span<const std::uint32_t> table) {
  SetFinder f(deck);
  return f.find_sets(table);
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct ProbabilityEstimate {
  std::string variant;
  std::uint64_t table_size = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0;
  double standard_error = 0;
  std::uint64_t seed = 0;
};

// Probability that a uniformly random table of `table_size` cards holds a set.
// Trial i draws its table with Rng(seed, i), so results do not depend on `threads`.
inline ProbabilityEstimate set_probability(const Deck& deck, std::uint64_t table_size, std::uint64_t trials,
                                           std::uint64_t seed, unsigned threads = 0) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (table_size > deck.size()) throw InvalidArgument("table size exceeds deck size");
  if (deck.variant().rule.is_any() && table_size > kAnyRuleTableLimit && !detail::is_elementary_abelian_2(deck.group().spec()))
    throw InvalidArgument("table too large for the any-size rule");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    SetFinder finder(deck);
    std::vector<std::uint32_t> ids(deck.size());
    std::uint64_t hits = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      std::iota(ids.begin(), ids.end(), 0u);
      Rng rng(seed, i);
      rng.partial_shuffle(std::span(ids), static_cast<std::size_t>(table_size));
      if (finder.has_set(std::span(ids).first(static_cast<std::size_t>(table_size)))) ++hits;
    }
    return hits;
  };

  std::vector<std::uint64_t> partial(threads, 0);
  if (threads == 1) {
    partial[0] = run(0, trials);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t b = trials * w / threads, e = trials * (w + 1) / threads;
      pool.emplace_back([&, w, b, e] { partial[w] = run(b, e); });
    }
    for (auto& th : pool) th.join();
  }

  ProbabilityEstimate p;
  p.variant = deck.variant().id;
  p.table_size = table_size;
  p.trials = trials;
  p.hits = std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
  p.seed = seed;
  p.estimate = static_cast<double>(p.hits) / static_cast<double>(trials);
  p.standard_error = std::sqrt(p.estimate * (1 - p.estimate) / static_cast<double>(trials));
  return p;
}

// ---------------------------------------------------------------------------
// Set-free tables

// Whether translating every card by one group element maps sets to sets, proven rather
// than sampled. Abelian product rules: the product shifts by g^k, so the rule is invariant
// iff every element's order divides k. AP rule: (gb)(ga)^-1(gb) = g(ba^-1 b) and the right
// analogue hold in any group.
inline bool translation_invariant(const SetRule& rule, const Group& g) {
  if (rule.is_ap()) return true;
  if (rule.is_any()) return false;
  if (g.is_abelian()) {
    for (std::uint64_t i = 0; i < g.order(); ++i)
      if (rule.fixed_size % g.order_of_index(i) != 0) return false;
    return true;
  }
  const auto left = rule_is_torsor_invariant(rule, g, Side::Left);
  return left.exhaustive && left.invariant;
}

// Grows a set-free table one card at a time, answering "would this card complete a set
// with the cards already chosen?" incrementally. Works in element indices.
class SetFreeBuilder {
 public:
  explicit SetFreeBuilder(const Deck& deck)
      : deck_(deck), g_(deck.group()), rule_(deck.variant().rule), finder_(deck) {
    const auto n = static_cast<std::size_t>(g_.order());
    if (rule_.is_ap()) {
      mode_ = Mode::Ap;
    } else if (!rule_.is_any() && g_.is_abelian()) {
      mode_ = Mode::FixedAbelian;
      forbidden_.assign(n, 0);
    } else if (rule_.is_any() && g_.is_abelian()) {
      mode_ = Mode::AnyAbelian;
      words_ = (n + 63) / 64;
      p1_.assign(words_, 0);
      p2_.assign(words_, 0);
    } else if (rule_.is_any()) {
      mode_ = Mode::AnyOrdered;
      words_ = (n + 63) / 64;
      p2_.assign(words_, 0);
      reach_.assign(words_, 0);
      reach_[0] = 1;  // the empty product
      while (max_levels_ < kAnyRuleTableLimit && (std::size_t{2} << max_levels_) * words_ <= (std::size_t{1} << 22))
        ++max_levels_;
    } else {
      mode_ = Mode::Generic;
    }
  }

  const std::vector<std::uint32_t>& chosen() const noexcept { return chosen_; }

  bool creates_set(std::uint32_t x) const {
    switch (mode_) {
      case Mode::FixedAbelian:
        return forbidden_[x] > 0;
      case Mode::AnyAbelian: {
        const std::uint32_t need = g_.inv(x);
        return (p2_[top() + need / 64] >> (need % 64)) & 1;
      }
      case Mode::AnyOrdered: {
        // Products equal to the identity stay so under rotation, so x completes a set
        // iff x^-1 is an ordered product of at least two chosen cards.
        if (chosen_.size() > max_levels_) return generic_creates_set(x);
        const std::uint32_t need = g_.inv(x);
        return (p2_[top() + need / 64] >> (need % 64)) & 1;
      }
      case Mode::Ap: {
        const std::size_t m = chosen_.size();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const auto a = chosen_[i], b = chosen_[j];
            if (is_ap_indices(g_, a, b, x) || is_ap_indices(g_, a, x, b) || is_ap_indices(g_, x, a, b)) return true;
          }
        return false;
      }
      case Mode::Generic:
        return generic_creates_set(x);
    }
    return false;
  }

  void push(std::uint32_t x) {
    switch (mode_) {
      case Mode::FixedAbelian: {
        // Every (k-2)-subset S of the chosen cards plus x leaves one completion.
        std::vector<std::uint32_t> touched;
        const unsigned need = rule_.fixed_size - 2;
        std::function<void(std::size_t, unsigned, std::uint32_t)> rec = [&](std::size_t from, unsigned left,
                                                                            std::uint32_t prod) {
          if (left == 0) {
            const std::uint32_t c = g_.inv(g_.mul(prod, x));
            ++forbidden_[c];
            touched.push_back(c);
            return;
          }
          for (std::size_t i = from; i + left <= chosen_.size(); ++i) rec(i + 1, left - 1, g_.mul(prod, chosen_[i]));
        };
        rec(0, need, 0);
        touched_.push_back(std::move(touched));
        break;
      }
      case Mode::AnyAbelian: {
        // Level d holds the products of the non-empty (p1) and size >= 2 (p2) subsets.
        const std::size_t from = top(), to = from + words_;
        p1_.resize(to + words_);
        p2_.resize(to + words_);
        std::copy_n(p1_.begin() + static_cast<std::ptrdiff_t>(from), words_, p1_.begin() + static_cast<std::ptrdiff_t>(to));
        std::copy_n(p2_.begin() + static_cast<std::ptrdiff_t>(from), words_, p2_.begin() + static_cast<std::ptrdiff_t>(to));
        for (std::size_t w = 0; w < words_; ++w)
          for (std::uint64_t bits = p1_[from + w]; bits; bits &= bits - 1) {
            const auto p = static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
            const std::uint32_t q = g_.mul(p, x);
            p1_[to + q / 64] |= std::uint64_t{1} << (q % 64);
            p2_[to + q / 64] |= std::uint64_t{1} << (q % 64);
          }
        p1_[to + x / 64] |= std::uint64_t{1} << (x % 64);
        break;
      }
      case Mode::AnyOrdered: {
        const std::size_t m = chosen_.size();
        if (m >= max_levels_) break;
        // reach_ row T (a mask over chosen positions) holds every ordered product of the
        // cards in T. New rows contain x; R(T) = union over y in T of R(T - y) * y, and
        // T - y is always an earlier row.
        const std::size_t old_rows = std::size_t{1} << m;
        reach_.resize(2 * old_rows * words_, 0);
        const std::size_t from = top(), to = from + words_;
        p2_.resize(to + words_);
        std::copy_n(p2_.begin() + static_cast<std::ptrdiff_t>(from), words_, p2_.begin() + static_cast<std::ptrdiff_t>(to));
        for (std::size_t t = old_rows; t < 2 * old_rows; ++t) {
          std::uint64_t* dst = reach_.data() + t * words_;
          for (std::size_t rest = t; rest; rest &= rest - 1) {
            const auto y = static_cast<std::size_t>(std::countr_zero(rest));
            const std::uint32_t ey = y == m ? x : chosen_[y];
            const std::uint64_t* src = reach_.data() + (t & ~(std::size_t{1} << y)) * words_;
            for (std::size_t w = 0; w < words_; ++w)
              for (std::uint64_t bits = src[w]; bits; bits &= bits - 1) {
                const auto p = static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                const std::uint32_t q = g_.mul(p, ey);
                dst[q / 64] |= std::uint64_t{1} << (q % 64);
              }
          }
          if (std::popcount(t) >= 2)
            for (std::size_t w = 0; w < words_; ++w) p2_[to + w] |= dst[w];
        }
        break;
      }
      default:
        break;
    }
    chosen_.push_back(x);
  }

  void pop() {
    switch (mode_) {
      case Mode::FixedAbelian:
        for (auto c : touched_.back()) --forbidden_[c];
        touched_.pop_back();
        break;
      case Mode::AnyAbelian: {
        const std::size_t level = top();
        p1_.resize(level);
        p2_.resize(level);
        break;
      }
      case Mode::AnyOrdered:
        if (chosen_.size() <= max_levels_) {
          p2_.resize(top());
          reach_.resize((std::size_t{1} << (chosen_.size() - 1)) * words_);
        }
        break;
      default:
        break;
    }
    chosen_.pop_back();
  }

  void clear() {
    while (!chosen_.empty()) pop();
  }

 private:
  enum class Mode { FixedAbelian, Ap, AnyAbelian, AnyOrdered, Generic };

  std::size_t top() const noexcept { return p2_.size() - words_; }

  bool generic_creates_set(std::uint32_t x) const {
    std::vector<std::uint32_t> ids;
    for (auto e : chosen_) ids.push_back(*deck_.card_id_of(e));
    ids.push_back(*deck_.card_id_of(x));
    return finder_.has_set(ids);
  }

  const Deck& deck_;
  const Group& g_;
  SetRule rule_;
  mutable SetFinder finder_;
  Mode mode_ = Mode::Generic;
  std::vector<std::uint32_t> chosen_;
  std::vector<std::uint32_t> forbidden_;
  std::vector<std::vector<std::uint32_t>> touched_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> p1_, p2_;
  std::vector<std::uint64_t> reach_;
  std::size_t max_levels_ = 0;
};

struct CapSearchResult {
  enum class Status { WitnessFound, ExhaustedNoWitness, BudgetExhausted };

  std::string variant;
  std::uint64_t target_size = 0;
  Status status = Status::BudgetExhausted;
  std::optional<std::vector<std::uint32_t>> witness;  // card ids
  std::uint64_t nodes_explored = 0;
  // "exact" when the backtracking tree decided the result, "heuristic" for the
  // random-restart fallback.
  std::string mode = "exact";
  // The first card was fixed because translations act transitively on a torsor deck.
  bool translation_pruned = false;
};

inline std::string_view status_name(CapSearchResult::Status s) {
  switch (s) {
    case CapSearchResult::Status::WitnessFound:
      return "witness-found";
    case CapSearchResult::Status::ExhaustedNoWitness:
      return "exhausted-no-witness";
    case CapSearchResult::Status::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

inline constexpr std::uint64_t kDefaultCapBudget = 100'000'000;

// Independent check that a table is set-free: full enumeration, must be exhaustive.
inline bool verify_set_free(const Deck& deck, std::span<const std::uint32_t> ids) {
  auto r = find_sets(deck, ids);
  return r.exhaustive && r.sets_found.empty();
}

// Searches for a set-free table of `target` cards. Backtracks over card ids in increasing
// order, skipping any card that completes a set with the prefix. When the tree exceeds
// `budget` nodes, switches to seeded random restarts with hill climbing.
inline CapSearchResult cap_search(const Deck& deck, std::uint64_t target, std::uint64_t budget = kDefaultCapBudget,
                                  std::uint64_t seed = 0) {
  if (target > deck.size()) throw InvalidArgument("target size exceeds deck size");
  CapSearchResult res;
  res.variant = deck.variant().id;
  res.target_size = target;

  const auto n = static_cast<std::uint32_t>(deck.size());
  SetFreeBuilder builder(deck);
  bool found = false, aborted = false;

  std::function<void(std::uint32_t)> dfs = [&](std::uint32_t from) {
    if (builder.chosen().size() == target) {
      found = true;
      return;
    }
    for (std::uint32_t id = from; id < n && !found && !aborted; ++id) {
      if (builder.chosen().size() + (n - id) < target) break;
      const std::uint32_t e = deck.element_index(id);
      if (builder.creates_set(e)) continue;
      if (++res.nodes_explored > budget) {
        aborted = true;
        return;
      }
      builder.push(e);
      dfs(id + 1);
      if (found) return;
      builder.pop();
    }
  };

  const bool torsor = deck.variant().include_identity && translation_invariant(deck.variant().rule, deck.group());
  if (target == 0) {
    found = true;
  } else if (torsor) {
    res.translation_pruned = true;
    ++res.nodes_explored;
    builder.push(deck.element_index(0));
    dfs(1);
  } else {
    dfs(0);
  }

  auto take_witness = [&](const std::vector<std::uint32_t>& elems) {
    std::vector<std::uint32_t> ids;
    for (auto e : elems) ids.push_back(*deck.card_id_of(e));
    std::sort(ids.begin(), ids.end());
    ids.resize(static_cast<std::size_t>(target));
    return ids;
  };

  if (found) {
    res.status = CapSearchResult::Status::WitnessFound;
    res.witness = take_witness(builder.chosen());
    return res;
  }
  if (!aborted) {
    res.status = CapSearchResult::Status::ExhaustedNoWitness;
    return res;
  }

  // Heuristic fallback: greedy fill in random order, then repeatedly drop a card and refill.
  res.mode = "heuristic";
  // The fallback gets its own allowance so a small exact budget still yields a useful search.
  const std::uint64_t heuristic_budget = std::clamp<std::uint64_t>(budget, 1'000'000, 10'000'000);
  std::uint64_t spent = 0;
  std::vector<std::uint32_t> order(n);
  for (std::uint64_t restart = 0; spent < heuristic_budget; ++restart) {
    Rng rng(seed, restart);
    builder.clear();
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(std::span(order));
    auto fill = [&] {
      for (auto id : order) {
        const std::uint32_t e = deck.element_index(id);
        if (std::find(builder.chosen().begin(), builder.chosen().end(), e) != builder.chosen().end()) continue;
        ++spent;
        if (!builder.creates_set(e)) builder.push(e);
        if (builder.chosen().size() >= target) return;
      }
    };
    fill();
    for (unsigned step = 0; step < 200 && builder.chosen().size() < target && spent < heuristic_budget; ++step) {
      std::vector<std::uint32_t> keep = builder.chosen();
      const std::size_t drop = static_cast<std::size_t>(rng.below(keep.size()));
      keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(drop));
      const std::vector<std::uint32_t> before = builder.chosen();
      builder.clear();
      for (auto e : keep) builder.push(e);
      rng.shuffle(std::span(order));
      fill();
      if (builder.chosen().size() < before.size()) {
        builder.clear();
        for (auto e : before) builder.push(e);
      }
    }
    if (builder.chosen().size() >= target) {
      res.status = CapSearchResult::Status::WitnessFound;
      res.witness = take_witness(builder.chosen());
      res.nodes_explored += spent;
      return res;
    }
  }
  res.nodes_explored += spent;
  res.status = CapSearchResult::Status::BudgetExhausted;
  return res;
}

struct ThresholdResult {
  std::string variant;
  // Smallest table size that must contain a set, when proven.
  std::optional<std::uint64_t> threshold;
  // Every size below this has a verified set-free witness.
  std::uint64_t lower_bound = 0;
  bool exact = false;
  std::string proof_status;
  std::optional<std::vector<std::uint32_t>> largest_witness;
  std::uint64_t nodes_explored = 0;
};

// Smallest t with no set-free table of t cards, searched for t = 1..max_size.
inline ThresholdResult guarantee_threshold(const Deck& deck, std::uint64_t max_size,
                                           std::uint64_t budget = kDefaultCapBudget) {
  ThresholdResult out;
  out.variant = deck.variant().id;
  out.lower_bound = 1;
  const std::uint64_t limit = std::min<std::uint64_t>(max_size, deck.size());
  for (std::uint64_t t = 1; t <= limit; ++t) {
    auto r = cap_search(deck, t, budget);
    out.nodes_explored += r.nodes_explored;
    if (r.status == CapSearchResult::Status::WitnessFound) {
      if (!verify_set_free(deck, *r.witness)) throw Error("cap search returned a table that contains a set");
      out.largest_witness = r.witness;
      out.lower_bound = t + 1;
      continue;
    }
    if (r.status == CapSearchResult::Status::ExhaustedNoWitness) {
      out.threshold = t;
      out.exact = true;
      out.proof_status = "exact: set-free witness of size " + std::to_string(t - 1) +
                         ", exhaustive search found none of size " + std::to_string(t);
      if (deck.variant().rule.is_any() && detail::is_elementary_abelian_2(deck.group().spec()) &&
          t == deck.group().width() + 1)
        out.proof_status += "; agrees with the binary-rank bound (any " + std::to_string(t) +
                            " vectors in dimension " + std::to_string(deck.group().width()) + " are dependent)";
      return out;
    }
    out.proof_status = "not proven: set-free witness of size " + std::to_string(t - 1) +
                       ", no counterexample of size " + std::to_string(t) + " found within budget";
    return out;
  }
  if (limit == deck.size() && out.lower_bound > deck.size())
    out.proof_status = "the whole deck is set-free";
  else
    out.proof_status = "no threshold <= " + std::to_string(max_size) + "; set-free tables of size " +
                       std::to_string(limit) + " exist";
  return out;
}

}  // namespace groupset
