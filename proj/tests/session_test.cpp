#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "groupset/session.hpp"
#include "oracles.hpp"

using namespace groupset;

namespace {

std::int64_t fake_now = 1000;
std::int64_t fake_clock() { return fake_now += 7; }

GameSession make(std::string_view variant, std::uint64_t seed, SessionOptions opt = {}) {
  return GameSession::create(variant, seed, {"ann", "bob"}, opt, "s-test", fake_clock);
}

std::uint32_t classic_id(std::vector<std::uint32_t> digits) {
  auto deck = catalog_deck("classic-set");
  return *deck->card_id_of(deck->group().make(std::move(digits)).index);
}

bool table_has_set(const GameSession& s) {
  return !oracle::all_sets(s.deck(), s.table()).empty();
}

// Seeds in increasing order until the opening table matches `want_set`.
GameSession first_seed_where(std::string_view variant, bool want_set, SessionOptions opt = {}) {
  for (std::uint64_t seed = 0;; ++seed) {
    auto s = make(variant, seed, opt);
    if (SetFinder(s.deck()).has_set(s.table()) == want_set) return s;
  }
}

}  // namespace

TEST(NewSession, DealsTheOpeningTable) {
  auto s = make("classic-set", 42);
  EXPECT_EQ(s.table().size(), 12u);
  EXPECT_EQ(s.draw_pile().size(), 69u);
  EXPECT_EQ(s.status(), GameSession::Status::Active);
  ASSERT_EQ(s.event_log().size(), 1u);
  EXPECT_EQ(s.event_log()[0].kind, Event::Kind::Dealt);
  EXPECT_EQ(s.event_log()[0].cards, s.table());
  EXPECT_TRUE(s.cards_conserved());

  auto p = make("proset", 7);
  EXPECT_EQ(p.table().size(), 7u);
  EXPECT_EQ(p.draw_pile().size(), 56u);
}

TEST(NewSession, IsDeterministic) {
  EXPECT_EQ(make("classic-set", 42).table(), make("classic-set", 42).table());
  EXPECT_NE(make("classic-set", 42).table(), make("classic-set", 43).table());
}

TEST(NewSession, ShuffleIsTheSeededFisherYates) {
  auto s = make("octa", 5);
  std::vector<std::uint32_t> ids(48);
  for (std::uint32_t i = 0; i < 48; ++i) ids[i] = i;
  Rng rng(5, 0);
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);
  std::vector<std::uint32_t> dealt = s.table();
  dealt.insert(dealt.end(), s.draw_pile().begin(), s.draw_pile().end());
  EXPECT_EQ(dealt, ids);
}

TEST(NewSession, RejectsBadInputs) {
  EXPECT_THROW(GameSession::create("classic-set", 1, {}), InvalidArgument);
  EXPECT_THROW(GameSession::create("classic-set", 1, {"ann", "ann"}), InvalidArgument);
  EXPECT_THROW(GameSession::create("nope", 1, {"ann"}), NotFound);
  SessionOptions big;
  big.table_size = 82;
  EXPECT_THROW(GameSession::create("classic-set", 1, {"ann"}, big), InvalidArgument);
  EXPECT_EQ(GameSession::create("classic-set", 1, {"ann"}).session_id().size(), 32u);
  EXPECT_NE(GameSession::create("classic-set", 1, {"ann"}).session_id(),
            GameSession::create("classic-set", 1, {"ann"}).session_id());
}

TEST(Claim, ClassicTripleIsAccepted) {
  SessionOptions all;
  all.table_size = 81;
  auto s = make("classic-set", 3, all);
  const std::vector<std::uint32_t> triple{classic_id({0, 2, 0, 1}), classic_id({1, 0, 0, 1}), classic_id({2, 1, 0, 1})};
  // Abelian rule: any order works and the server canonicalizes.
  const std::vector<std::uint32_t> shuffled{triple[2], triple[0], triple[1]};
  auto r = s.claim_set("ann", shuffled);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.points, 1u);
  auto sorted = triple;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(r.order, sorted);
  EXPECT_EQ(s.players()[0].score, 1u);
  EXPECT_EQ(s.table().size(), 78u);
  EXPECT_EQ(s.claimed().size(), 3u);
  EXPECT_TRUE(s.cards_conserved());
}

TEST(Claim, RejectionReasons) {
  auto s = first_seed_where("classic-set", true);
  const auto t = s.table();
  auto r = s.claim_set("ann", {t[0], t[1]});
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.reason, "wrong-arity");

  r = s.claim_set("ann", {t[0], t[1], s.draw_pile().front()});
  EXPECT_EQ(r.reason, "cards-not-on-table");

  // A non-set triple from the table.
  auto sets = oracle::all_sets(s.deck(), t);
  std::vector<std::uint32_t> bad;
  for (std::size_t a = 0; a < t.size() && bad.empty(); ++a)
    for (std::size_t b = a + 1; b < t.size() && bad.empty(); ++b)
      for (std::size_t c = b + 1; c < t.size() && bad.empty(); ++c) {
        std::vector<std::uint32_t> tri{t[a], t[b], t[c]};
        if (!sets.count(tri)) bad = tri;
      }
  r = s.claim_set("bob", bad);
  EXPECT_EQ(r.reason, "not-a-set");
  EXPECT_FALSE(r.reorder_hint);
  EXPECT_EQ(s.table(), t);
  EXPECT_EQ(s.players()[1].score, 0u);
  EXPECT_EQ(s.event_log().size(), 4u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(s.event_log()[i].kind, Event::Kind::ClaimRejected);
}

TEST(Claim, StructuralErrorsThrowWithoutLogging) {
  auto s = make("classic-set", 1);
  const auto t = s.table();
  EXPECT_THROW(s.claim_set("zed", {t[0], t[1], t[2]}), NotFound);
  EXPECT_THROW(s.claim_set("ann", {t[0], t[1], 81}), NotFound);
  EXPECT_THROW(s.claim_set("ann", {t[0], t[0], t[1]}), InvalidArgument);
  EXPECT_EQ(s.event_log().size(), 1u);
}

TEST(Claim, OctaReversedProgressionIsAccepted) {
  auto s = first_seed_where("octa", true);
  const auto& deck = s.deck();
  auto sets = oracle::all_sets(deck, s.table());
  ASSERT_FALSE(sets.empty());
  // Find an order that holds, then claim it reversed.
  auto order = *satisfying_order(deck.variant().rule, deck.group(),
                                 std::vector<std::uint32_t>{deck.element_index((*sets.begin())[0]),
                                                            deck.element_index((*sets.begin())[1]),
                                                            deck.element_index((*sets.begin())[2])});
  std::vector<std::uint32_t> ids;
  for (auto e : order) ids.push_back(*deck.card_id_of(e));
  std::reverse(ids.begin(), ids.end());
  auto r = s.claim_set("ann", ids);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.order, ids);
  EXPECT_EQ(s.table().size(), deck.variant().table_size);
}

TEST(Claim, ProgressionReversalHoldsOnEveryOctaTriple) {
  Group g(parse_group_expr("C2 x S4"));
  const auto n = static_cast<std::uint32_t>(g.order());
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      for (std::uint32_t c = 0; c < n; ++c) {
        const std::array<std::uint32_t, 3> fwd{a, b, c}, rev{c, b, a};
        ASSERT_EQ(rule_holds(SetRule::arithmetic_progression(), g, fwd), rule_holds(SetRule::arithmetic_progression(), g, rev));
      }
}

TEST(Claim, WrongOrderReportsReorderHint) {
  auto s = first_seed_where("octa", true);
  const auto& deck = s.deck();
  const auto sets = oracle::all_sets(deck, s.table());
  // Some ordering of a set fails (the middle card is pinned in an AP).
  for (const auto& set : sets) {
    std::vector<std::uint32_t> ids = set;
    do {
      std::vector<std::uint32_t> el;
      for (auto id : ids) el.push_back(deck.element_index(id));
      if (!rule_holds(deck.variant().rule, deck.group(), el)) {
        auto r = s.claim_set("ann", ids);
        EXPECT_FALSE(r.accepted);
        EXPECT_EQ(r.reason, "not-a-set");
        EXPECT_TRUE(r.reorder_hint);
        EXPECT_TRUE(s.event_log().back().reorder_hint);
        return;
      }
    } while (std::next_permutation(ids.begin(), ids.end()));
  }
  FAIL() << "no misordered set found";
}

TEST(Claim, AnyRuleScoresTheCardCount) {
  auto s = make("proset", 11);
  auto h = s.hint();
  ASSERT_TRUE(h.has_value());
  auto r = s.claim_set("bob", *h);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.points, h->size());
  EXPECT_EQ(s.players()[1].score, h->size());
  EXPECT_EQ(s.table().size(), 7u);
}

TEST(Claim, NonAbelianAnyRuleValidatesTheGivenOrder) {
  auto s = first_seed_where("nf-s4", true);
  auto h = s.hint();
  ASSERT_TRUE(h.has_value());
  const auto& deck = s.deck();
  std::vector<std::uint32_t> el;
  for (auto id : *h) el.push_back(deck.element_index(id));
  EXPECT_TRUE(oracle::product(deck.group(), el) == 0u);
  auto r = s.claim_set("ann", *h);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.order, *h);
}

TEST(Deal, NoSetTableGrowsByThree) {
  auto s = first_seed_where("classic-set", false);
  auto r = s.deal_extra();
  EXPECT_EQ(r.cards.size(), 3u);
  EXPECT_FALSE(r.warning.has_value());
  EXPECT_EQ(s.table().size(), 15u);
  EXPECT_EQ(s.event_log().back().kind, Event::Kind::ExtraDealt);
  EXPECT_TRUE(s.cards_conserved());
}

TEST(Deal, StrictModeRejectsWhileASetIsShowing) {
  SessionOptions strict;
  strict.strict = true;
  auto s = first_seed_where("classic-set", true, strict);
  try {
    s.deal_extra();
    FAIL() << "expected a rule violation";
  } catch (const RuleViolation& e) {
    EXPECT_EQ(e.reason(), "table-has-set");
  }
  EXPECT_EQ(s.event_log().size(), 1u);

  auto free = first_seed_where("classic-set", true);
  EXPECT_NO_THROW(free.deal_extra());
  auto quiet = first_seed_where("classic-set", false, strict);
  EXPECT_NO_THROW(quiet.deal_extra());
}

TEST(Deal, SingleCardAdditionsAreFlagged) {
  SessionOptions one;
  one.add_count = 1;
  auto s = make("classic-set", 2, one);
  auto r = s.deal_extra();
  EXPECT_EQ(r.cards.size(), 1u);
  ASSERT_TRUE(r.warning.has_value());
  EXPECT_NE(r.warning->find("new card"), std::string::npos);
}

TEST(Deal, EmptyPileIsAConflict) {
  SessionOptions all;
  all.table_size = 81;
  auto s = make("classic-set", 2, all);
  EXPECT_THROW(s.deal_extra(), Conflict);
}

TEST(Hint, IsAValidOrderedSetAndPure) {
  auto s = first_seed_where("octa", true);
  auto h1 = s.hint();
  auto h2 = s.hint();
  ASSERT_TRUE(h1.has_value());
  EXPECT_EQ(h1, h2);
  std::vector<std::uint32_t> el;
  for (auto id : *h1) el.push_back(s.deck().element_index(id));
  EXPECT_TRUE(rule_holds(s.variant().rule, s.deck().group(), el));
  EXPECT_EQ(s.event_log().size(), 1u);

  auto none = first_seed_where("classic-set", false);
  EXPECT_FALSE(none.hint().has_value());
}

TEST(Game, PlaysToTheEnd) {
  auto s = make("classic-set", 17);
  int steps = 0;
  while (s.status() == GameSession::Status::Active) {
    ASSERT_LT(++steps, 200);
    if (auto h = s.hint())
      ASSERT_TRUE(s.claim_set(steps % 2 ? "ann" : "bob", *h).accepted);
    else
      s.deal_extra();
    ASSERT_TRUE(s.cards_conserved());
  }
  EXPECT_TRUE(s.draw_pile().empty());
  EXPECT_FALSE(table_has_set(s));
  EXPECT_EQ(s.event_log().back().kind, Event::Kind::Finished);
  EXPECT_EQ(s.players()[0].score + s.players()[1].score, s.claimed().size() / 3);
  EXPECT_THROW(s.deal_extra(), Conflict);
  EXPECT_THROW(s.claim_set("ann", {s.table()[0], s.table()[1], s.table()[2]}), Conflict);

  auto again = GameSession::replay(s.to_document());
  EXPECT_EQ(again.status(), GameSession::Status::Finished);
  EXPECT_EQ(again.players(), s.players());
  EXPECT_EQ(again.snapshot().dump(), s.snapshot().dump());
}

TEST(Replay, EmptyLogEqualsNewSession) {
  auto s = make("evenquads", 8);
  auto r = GameSession::replay("evenquads", 8, {"ann", "bob"}, {}, "s-test", {});
  EXPECT_EQ(r.table(), s.table());
  EXPECT_EQ(r.draw_pile(), s.draw_pile());
  EXPECT_EQ(r.event_log().size(), 1u);
}

TEST(Replay, KeepsTimestampsFromTheLog) {
  auto s = make("classic-set", 4);
  s.deal_extra();
  auto r = GameSession::replay(s.to_document(), [] { return std::int64_t{-1}; });
  EXPECT_EQ(r.snapshot().dump(), s.snapshot().dump());
  r.deal_extra();
  EXPECT_EQ(r.event_log().back().timestamp_ms, -1);
}

TEST(Replay, TamperedLogsDiverge) {
  auto s = first_seed_where("classic-set", true);
  const auto t = s.table();
  ASSERT_TRUE(s.claim_set("ann", {t[0], t[1]}).reason == "wrong-arity");
  ASSERT_TRUE(s.claim_set("ann", *s.hint()).accepted);
  auto doc = s.to_document();

  // A rejected claim marked accepted.
  auto bad = doc;
  bad["event_log"][1]["kind"] = "claim-accepted";
  try {
    GameSession::replay(bad);
    FAIL();
  } catch (const ReplayDivergence& e) {
    EXPECT_EQ(e.seq(), 1u);
  }

  // An accepted claim whose cards are not a set.
  bad = doc;
  auto cards = bad["event_log"][2]["cards"].get<std::vector<std::uint32_t>>();
  for (auto id : t)
    if (std::find(cards.begin(), cards.end(), id) == cards.end()) {
      cards[0] = id;
      break;
    }
  bad["event_log"][2]["cards"] = cards;
  try {
    GameSession::replay(bad);
    FAIL();
  } catch (const ReplayDivergence& e) {
    EXPECT_EQ(e.seq(), 2u);
  }

  bad = doc;
  bad["event_log"][2]["points"] = 5;
  EXPECT_THROW(GameSession::replay(bad), ReplayDivergence);

  bad = doc;
  bad["event_log"][2]["player"] = "zed";
  EXPECT_THROW(GameSession::replay(bad), ReplayDivergence);

  bad = doc;
  bad["seed"] = doc["seed"].get<std::uint64_t>() + 1;
  try {
    GameSession::replay(bad);
    FAIL();
  } catch (const ReplayDivergence& e) {
    EXPECT_EQ(e.seq(), 0u);
  }

  bad = doc;
  bad["event_log"][2]["seq"] = 7;
  EXPECT_THROW(GameSession::replay(bad), ReplayDivergence);
}

TEST(Replay, FuzzedScriptsReproduceTheSerializedState) {
  const std::vector<std::string> variants{"classic-set", "proset", "evenquads", "c53t",    "octa",
                                          "a5set",       "nf-s3",  "nf-s4",     "nf-s3sq", "nf-wreath"};
  for (std::uint64_t c = 0; c < 100; ++c) {
    Rng rng(2024, c);
    const auto& variant = variants[c % variants.size()];
    SessionOptions opt;
    opt.strict = rng.below(2) == 0;
    auto s = GameSession::create(variant, rng.next(), {"p0", "p1", "p2"}, opt, "fuzz-" + std::to_string(c), fake_clock);
    for (int step = 0; step < 40 && s.status() == GameSession::Status::Active; ++step) {
      const auto player = "p" + std::to_string(rng.below(3));
      const auto t = s.table();
      try {
        switch (rng.below(4)) {
          case 0:
          case 1:
            if (auto h = s.hint()) {
              auto ids = *h;
              if (rng.below(3) == 0) std::reverse(ids.begin(), ids.end());
              s.claim_set(player, ids);
            }
            break;
          case 2: {
            std::vector<std::uint32_t> ids(t.begin(), t.end());
            rng.shuffle(std::span(ids));
            ids.resize(std::min<std::size_t>(ids.size(), 2 + rng.below(4)));
            s.claim_set(player, ids);
            break;
          }
          default:
            if (s.table().size() < 24) s.deal_extra();
        }
      } catch (const RuleViolation&) {
      } catch (const Conflict&) {
      }
      ASSERT_TRUE(s.cards_conserved()) << variant << " case " << c;
    }
    const auto live = s.snapshot().dump();
    const auto replayed = GameSession::replay(nlohmann::json::parse(s.to_document().dump())).snapshot().dump();
    ASSERT_EQ(live, replayed) << variant << " case " << c;
  }
}
