#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "groupset/analysis.hpp"
#include "groupset/errors.hpp"
#include "groupset/random.hpp"
#include "groupset/set_rules.hpp"
#include "groupset/variants.hpp"

// Event-sourced game sessions. The event log plus (variant, seed, players, options) is the
// whole persistent state; everything else is derived by replaying it.

namespace groupset {

struct Player {
  std::string name;
  std::uint64_t score = 0;

  friend bool operator==(const Player&, const Player&) = default;
};

struct SessionOptions {
  // Strict: extra cards only when the table holds no set. Free: whenever players ask.
  bool strict = false;
  std::optional<std::uint64_t> table_size;
  std::optional<std::uint64_t> add_count;

  friend bool operator==(const SessionOptions&, const SessionOptions&) = default;
};

struct Event {
  enum class Kind { Dealt, ClaimAccepted, ClaimRejected, ExtraDealt, Finished };

  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  Kind kind = Kind::Dealt;
  std::string player;
  // dealt / extra-dealt: cards moved to the table; claims: the cards as claimed.
  std::vector<std::uint32_t> cards;
  // claim-accepted: the order that satisfies the rule, the refill, and the points scored.
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> replenished;
  std::uint64_t points = 0;
  // claim-rejected
  std::string reason;
  bool reorder_hint = false;
};

inline std::string_view event_kind_name(Event::Kind k) {
  switch (k) {
    case Event::Kind::Dealt:
      return "dealt";
    case Event::Kind::ClaimAccepted:
      return "claim-accepted";
    case Event::Kind::ClaimRejected:
      return "claim-rejected";
    case Event::Kind::ExtraDealt:
      return "extra-dealt";
    case Event::Kind::Finished:
      return "finished";
  }
  return "unknown";
}

inline Event::Kind parse_event_kind(std::string_view s) {
  for (auto k : {Event::Kind::Dealt, Event::Kind::ClaimAccepted, Event::Kind::ClaimRejected, Event::Kind::ExtraDealt,
                 Event::Kind::Finished})
    if (event_kind_name(k) == s) return k;
  throw InvalidArgument("unknown event kind '" + std::string(s) + "'");
}

inline nlohmann::json to_json(const Event& e) {
  nlohmann::json j{{"seq", e.seq}, {"ts", e.timestamp_ms}, {"kind", event_kind_name(e.kind)}};
  switch (e.kind) {
    case Event::Kind::Dealt:
    case Event::Kind::ExtraDealt:
      j["cards"] = e.cards;
      break;
    case Event::Kind::ClaimAccepted:
      j["player"] = e.player;
      j["cards"] = e.cards;
      j["order"] = e.order;
      j["replenished"] = e.replenished;
      j["points"] = e.points;
      break;
    case Event::Kind::ClaimRejected:
      j["player"] = e.player;
      j["cards"] = e.cards;
      j["reason"] = e.reason;
      j["reorder_hint"] = e.reorder_hint;
      break;
    case Event::Kind::Finished:
      break;
  }
  return j;
}

inline Event event_from_json(const nlohmann::json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.timestamp_ms = j.at("ts").get<std::int64_t>();
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.player = j.value("player", std::string{});
  e.cards = j.value("cards", std::vector<std::uint32_t>{});
  e.order = j.value("order", std::vector<std::uint32_t>{});
  e.replenished = j.value("replenished", std::vector<std::uint32_t>{});
  e.points = j.value("points", std::uint64_t{0});
  e.reason = j.value("reason", std::string{});
  e.reorder_hint = j.value("reorder_hint", false);
  return e;
}

struct ClaimResult {
  bool accepted = false;
  std::string reason;  // wrong-arity | not-a-set | cards-not-on-table
  bool reorder_hint = false;
  std::uint64_t points = 0;
  std::vector<std::uint32_t> order;
};

struct DealResult {
  std::vector<std::uint32_t> cards;
  std::optional<std::string> warning;
};

using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Fresh 128-bit session id from the OS entropy source.
inline std::string random_session_id() {
  std::random_device rd;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 8; ++i) {
    const auto v = rd();
    for (int b = 0; b < 4; ++b) id += kHex[(v >> (4 * b)) & 15];
  }
  return id;
}

class GameSession {
 public:
  enum class Status { Active, Finished };

  // Shuffles the deck with Rng(seed, 0) and deals the opening table.
  static GameSession create(std::string_view variant_id, std::uint64_t seed, std::vector<std::string> players,
                            SessionOptions options = {}, std::string session_id = {}, Clock clock = system_clock_ms) {
    GameSession s(catalog_deck(variant_id), seed, std::move(players), options,
                  session_id.empty() ? random_session_id() : std::move(session_id), std::move(clock));
    s.open();
    return s;
  }

  // Rebuilds a session from its persisted document, checking every logged event against
  // what the engine produces. Throws ReplayDivergence with the first failing sequence number.
  static GameSession replay(const nlohmann::json& doc, Clock clock = system_clock_ms) {
    std::vector<Event> log;
    for (const auto& j : doc.at("event_log")) log.push_back(event_from_json(j));
    return replay(doc.at("variant").get<std::string>(), doc.at("seed").get<std::uint64_t>(),
                  doc.at("players").get<std::vector<std::string>>(), options_from_json(doc.value("options", nlohmann::json::object())),
                  doc.at("session_id").get<std::string>(), log, std::move(clock));
  }

  static GameSession replay(std::string_view variant_id, std::uint64_t seed, std::vector<std::string> players,
                            SessionOptions options, std::string session_id, const std::vector<Event>& log,
                            Clock clock = system_clock_ms) {
    for (std::size_t i = 0; i < log.size(); ++i)
      if (log[i].seq != i) throw ReplayDivergence(i, "sequence numbers are not contiguous");
    // Timestamps of replayed events are copied from the log; the clock only stamps new ones.
    GameSession s(catalog_deck(variant_id), seed, std::move(players), options, std::move(session_id),
                  std::move(clock));
    s.open();
    // An empty log means nothing has happened yet: the opening deal is derived.
    if (log.empty()) return s;
    std::size_t next = 0;
    auto absorb = [&] {
      for (; next < s.log_.size(); ++next) {
        if (next >= log.size()) throw ReplayDivergence(next, "the log ends before event " + std::to_string(next));
        if (!same_event(s.log_[next], log[next]))
          throw ReplayDivergence(next, "logged " + std::string(event_kind_name(log[next].kind)) +
                                           " does not match the engine's " +
                                           std::string(event_kind_name(s.log_[next].kind)));
        s.log_[next].timestamp_ms = log[next].timestamp_ms;
      }
    };
    absorb();
    while (next < log.size()) {
      const Event& e = log[next];
      try {
        switch (e.kind) {
          case Event::Kind::ClaimAccepted:
          case Event::Kind::ClaimRejected:
            s.claim_set(e.player, e.cards);
            break;
          case Event::Kind::ExtraDealt:
            s.deal_extra();
            break;
          default:
            throw ReplayDivergence(e.seq, "unexpected " + std::string(event_kind_name(e.kind)) + " event");
        }
      } catch (const ReplayDivergence&) {
        throw;
      } catch (const Error& err) {
        throw ReplayDivergence(e.seq, err.what());
      }
      if (s.log_.size() == next) throw ReplayDivergence(e.seq, "event produced nothing");
      absorb();
    }
    return s;
  }

  const std::string& session_id() const noexcept { return id_; }
  const VariantSpec& variant() const noexcept { return deck_->variant(); }
  const Deck& deck() const noexcept { return *deck_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const SessionOptions& options() const noexcept { return options_; }
  std::uint64_t table_size() const noexcept { return table_size_; }
  std::uint64_t add_count() const noexcept { return add_count_; }
  const std::vector<Player>& players() const noexcept { return players_; }
  const std::vector<std::uint32_t>& table() const noexcept { return table_; }
  const std::vector<std::uint32_t>& draw_pile() const noexcept { return pile_; }
  const std::vector<std::uint32_t>& claimed() const noexcept { return claimed_; }
  const std::vector<Event>& event_log() const noexcept { return log_; }
  Status status() const noexcept { return status_; }

  // Structural problems (unknown player or card, repeated card, finished game) throw; a
  // claim that breaks the rules is logged as claim-rejected and returned.
  ClaimResult claim_set(const std::string& player, const std::vector<std::uint32_t>& cards) {
    require_active();
    Player& who = find_player(player);
    for (auto id : cards)
      if (!deck_->has_card(id)) throw NotFound("card " + std::to_string(id) + " is not in the deck");
    {
      std::set<std::uint32_t> distinct(cards.begin(), cards.end());
      if (distinct.size() != cards.size()) throw InvalidArgument("a claim lists a card more than once");
    }

    ClaimResult r;
    const auto& rule = variant().rule;
    const auto& g = deck_->group();
    std::vector<std::uint32_t> elems;
    for (auto id : cards) elems.push_back(deck_->element_index(id));

    const bool on_table = std::all_of(cards.begin(), cards.end(), [&](std::uint32_t id) {
      return std::find(table_.begin(), table_.end(), id) != table_.end();
    });
    if (!on_table) {
      r.reason = "cards-not-on-table";
    } else if (!rule.accepts_arity(cards.size())) {
      r.reason = "wrong-arity";
    } else if (!rule.ordered(g)) {
      // Order carries no information: accept in canonical (sorted) order.
      if (rule_holds(rule, g, elems)) {
        r.accepted = true;
        r.order = cards;
        std::sort(r.order.begin(), r.order.end());
      } else {
        r.reason = "not-a-set";
      }
    } else if (rule_holds(rule, g, elems)) {
      r.accepted = true;
      r.order = cards;
    } else {
      r.reason = "not-a-set";
      r.reorder_hint = satisfying_order(rule, g, elems).has_value();
    }

    Event e;
    e.player = player;
    e.cards = cards;
    if (!r.accepted) {
      e.kind = Event::Kind::ClaimRejected;
      e.reason = r.reason;
      e.reorder_hint = r.reorder_hint;
      append(std::move(e));
      return r;
    }
    r.points = rule.is_any() ? cards.size() : 1;
    who.score += r.points;
    for (auto id : cards) table_.erase(std::find(table_.begin(), table_.end(), id));
    claimed_.insert(claimed_.end(), cards.begin(), cards.end());
    std::vector<std::uint32_t> refill;
    while (table_.size() < table_size_ && !pile_.empty()) refill.push_back(draw());
    e.kind = Event::Kind::ClaimAccepted;
    e.order = r.order;
    e.replenished = refill;
    e.points = r.points;
    append(std::move(e));
    maybe_finish();
    return r;
  }

  DealResult deal_extra() {
    require_active();
    if (pile_.empty()) throw Conflict("the draw pile is empty");
    if (options_.strict && finder_->has_set(table_))
      throw RuleViolation("table-has-set", "strict mode: the table already holds a set");
    DealResult r;
    for (std::uint64_t i = 0; i < add_count_ && !pile_.empty(); ++i) r.cards.push_back(draw());
    if (add_count_ == 1)
      r.warning = "cards are added one at a time, so any set found next must contain the new card";
    Event e;
    e.kind = Event::Kind::ExtraDealt;
    e.cards = r.cards;
    append(std::move(e));
    maybe_finish();
    return r;
  }

  // First set on the table in canonical scan order, as card ids in a valid order.
  std::optional<std::vector<std::uint32_t>> hint() const { return finder_->first_set(table_); }

  // The deck is partitioned into draw pile, table and claimed cards.
  bool cards_conserved() const {
    std::vector<std::uint32_t> all = pile_;
    all.insert(all.end(), table_.begin(), table_.end());
    all.insert(all.end(), claimed_.begin(), claimed_.end());
    if (all.size() != deck_->size()) return false;
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all[i] != i) return false;
    return true;
  }

  // Persistent form: identity, inputs and the log.
  nlohmann::json to_document() const {
    nlohmann::json players = nlohmann::json::array();
    for (const auto& p : players_) players.push_back(p.name);
    nlohmann::json log = nlohmann::json::array();
    for (const auto& e : log_) log.push_back(to_json(e));
    return {{"session_id", id_},  {"variant", variant().id}, {"seed", seed_},
            {"players", players}, {"options", options_json()}, {"event_log", log}};
  }

  // Full derived state plus the log; byte-equal between a live session and its replay.
  nlohmann::json snapshot() const {
    nlohmann::json j = to_document();
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& p : players_) scores.push_back({{"name", p.name}, {"score", p.score}});
    j["scores"] = scores;
    j["table"] = table_;
    j["draw_pile"] = pile_;
    j["claimed"] = claimed_;
    j["status"] = status_ == Status::Active ? "active" : "finished";
    return j;
  }

  nlohmann::json options_json() const {
    return {{"mode", options_.strict ? "strict" : "free"}, {"table_size", table_size_}, {"add_count", add_count_}};
  }

  static SessionOptions options_from_json(const nlohmann::json& j) {
    SessionOptions o;
    const std::string mode = j.value("mode", std::string("free"));
    if (mode != "strict" && mode != "free") throw InvalidArgument("mode must be 'strict' or 'free'");
    o.strict = mode == "strict";
    if (j.contains("table_size")) o.table_size = j.at("table_size").get<std::uint64_t>();
    if (j.contains("add_count")) o.add_count = j.at("add_count").get<std::uint64_t>();
    return o;
  }

 private:
  GameSession(std::shared_ptr<const Deck> deck, std::uint64_t seed, std::vector<std::string> names,
              SessionOptions options, std::string id, Clock clock)
      : deck_(std::move(deck)), seed_(seed), options_(options), id_(std::move(id)), clock_(std::move(clock)) {
    if (names.empty()) throw InvalidArgument("a session needs at least one player");
    std::set<std::string> seen;
    for (auto& n : names) {
      if (n.empty()) throw InvalidArgument("player names must be non-empty");
      if (!seen.insert(n).second) throw InvalidArgument("duplicate player name '" + n + "'");
      players_.push_back(Player{std::move(n), 0});
    }
    if (id_.empty()) throw InvalidArgument("session id must be non-empty");
    table_size_ = options_.table_size.value_or(deck_->variant().table_size);
    add_count_ = options_.add_count.value_or(deck_->variant().add_count);
    if (table_size_ < 1 || table_size_ > deck_->size())
      throw InvalidArgument("table size must be between 1 and the deck size");
    if (add_count_ < 1) throw InvalidArgument("add count must be >= 1");
    finder_ = std::make_shared<SetFinder>(*deck_);
  }

  void open() {
    pile_.resize(deck_->size());
    std::iota(pile_.begin(), pile_.end(), 0u);
    Rng rng(seed_, 0);
    rng.shuffle(std::span(pile_));
    Event e;
    e.kind = Event::Kind::Dealt;
    while (table_.size() < table_size_ && !pile_.empty()) e.cards.push_back(draw());
    append(std::move(e));
    maybe_finish();
  }

  std::uint32_t draw() {
    const std::uint32_t id = pile_.front();
    pile_.erase(pile_.begin());
    table_.push_back(id);
    return id;
  }

  void append(Event e) {
    e.seq = log_.size();
    e.timestamp_ms = clock_();
    log_.push_back(std::move(e));
  }

  void maybe_finish() {
    if (status_ == Status::Active && pile_.empty() && !finder_->has_set(table_)) {
      status_ = Status::Finished;
      Event e;
      e.kind = Event::Kind::Finished;
      append(std::move(e));
    }
  }

  void require_active() const {
    if (status_ != Status::Active) throw Conflict("the session has finished");
  }

  Player& find_player(const std::string& name) {
    for (auto& p : players_)
      if (p.name == name) return p;
    throw NotFound("no player named '" + name + "'");
  }

  static bool same_event(const Event& a, const Event& b) {
    nlohmann::json ja = to_json(a), jb = to_json(b);
    ja.erase("ts");
    jb.erase("ts");
    return ja == jb;
  }

  std::shared_ptr<const Deck> deck_;
  std::uint64_t seed_ = 0;
  SessionOptions options_;
  std::string id_;
  Clock clock_;
  std::uint64_t table_size_ = 0;
  std::uint64_t add_count_ = 0;
  std::vector<Player> players_;
  std::vector<std::uint32_t> pile_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> claimed_;
  std::vector<Event> log_;
  Status status_ = Status::Active;
  // Scratch state only; shared so sessions stay copyable.
  std::shared_ptr<SetFinder> finder_;
};

}  // namespace groupset
