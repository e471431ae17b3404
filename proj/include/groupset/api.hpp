#pragma once

#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

#include "json.hpp"

#include "groupset/analysis.hpp"
#include "groupset/errors.hpp"
#include "groupset/facts.hpp"
#include "groupset/store.hpp"
#include "groupset/wire.hpp"

// Transport-free request handling: (method, path, body) in, (status, JSON body) out. The
// HTTP server is a thin adapter over this, and the tests drive it directly.

namespace groupset {

struct ApiResponse {
  int status = 200;
  Json body;
};

// A failed request. `code` is one of bad-request | not-found | conflict | rule-violation.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message, Json detail = Json::object())
      : std::runtime_error(message), status_(status), code_(std::move(code)), detail_(std::move(detail)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  const Json& detail() const noexcept { return detail_; }

  Json body() const { return {{"error", {{"code", code_}, {"message", what()}, {"detail", detail_}}}}; }

 private:
  int status_;
  std::string code_;
  Json detail_;
};

struct ApiLimits {
  // Concurrent analysis requests (probability, cap search, find-sets, facts).
  unsigned analysis_workers = 2;
  std::uint64_t max_trials = 10'000'000;
  std::uint64_t max_cap_budget = 1'000'000'000;
  // Facts run with these settings; the report is computed once and cached.
  FactOptions facts;
};

class Router {
 public:
  explicit Router(SessionStore& store, ApiLimits limits = {})
      : store_(store), limits_(limits), analysis_slots_(std::max(1u, limits.analysis_workers)) {}

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) {
    try {
      return dispatch(method, path, body);
    } catch (const ApiError& e) {
      return {e.status(), e.body()};
    } catch (const RuleViolation& e) {
      return error(409, "rule-violation", e.what(), {{"reason", e.reason()}});
    } catch (const NotFound& e) {
      return error(404, "not-found", e.what());
    } catch (const Conflict& e) {
      return error(409, "conflict", e.what());
    } catch (const ReplayDivergence& e) {
      return error(409, "conflict", e.what(), {{"seq", e.seq()}});
    } catch (const Error& e) {
      // InvalidSpec, RuleError, InvalidArgument, ParseError, ...
      return error(400, "bad-request", e.what());
    } catch (const Json::exception& e) {
      return error(400, "bad-request", std::string("malformed JSON: ") + e.what());
    }
  }

 private:
  static ApiResponse error(int status, std::string code, const std::string& message, Json detail = Json::object()) {
    return {status, ApiError(status, std::move(code), message, std::move(detail)).body()};
  }

  static std::vector<std::string> split(std::string_view path) {
    std::vector<std::string> parts;
    const auto q = path.find('?');
    if (q != std::string_view::npos) path = path.substr(0, q);
    std::size_t i = 0;
    while (i < path.size()) {
      if (path[i] == '/') {
        ++i;
        continue;
      }
      const auto j = std::min(path.find('/', i), path.size());
      parts.emplace_back(path.substr(i, j - i));
      i = j;
    }
    return parts;
  }

  static Json parse_body(std::string_view body) {
    if (body.empty()) return Json::object();
    Json j = Json::parse(body);
    if (!j.is_object()) throw ApiError(400, "bad-request", "request body must be a JSON object");
    return j;
  }

  template <class T>
  static T field(const Json& j, const char* name) {
    if (!j.contains(name)) throw ApiError(400, "bad-request", std::string("missing field '") + name + "'");
    try {
      return j.at(name).get<T>();
    } catch (const Json::exception&) {
      throw ApiError(400, "bad-request", std::string("field '") + name + "' has the wrong type");
    }
  }

  template <class T>
  static T field_or(const Json& j, const char* name, T fallback) {
    return j.contains(name) ? field<T>(j, name) : fallback;
  }

  static void expect(std::string_view method, std::string_view want) {
    if (method != want)
      throw ApiError(405, "bad-request", "method " + std::string(method) + " not allowed here",
                     {{"allowed", std::string(want)}});
  }

  ApiResponse dispatch(std::string_view method, std::string_view path, std::string_view raw) {
    const auto p = split(path);
    const auto n = p.size();
    if (n == 1 && p[0] == "variants") {
      expect(method, "GET");
      Json list = Json::array();
      for (const auto& v : catalog()) list.push_back(variant_json(v));
      return {200, {{"variants", list}}};
    }
    if (n == 3 && p[0] == "variants" && p[2] == "deck") {
      expect(method, "GET");
      return {200, deck_json(*catalog_deck(p[1]))};
    }
    if (n == 1 && p[0] == "sessions") {
      expect(method, "POST");
      return create_session(parse_body(raw));
    }
    if (n >= 2 && p[0] == "sessions") {
      const std::string& id = p[1];
      if (n == 2) {
        expect(method, "GET");
        return {200, store_.read(id, [](const GameSession& s) { return session_view(s); })};
      }
      if (n == 3 && p[2] == "claims") {
        expect(method, "POST");
        return claim(id, parse_body(raw));
      }
      if (n == 3 && p[2] == "deal") {
        expect(method, "POST");
        return {200, store_.write(id, [](GameSession& s) {
                  auto r = s.deal_extra();
                  Json j{{"cards", cards_json(s.deck(), r.cards)}, {"warning", nullptr}, {"session", session_view(s)}};
                  if (r.warning) j["warning"] = *r.warning;
                  return j;
                })};
      }
      if (n == 3 && p[2] == "hint") {
        expect(method, "GET");
        return {200, store_.read(id, [](const GameSession& s) {
                  if (s.status() != GameSession::Status::Active) throw Conflict("the session has finished");
                  auto h = s.hint();
                  Json j{{"set", nullptr}};
                  if (h) j["set"] = cards_json(s.deck(), *h);
                  return j;
                })};
      }
    }
    if (n == 2 && p[0] == "analysis") {
      expect(method, "POST");
      const Json body = parse_body(raw);
      if (p[1] == "probability") return analysis([&] { return probability(body); });
      if (p[1] == "cap-search") return analysis([&] { return cap(body); });
      if (p[1] == "find-sets") return analysis([&] { return find(body); });
    }
    if (n == 1 && p[0] == "facts") {
      expect(method, "GET");
      return analysis([&] { return facts(); });
    }
    throw ApiError(404, "not-found", "no route for " + std::string(method) + " " + std::string(path));
  }

  ApiResponse create_session(const Json& body) {
    const auto variant = field<std::string>(body, "variant");
    const auto seed = field_or<std::uint64_t>(body, "seed", 0);
    const auto players = field<std::vector<std::string>>(body, "players");
    SessionOptions opt;
    const auto mode = field_or<std::string>(body, "mode", "free");
    if (mode != "free" && mode != "strict") throw ApiError(400, "bad-request", "mode must be 'free' or 'strict'");
    opt.strict = mode == "strict";
    if (body.contains("table_size")) opt.table_size = field<std::uint64_t>(body, "table_size");
    if (body.contains("add_count")) opt.add_count = field<std::uint64_t>(body, "add_count");
    return {201, store_.create(variant, seed, players, opt, [](const GameSession& s) { return session_view(s); })};
  }

  ApiResponse claim(const std::string& id, const Json& body) {
    const auto player = field<std::string>(body, "player");
    const auto cards = field<std::vector<std::uint32_t>>(body, "cards");
    return store_.write(id, [&](GameSession& s) -> ApiResponse {
      auto r = s.claim_set(player, cards);
      if (!r.accepted) {
        Json detail{{"reason", r.reason}, {"reorder_hint", r.reorder_hint}, {"cards", cards}};
        return error(409, "rule-violation", "claim rejected: " + r.reason, detail);
      }
      return {200,
              {{"accepted", true},
               {"points", r.points},
               {"order", r.order},
               {"cards", cards_json(s.deck(), r.order)},
               {"session", session_view(s)}}};
    });
  }

  // Analysis work runs under a bounded number of slots; extra requests wait their turn.
  template <class F>
  ApiResponse analysis(F&& f) {
    analysis_slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{analysis_slots_};
    return f();
  }

  ApiResponse probability(const Json& body) {
    auto deck = catalog_deck(field<std::string>(body, "variant"));
    const auto table_size = field<std::uint64_t>(body, "table_size");
    const auto trials = field<std::uint64_t>(body, "trials");
    const auto seed = field_or<std::uint64_t>(body, "seed", 0);
    if (trials > limits_.max_trials)
      throw ApiError(400, "bad-request", "trials above the limit of " + std::to_string(limits_.max_trials));
    return {200, probability_json(set_probability(*deck, table_size, trials, seed, 1))};
  }

  ApiResponse cap(const Json& body) {
    auto deck = catalog_deck(field<std::string>(body, "variant"));
    const auto size = field<std::uint64_t>(body, "size");
    const auto budget = field_or<std::uint64_t>(body, "budget", kDefaultCapBudget);
    const auto seed = field_or<std::uint64_t>(body, "seed", 0);
    if (budget > limits_.max_cap_budget)
      throw ApiError(400, "bad-request", "budget above the limit of " + std::to_string(limits_.max_cap_budget));
    return {200, cap_json(cap_search(*deck, size, budget, seed))};
  }

  ApiResponse find(const Json& body) {
    auto deck = catalog_deck(field<std::string>(body, "variant"));
    const auto cards = field<std::vector<std::uint32_t>>(body, "cards");
    return {200, analysis_json(find_sets(*deck, cards))};
  }

  ApiResponse facts() {
    std::lock_guard lock(facts_mu_);
    if (!facts_) facts_ = to_json(verify_facts(limits_.facts));
    return {200, *facts_};
  }

  SessionStore& store_;
  ApiLimits limits_;
  std::counting_semaphore<> analysis_slots_;
  std::mutex facts_mu_;
  std::optional<Json> facts_;
};

}  // namespace groupset
