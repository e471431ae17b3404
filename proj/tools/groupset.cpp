// groupset: command-line front end for the engine and the HTTP service.
//
// JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success, 1 usage or input
// error, 2 a verification that ran and failed.

#include <csignal>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "groupset/api.hpp"
#include "groupset/facts.hpp"
#include "groupset/server.hpp"
#include "groupset/session.hpp"
#include "groupset/store.hpp"
#include "groupset/wire.hpp"

using namespace groupset;

namespace {

constexpr int kUsage = 1;
constexpr int kVerifyFailed = 2;

void emit(const Json& j) { std::cout << j.dump(2) << std::endl; }

std::vector<std::uint32_t> parse_ids(const std::string& text) {
  std::vector<std::uint32_t> ids;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item[0] == '-') throw InvalidArgument("not a card id: '" + item + "'");
    ids.push_back(static_cast<std::uint32_t>(v));
  }
  return ids;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// One-line rendering of a card for the terminal game.
std::string describe(const Deck& deck, std::uint32_t id) {
  const Json f = features_json(deck.card(id).features);
  std::string out = "#" + std::to_string(id) + " ";
  for (const auto& [k, v] : f.items())
    if (k != "scheme") out += k + "=" + v.dump() + " ";
  return out;
}

void print_table(const GameSession& s) {
  std::cerr << "table (" << s.table().size() << " cards, " << s.draw_pile().size() << " in pile):\n";
  for (auto id : s.table()) std::cerr << "  " << describe(s.deck(), id) << "\n";
  for (const auto& p : s.players()) std::cerr << "  " << p.name << ": " << p.score << "\n";
}

// Terminal game: reads commands from stdin until quit or end of input.
int play(const std::string& variant, std::uint64_t seed, const std::string& players, const std::string& mode) {
  SessionOptions opt;
  if (mode != "free" && mode != "strict") throw InvalidArgument("--mode must be free or strict");
  opt.strict = mode == "strict";
  auto s = GameSession::create(variant, seed, split_names(players), opt);
  const bool ordered = s.variant().rule.ordered(s.deck().group());
  std::cerr << s.variant().display_name << " (" << to_string(s.variant().rule) << ")"
            << (ordered ? ", card order matters" : "") << "\n"
            << "commands: claim <player> <id> <id> ... | deal | hint | show | quit\n";
  print_table(s);
  std::string line;
  while (s.status() == GameSession::Status::Active && std::cerr << "> " && std::getline(std::cin, line)) {
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    try {
      if (cmd == "quit" || cmd == "q") {
        break;
      } else if (cmd == "show") {
        print_table(s);
      } else if (cmd == "hint") {
        auto h = s.hint();
        if (!h) {
          std::cerr << "no set on the table\n";
        } else {
          for (auto id : *h) std::cerr << "  " << describe(s.deck(), id) << "\n";
        }
      } else if (cmd == "deal") {
        auto r = s.deal_extra();
        if (r.warning) std::cerr << "warning: " << *r.warning << "\n";
        print_table(s);
      } else if (cmd == "claim") {
        std::string player;
        in >> player;
        std::vector<std::uint32_t> ids;
        for (std::uint32_t id; in >> id;) ids.push_back(id);
        auto r = s.claim_set(player, ids);
        if (r.accepted) {
          std::cerr << "set! +" << r.points << "\n";
          print_table(s);
        } else {
          std::cerr << "rejected: " << r.reason << (r.reorder_hint ? " (another order of these cards works)" : "")
                    << "\n";
        }
      } else if (!cmd.empty()) {
        std::cerr << "unknown command '" << cmd << "'\n";
      }
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
    }
  }
  if (s.status() == GameSession::Status::Finished) std::cerr << "game over\n";
  emit(s.snapshot());
  return 0;
}

HttpServer* running_server = nullptr;

extern "C" void on_signal(int) {
  if (running_server) running_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SET-style card games over finite groups"};
  app.require_subcommand(1);

  std::string variant;
  std::uint64_t seed = 0;
  std::uint64_t table_size = 0, trials = 0, size = 0, budget = kDefaultCapBudget;
  unsigned threads = 0;
  std::string cards;

  app.add_subcommand("list-variants", "Print the variant catalog");

  auto* dump = app.add_subcommand("dump-deck", "Print every card of a variant");
  dump->add_option("--variant", variant, "Variant id")->required();

  auto* find = app.add_subcommand("find-sets", "List the sets among the given cards");
  find->add_option("--variant", variant, "Variant id")->required();
  find->add_option("--cards", cards, "Comma-separated card ids")->required();

  auto* analyze = app.add_subcommand("analyze", "Monte Carlo probability that a random table holds a set");
  analyze->add_option("--variant", variant, "Variant id")->required();
  analyze->add_option("--table-size", table_size, "Cards on the table")->required();
  analyze->add_option("--trials", trials, "Random tables to sample")->required();
  analyze->add_option("--seed", seed, "Generator seed")->capture_default_str();
  analyze->add_option("--threads", threads, "Worker threads (0 = all cores)");

  bool threshold = false;
  auto* cap = app.add_subcommand("cap-search", "Search for a set-free table of a given size");
  cap->add_option("--variant", variant, "Variant id")->required();
  cap->add_option("--size", size, "Target size (with --threshold: largest size tried)")->required();
  cap->add_option("--budget", budget, "Node budget of the exact search")->capture_default_str();
  cap->add_option("--seed", seed, "Seed of the heuristic fallback")->capture_default_str();
  cap->add_flag("--threshold", threshold, "Report the smallest size that forces a set");

  FactOptions facts;
  auto* verify = app.add_subcommand("verify", "Recompute the fact suite; exit 2 if any fact fails");
  verify->add_option("--trials", facts.probability_trials, "Trials for the 12-card probability")->capture_default_str();
  verify->add_option("--seed", facts.seed, "Generator seed")->capture_default_str();
  verify->add_option("--threads", facts.threads, "Worker threads (0 = all cores)");

  std::string players = "player";
  std::string mode = "free";
  auto* play_cmd = app.add_subcommand("play", "Play a session in the terminal");
  play_cmd->add_option("--variant", variant, "Variant id")->required();
  play_cmd->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  play_cmd->add_option("--players", players, "Comma-separated player names")->capture_default_str();
  play_cmd->add_option("--mode", mode, "free or strict")->capture_default_str();

  ServerOptions server;
  std::string state_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve->add_option("--host", server.host, "Listen address")->capture_default_str();
  serve->add_option("--port", server.port, "Listen port (0 = any free port)")->capture_default_str();
  serve->add_option("--state-dir", state_dir, "Session directory (GROUPSET_STATE_DIR overrides)");
  serve->add_option("--workers", server.workers, "HTTP worker threads")->capture_default_str();
  serve->add_option("--analysis-workers", server.limits.analysis_workers, "Concurrent analysis requests")
      ->capture_default_str();
  serve->add_option("--seed", seed, "Unused; accepted for symmetry with the other commands");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (app.got_subcommand("list-variants")) {
      Json list = Json::array();
      for (const auto& v : catalog()) list.push_back(variant_json(v));
      emit({{"variants", list}});
    } else if (app.got_subcommand(dump)) {
      emit(deck_json(*catalog_deck(variant)));
    } else if (app.got_subcommand(find)) {
      emit(analysis_json(find_sets(*catalog_deck(variant), parse_ids(cards))));
    } else if (app.got_subcommand(analyze)) {
      emit(probability_json(set_probability(*catalog_deck(variant), table_size, trials, seed, threads)));
    } else if (app.got_subcommand(cap)) {
      auto deck = catalog_deck(variant);
      if (threshold)
        emit(threshold_json(guarantee_threshold(*deck, size, budget)));
      else
        emit(cap_json(cap_search(*deck, size, budget, seed)));
    } else if (app.got_subcommand(verify)) {
      auto report = verify_facts(facts);
      emit(to_json(report));
      for (const auto& f : report.facts)
        std::cerr << (f.pass ? "pass " : "FAIL ") << f.id << ": " << f.observed << "\n";
      if (!report.all_pass()) return kVerifyFailed;
    } else if (app.got_subcommand(play_cmd)) {
      return play(variant, seed, players, mode);
    } else if (app.got_subcommand(serve)) {
      auto dir = SessionStore::state_dir(state_dir.empty() ? std::nullopt
                                                           : std::optional<std::filesystem::path>(state_dir));
      SessionStore store(dir);
      for (const auto& w : store.warnings()) std::cerr << "warning: " << w << "\n";
      HttpServer http(store, server);
      const int port = http.bind();
      std::cerr << "listening on " << server.host << ":" << port << " with " << store.size() << " session(s)"
                << (dir ? " from " + dir->string() : std::string(" (in memory)")) << "\n";
      running_server = &http;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      http.run();
      running_server = nullptr;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return 0;
}
