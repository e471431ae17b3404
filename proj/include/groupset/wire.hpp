#pragma once

#include <string>
#include <variant>

#include "json.hpp"

#include "groupset/analysis.hpp"
#include "groupset/group_expr.hpp"
#include "groupset/session.hpp"
#include "groupset/variants.hpp"

// JSON shapes shared by the CLI and the HTTP API. Cards always carry both the card id and
// the rendered features so clients never redo group arithmetic.

namespace groupset {

using Json = nlohmann::json;

inline Json features_json(const FeatureVector& fv) {
  return std::visit(
      [](const auto& f) -> Json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Set4Features>) {
          return {{"scheme", "set4"},       {"number", f.number()},   {"shape", f.shape()},
                  {"color", f.color()},     {"shading", f.shading()}, {"digits", f.digits}};
        } else if constexpr (std::is_same_v<F, Socks6Features>) {
          return {{"scheme", "socks6"}, {"socks", f.socks}, {"colors", f.colors()}};
        } else if constexpr (std::is_same_v<F, Quads3Features>) {
          return {{"scheme", "quads3"},
                  {"count", f.attributes[0] + 1},
                  {"color", Quads3Features::kColors[f.attributes[1]]},
                  {"shape", Quads3Features::kShapes[f.attributes[2]]},
                  {"attributes", f.attributes}};
        } else if constexpr (std::is_same_v<F, Pentagons3Features>) {
          return {{"scheme", "pentagons3"}, {"directions", f.directions}};
        } else if constexpr (std::is_same_v<F, OctaFeatures>) {
          return {{"scheme", "octa"},
                  {"octa_colors", f.octa_colors},
                  {"swirl", f.swirl},
                  {"cube_colors", f.cube_colors},
                  {"hollow", f.hollow}};
        } else {
          Json panels = Json::array();
          for (const auto& p : f.panels) panels.push_back({{"images", p.images}, {"beads", p.beads}, {"odd", p.odd}});
          return {{"scheme", "permutation-wires"}, {"panels", panels}};
        }
      },
      fv);
}

inline Json card_json(const Deck& deck, std::uint32_t id) {
  const Card& c = deck.card(id);
  return {{"card_id", c.card_id}, {"element", c.element.value}, {"features", features_json(c.features)}};
}

inline Json cards_json(const Deck& deck, std::span<const std::uint32_t> ids) {
  Json out = Json::array();
  for (auto id : ids) out.push_back(card_json(deck, id));
  return out;
}

inline Json variant_json(const VariantSpec& v) {
  return {{"id", v.id},
          {"display_name", v.display_name},
          {"group", print_group_expr(v.group)},
          {"group_order", order(v.group)},
          {"rule", to_string(v.rule)},
          {"ordered", v.rule.ordered(Group(v.group))},
          {"include_identity", v.include_identity},
          {"deck_size", v.deck_size()},
          {"table_size", v.table_size},
          {"add_count", v.add_count},
          {"renderer", scheme_name(v.renderer)}};
}

inline Json deck_json(const Deck& deck) {
  Json cards = Json::array();
  for (const auto& c : deck.cards()) cards.push_back(card_json(deck, c.card_id));
  return {{"variant", deck.variant().id}, {"deck_size", deck.size()}, {"cards", cards}};
}

inline Json analysis_json(const TableAnalysis& a) {
  return {{"table", a.table},
          {"sets_found", a.sets_found},
          {"set_count", a.sets_found.size()},
          {"exhaustive", a.exhaustive},
          {"elapsed_ms", std::chrono::duration<double, std::milli>(a.elapsed).count()}};
}

inline Json probability_json(const ProbabilityEstimate& p) {
  return {{"variant", p.variant},   {"table_size", p.table_size}, {"trials", p.trials},
          {"hits", p.hits},         {"estimate", p.estimate},     {"standard_error", p.standard_error},
          {"seed", p.seed},         {"generator", "mt19937_64/splitmix64 streams"}};
}

inline Json cap_json(const CapSearchResult& r) {
  Json j{{"variant", r.variant},
         {"target_size", r.target_size},
         {"status", status_name(r.status)},
         {"witness", nullptr},
         {"nodes_explored", r.nodes_explored},
         {"mode", r.mode},
         {"translation_pruned", r.translation_pruned}};
  if (r.witness) j["witness"] = *r.witness;
  return j;
}

inline Json threshold_json(const ThresholdResult& t) {
  Json j{{"variant", t.variant},
         {"threshold", nullptr},
         {"lower_bound", t.lower_bound},
         {"exact", t.exact},
         {"proof_status", t.proof_status},
         {"largest_witness", nullptr},
         {"nodes_explored", t.nodes_explored}};
  if (t.threshold) j["threshold"] = *t.threshold;
  if (t.largest_witness) j["largest_witness"] = *t.largest_witness;
  return j;
}

// Client view of a session: the table as full card descriptors, pile and claims as counts.
inline Json session_view(const GameSession& s) {
  Json players = Json::array();
  for (const auto& p : s.players()) players.push_back({{"name", p.name}, {"score", p.score}});
  Json log = Json::array();
  for (const auto& e : s.event_log()) log.push_back(to_json(e));
  return {{"session_id", s.session_id()},
          {"variant", s.variant().id},
          {"seed", s.seed()},
          {"status", s.status() == GameSession::Status::Active ? "active" : "finished"},
          {"players", players},
          {"table", cards_json(s.deck(), s.table())},
          {"draw_pile_size", s.draw_pile().size()},
          {"claimed_count", s.claimed().size()},
          {"options", s.options_json()},
          {"ordered", s.variant().rule.ordered(s.deck().group())},
          {"event_log", log}};
}

}  // namespace groupset
