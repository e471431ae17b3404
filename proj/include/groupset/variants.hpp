#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "groupset/errors.hpp"
#include "groupset/features.hpp"
#include "groupset/group.hpp"
#include "groupset/group_expr.hpp"
#include "groupset/set_rules.hpp"

namespace groupset {

// A playable game: group, rule, deck policy and how cards are drawn.
struct VariantSpec {
  std::string id;
  std::string display_name;
  GroupSpec group;
  SetRule rule;
  bool include_identity = true;
  unsigned table_size = 12;
  unsigned add_count = 3;
  Scheme renderer = Scheme::PermutationWires;

  std::uint64_t deck_size() const { return order(group) - (include_identity ? 0 : 1); }
};

inline std::vector<VariantSpec> catalog() {
  auto g = [](std::string_view text) { return parse_group_expr(text); };
  using R = SetRule;
  return {
      {"classic-set", "SET", g("C3^4"), R::product(3), true, 12, 3, Scheme::Set4},
      {"proset", "ProSet (Socks)", g("C2^6"), R::product_any(), false, 7, 3, Scheme::Socks6},
      {"evenquads", "EvenQuads", g("C2^6"), R::product(4), true, 10, 4, Scheme::Quads3},
      {"c53t", "C53T", g("C5^3"), R::product(5), true, 12, 5, Scheme::Pentagons3},
      {"octa", "OCTA Set", g("C2 x S4"), R::arithmetic_progression(), true, 12, 3, Scheme::Octa},
      {"a5set", "A5SET", g("A5"), R::arithmetic_progression(), true, 12, 3, Scheme::PermutationWires},
      {"nf-s3", "Permutations of 3", g("S3"), R::product_any(), false, 5, 3, Scheme::PermutationWires},
      {"nf-s4", "Permutations of 4", g("S4"), R::product_any(), false, 12, 3, Scheme::PermutationWires},
      {"nf-s3sq", "Two permutations of 3", g("S3^2"), R::product_any(), false, 12, 3, Scheme::PermutationWires},
      {"nf-wreath", "Beaded wires", g("C2 wr S3"), R::product_any(), false, 12, 3, Scheme::PermutationWires},
  };
}

inline const VariantSpec& find_variant(std::string_view id) {
  static const std::vector<VariantSpec> all = catalog();
  for (const auto& v : all)
    if (v.id == id) return v;
  throw NotFound("unknown variant '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// Feature encoding

namespace detail {

inline void require_value_width(const Element& e, std::size_t w) {
  if (e.value.size() != w) throw InvalidSpec("card scheme does not match the variant's group");
}

inline bool is_c2(const GroupSpec& s) { return s.kind == GroupSpec::Kind::Cyclic && s.param == 2; }

// Walks the spec tree turning each permutation factor into a wire panel.
inline void wires_encode(const GroupSpec& s, std::span<const std::uint32_t> v, std::size_t& off,
                         std::vector<WirePanel>& out) {
  using K = GroupSpec::Kind;
  auto perm_panel = [&](unsigned n, std::vector<unsigned> beads) {
    WirePanel p;
    p.images.assign(v.begin() + static_cast<std::ptrdiff_t>(off), v.begin() + static_cast<std::ptrdiff_t>(off + n));
    p.odd = permutation_is_odd(v.subspan(off, n));
    p.beads = std::move(beads);
    off += n;
    out.push_back(std::move(p));
  };
  switch (s.kind) {
    case K::Symmetric:
    case K::Alternating:
      perm_panel(s.param, {});
      return;
    case K::DirectProduct:
      for (const auto& c : s.children) wires_encode(c, v, off, out);
      return;
    case K::Power:
      for (unsigned i = 0; i < s.param; ++i) wires_encode(s.children[0], v, off, out);
      return;
    case K::Wreath: {
      if (!is_c2(s.children[0])) break;
      std::vector<unsigned> beads(v.begin() + static_cast<std::ptrdiff_t>(off),
                                  v.begin() + static_cast<std::ptrdiff_t>(off + s.param));
      off += s.param;
      perm_panel(s.param, std::move(beads));
      return;
    }
    default:
      break;
  }
  throw InvalidSpec("permutation-wires scheme needs permutation factors or C2 wr S_n");
}

inline void wires_decode(const GroupSpec& s, const std::vector<WirePanel>& panels, std::size_t& next,
                         std::vector<std::uint32_t>& out) {
  using K = GroupSpec::Kind;
  auto take = [&]() -> const WirePanel& {
    if (next >= panels.size()) throw InvalidSpec("too few wire panels");
    return panels[next++];
  };
  switch (s.kind) {
    case K::Symmetric:
    case K::Alternating: {
      const auto& p = take();
      if (p.images.size() != s.param || !p.beads.empty()) throw InvalidSpec("wire panel shape mismatch");
      out.insert(out.end(), p.images.begin(), p.images.end());
      return;
    }
    case K::DirectProduct:
      for (const auto& c : s.children) wires_decode(c, panels, next, out);
      return;
    case K::Power:
      for (unsigned i = 0; i < s.param; ++i) wires_decode(s.children[0], panels, next, out);
      return;
    case K::Wreath: {
      const auto& p = take();
      if (p.images.size() != s.param || p.beads.size() != s.param) throw InvalidSpec("wire panel shape mismatch");
      out.insert(out.end(), p.beads.begin(), p.beads.end());
      out.insert(out.end(), p.images.begin(), p.images.end());
      return;
    }
    default:
      throw InvalidSpec("permutation-wires scheme needs permutation factors or C2 wr S_n");
  }
}

}  // namespace detail

// Features drawn on the card for `element`. Pure function of the element.
inline FeatureVector card_descriptor(const VariantSpec& variant, const Element& e) {
  switch (variant.renderer) {
    case Scheme::Set4: {
      detail::require_value_width(e, 4);
      Set4Features f;
      for (unsigned i = 0; i < 4; ++i) f.digits[i] = e.value[i];
      return f;
    }
    case Scheme::Socks6: {
      detail::require_value_width(e, 6);
      Socks6Features f;
      for (unsigned i = 0; i < 6; ++i) f.socks[i] = e.value[i] != 0;
      return f;
    }
    case Scheme::Quads3: {
      detail::require_value_width(e, 6);
      Quads3Features f;
      for (unsigned j = 0; j < 3; ++j) f.attributes[j] = e.value[2 * j] + 2 * e.value[2 * j + 1];
      return f;
    }
    case Scheme::Pentagons3: {
      detail::require_value_width(e, 3);
      Pentagons3Features f;
      for (unsigned i = 0; i < 3; ++i) f.directions[i] = e.value[i];
      return f;
    }
    case Scheme::Octa: {
      detail::require_value_width(e, 5);
      OctaFeatures f;
      f.swirl = e.value[0];
      for (unsigned i = 0; i < 4; ++i) f.octa_colors[i] = e.value[1 + i];
      octa_cube_view(f.swirl, f.octa_colors, f.cube_colors, f.hollow);
      return f;
    }
    case Scheme::PermutationWires: {
      WireFeatures f;
      std::size_t off = 0;
      detail::wires_encode(variant.group, e.value, off, f.panels);
      if (off != e.value.size()) throw InvalidSpec("card scheme does not match the variant's group");
      return f;
    }
  }
  throw InvalidSpec("unknown scheme");
}

// Inverse of card_descriptor. Throws InvalidSpec / ElementMismatch on inconsistent features.
inline Element element_from_features(const VariantSpec& variant, const Group& group, const FeatureVector& fv) {
  std::vector<std::uint32_t> v;
  auto wrong = [] { return InvalidSpec("features do not match the variant's scheme"); };
  switch (variant.renderer) {
    case Scheme::Set4: {
      const auto* f = std::get_if<Set4Features>(&fv);
      if (!f) throw wrong();
      v.assign(f->digits.begin(), f->digits.end());
      break;
    }
    case Scheme::Socks6: {
      const auto* f = std::get_if<Socks6Features>(&fv);
      if (!f) throw wrong();
      for (bool b : f->socks) v.push_back(b ? 1 : 0);
      break;
    }
    case Scheme::Quads3: {
      const auto* f = std::get_if<Quads3Features>(&fv);
      if (!f) throw wrong();
      for (unsigned a : f->attributes) {
        if (a > 3) throw wrong();
        v.push_back(a & 1);
        v.push_back((a >> 1) & 1);
      }
      break;
    }
    case Scheme::Pentagons3: {
      const auto* f = std::get_if<Pentagons3Features>(&fv);
      if (!f) throw wrong();
      v.assign(f->directions.begin(), f->directions.end());
      break;
    }
    case Scheme::Octa: {
      const auto* f = std::get_if<OctaFeatures>(&fv);
      if (!f) throw wrong();
      v.push_back(f->swirl);
      v.insert(v.end(), f->octa_colors.begin(), f->octa_colors.end());
      Element e = group.make(std::move(v));
      std::array<unsigned, 3> cube{}, hollow{};
      octa_cube_view(f->swirl, f->octa_colors, cube, hollow);
      if (cube != f->cube_colors || hollow != f->hollow) throw InvalidSpec("octahedron and cube views disagree");
      return e;
    }
    case Scheme::PermutationWires: {
      const auto* f = std::get_if<WireFeatures>(&fv);
      if (!f) throw wrong();
      std::size_t next = 0;
      detail::wires_decode(variant.group, f->panels, next, v);
      if (next != f->panels.size()) throw wrong();
      break;
    }
  }
  return group.make(std::move(v));
}

// ---------------------------------------------------------------------------
// Decks

struct Card {
  Element element;
  std::uint32_t card_id = 0;
  FeatureVector features;
};

// Every card of a variant, in element-enumeration order. Without the identity card, card
// ids are element indices shifted down by one.
class Deck {
 public:
  Deck(VariantSpec variant, GroupPtr group) : variant_(std::move(variant)), group_(std::move(group)) {
    offset_ = variant_.include_identity ? 0 : 1;
    const std::uint64_t n = group_->order();
    cards_.reserve(static_cast<std::size_t>(n - offset_));
    for (std::uint64_t i = offset_; i < n; ++i) {
      Element e = group_->element_at(i);
      FeatureVector f = card_descriptor(variant_, e);
      cards_.push_back(Card{std::move(e), static_cast<std::uint32_t>(i - offset_), std::move(f)});
    }
  }

  const VariantSpec& variant() const noexcept { return variant_; }
  const Group& group() const noexcept { return *group_; }
  const GroupPtr& group_ptr() const noexcept { return group_; }
  const std::vector<Card>& cards() const noexcept { return cards_; }
  std::size_t size() const noexcept { return cards_.size(); }

  bool has_card(std::uint64_t id) const noexcept { return id < cards_.size(); }

  const Card& card(std::uint64_t id) const {
    if (!has_card(id)) throw NotFound("no card with id " + std::to_string(id));
    return cards_[static_cast<std::size_t>(id)];
  }

  std::uint32_t element_index(std::uint32_t card_id) const noexcept { return card_id + offset_; }

  // Card id of an element, or nullopt for the removed identity.
  std::optional<std::uint32_t> card_id_of(std::uint64_t element_index) const noexcept {
    if (element_index < offset_ || element_index >= group_->order()) return std::nullopt;
    return static_cast<std::uint32_t>(element_index - offset_);
  }

 private:
  VariantSpec variant_;
  GroupPtr group_;
  std::uint32_t offset_ = 0;
  std::vector<Card> cards_;
};

inline Deck build_deck(const VariantSpec& variant) {
  return Deck(variant, std::make_shared<const Group>(variant.group));
}

// Shared, lazily built deck for a catalog variant.
inline std::shared_ptr<const Deck> catalog_deck(std::string_view id) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const Deck>, std::less<>> cache;
  const VariantSpec& v = find_variant(id);
  std::lock_guard lock(mu);
  auto it = cache.find(v.id);
  if (it != cache.end()) return it->second;
  auto deck = std::make_shared<const Deck>(build_deck(v));
  cache.emplace(v.id, deck);
  return deck;
}

}  // namespace groupset
