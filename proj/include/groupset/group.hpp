#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "groupset/errors.hpp"
#include "groupset/group_spec.hpp"

namespace groupset {

// A group element in canonical form.
//
// `value` is a flat encoding whose layout mirrors the spec tree:
//   Cyclic(n)               one residue in [0, n)
//   Symmetric/Alternating   the image array of the permutation (i -> value[i])
//   DirectProduct / Power   the factors' encodings concatenated
//   Wreath(base, n)         n base encodings (one per wire), then the n-image permutation
// `index` is the element's position in the group's canonical enumeration; 0 is the identity.
struct Element {
  std::vector<std::uint32_t> value;
  std::uint64_t index = 0;

  friend bool operator==(const Element&, const Element&) = default;
};

namespace detail {

inline std::uint64_t factorial(unsigned n) {
  std::uint64_t r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

// Lexicographic rank of a permutation given as an image array.
inline std::uint64_t permutation_rank(std::span<const std::uint32_t> p) {
  const auto n = static_cast<unsigned>(p.size());
  std::uint64_t rank = 0;
  for (unsigned i = 0; i < n; ++i) {
    std::uint64_t smaller = 0;
    for (unsigned j = i + 1; j < n; ++j)
      if (p[j] < p[i]) ++smaller;
    rank += smaller * factorial(n - 1 - i);
  }
  return rank;
}

inline void permutation_unrank(std::uint64_t rank, std::span<std::uint32_t> out) {
  const auto n = static_cast<unsigned>(out.size());
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (unsigned i = 0; i < n; ++i) {
    const std::uint64_t f = factorial(n - 1 - i);
    const auto pick = static_cast<std::size_t>(rank / f);
    rank %= f;
    out[i] = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
}

inline bool permutation_is_odd(std::span<const std::uint32_t> p) {
  std::vector<bool> seen(p.size(), false);
  std::size_t transpositions = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = true;
      ++len;
    }
    transpositions += len - 1;
  }
  return transpositions % 2 == 1;
}

inline bool is_permutation_of_range(std::span<const std::uint32_t> p) {
  std::vector<bool> seen(p.size(), false);
  for (auto v : p) {
    if (v >= p.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

// Runtime shape of one spec node: how wide its encoding is and how to operate on it.
struct Node {
  GroupSpec::Kind kind = GroupSpec::Kind::Cyclic;
  unsigned param = 1;
  std::uint32_t width = 1;
  std::uint64_t order = 1;
  std::vector<Node> children;

  static Node build(const GroupSpec& spec) {
    using K = GroupSpec::Kind;
    Node node;
    node.kind = spec.kind;
    node.param = spec.param;
    switch (spec.kind) {
      case K::Cyclic:
        node.width = 1;
        node.order = spec.param;
        break;
      case K::Symmetric:
        node.width = spec.param;
        node.order = factorial(spec.param);
        break;
      case K::Alternating:
        node.width = spec.param;
        node.order = factorial(spec.param) / 2;
        break;
      case K::DirectProduct:
        node.width = 0;
        node.order = 1;
        for (const auto& c : spec.children) {
          node.children.push_back(build(c));
          node.width += node.children.back().width;
          node.order *= node.children.back().order;
        }
        break;
      case K::Power:
      case K::Wreath: {
        node.children.push_back(build(spec.children[0]));
        const Node& base = node.children[0];
        node.width = base.width * spec.param;
        node.order = 1;
        for (unsigned i = 0; i < spec.param; ++i) node.order *= base.order;
        if (spec.kind == K::Wreath) {
          node.width += spec.param;
          node.order *= factorial(spec.param);
        }
        break;
      }
    }
    return node;
  }

  void identity(std::span<std::uint32_t> out) const {
    using K = GroupSpec::Kind;
    switch (kind) {
      case K::Cyclic:
        out[0] = 0;
        return;
      case K::Symmetric:
      case K::Alternating:
        std::iota(out.begin(), out.end(), 0u);
        return;
      case K::DirectProduct: {
        std::size_t off = 0;
        for (const auto& c : children) {
          c.identity(out.subspan(off, c.width));
          off += c.width;
        }
        return;
      }
      case K::Power:
      case K::Wreath: {
        const Node& base = children[0];
        for (unsigned i = 0; i < param; ++i) base.identity(out.subspan(i * base.width, base.width));
        if (kind == K::Wreath) {
          auto perm = out.subspan(std::size_t{param} * base.width, param);
          std::iota(perm.begin(), perm.end(), 0u);
        }
        return;
      }
    }
  }

  // out = a * b, "apply a, then b". `out` must not alias the inputs.
  void compose(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
               std::span<std::uint32_t> out) const {
    using K = GroupSpec::Kind;
    switch (kind) {
      case K::Cyclic:
        out[0] = static_cast<std::uint32_t>((std::uint64_t{a[0]} + b[0]) % param);
        return;
      case K::Symmetric:
      case K::Alternating:
        for (unsigned i = 0; i < param; ++i) out[i] = b[a[i]];
        return;
      case K::DirectProduct: {
        std::size_t off = 0;
        for (const auto& c : children) {
          c.compose(a.subspan(off, c.width), b.subspan(off, c.width), out.subspan(off, c.width));
          off += c.width;
        }
        return;
      }
      case K::Power: {
        const Node& base = children[0];
        for (unsigned i = 0; i < param; ++i) {
          const std::size_t off = std::size_t{i} * base.width;
          base.compose(a.subspan(off, base.width), b.subspan(off, base.width),
                       out.subspan(off, base.width));
        }
        return;
      }
      case K::Wreath: {
        // (f, s) * (g, t) = (i -> f_i * g_{s(i)}, s then t)
        const Node& base = children[0];
        const std::size_t bw = base.width;
        const std::size_t poff = std::size_t{param} * bw;
        auto ap = a.subspan(poff, param);
        auto bp = b.subspan(poff, param);
        for (unsigned i = 0; i < param; ++i) {
          base.compose(a.subspan(i * bw, bw), b.subspan(ap[i] * bw, bw), out.subspan(i * bw, bw));
          out[poff + i] = bp[ap[i]];
        }
        return;
      }
    }
  }

  void inverse(std::span<const std::uint32_t> a, std::span<std::uint32_t> out) const {
    using K = GroupSpec::Kind;
    switch (kind) {
      case K::Cyclic:
        out[0] = a[0] == 0 ? 0 : param - a[0];
        return;
      case K::Symmetric:
      case K::Alternating:
        for (unsigned i = 0; i < param; ++i) out[a[i]] = i;
        return;
      case K::DirectProduct: {
        std::size_t off = 0;
        for (const auto& c : children) {
          c.inverse(a.subspan(off, c.width), out.subspan(off, c.width));
          off += c.width;
        }
        return;
      }
      case K::Power: {
        const Node& base = children[0];
        for (unsigned i = 0; i < param; ++i) {
          const std::size_t off = std::size_t{i} * base.width;
          base.inverse(a.subspan(off, base.width), out.subspan(off, base.width));
        }
        return;
      }
      case K::Wreath: {
        const Node& base = children[0];
        const std::size_t bw = base.width;
        const std::size_t poff = std::size_t{param} * bw;
        auto ap = a.subspan(poff, param);
        for (unsigned i = 0; i < param; ++i) {
          base.inverse(a.subspan(i * bw, bw), out.subspan(ap[i] * bw, bw));
          out[poff + ap[i]] = i;
        }
        return;
      }
    }
  }

  std::uint64_t rank(std::span<const std::uint32_t> a) const {
    using K = GroupSpec::Kind;
    switch (kind) {
      case K::Cyclic:
        return a[0];
      case K::Symmetric:
        return permutation_rank(a);
      case K::Alternating:
        // Lexicographic neighbours 2j, 2j+1 differ by swapping the last two images,
        // so exactly one of each pair is even.
        return permutation_rank(a) / 2;
      case K::DirectProduct: {
        std::uint64_t r = 0;
        std::size_t off = 0;
        for (const auto& c : children) {
          r = r * c.order + c.rank(a.subspan(off, c.width));
          off += c.width;
        }
        return r;
      }
      case K::Power:
      case K::Wreath: {
        const Node& base = children[0];
        std::uint64_t r = 0;
        for (unsigned i = 0; i < param; ++i)
          r = r * base.order + base.rank(a.subspan(std::size_t{i} * base.width, base.width));
        if (kind == K::Wreath)
          r = r * factorial(param) + permutation_rank(a.subspan(std::size_t{param} * base.width, param));
        return r;
      }
    }
    return 0;
  }

  void unrank(std::uint64_t r, std::span<std::uint32_t> out) const {
    using K = GroupSpec::Kind;
    switch (kind) {
      case K::Cyclic:
        out[0] = static_cast<std::uint32_t>(r);
        return;
      case K::Symmetric:
        permutation_unrank(r, out);
        return;
      case K::Alternating:
        permutation_unrank(2 * r, out);
        if (permutation_is_odd(out)) permutation_unrank(2 * r + 1, out);
        return;
      case K::DirectProduct: {
        std::size_t off = width;
        for (auto it = children.rbegin(); it != children.rend(); ++it) {
          off -= it->width;
          it->unrank(r % it->order, out.subspan(off, it->width));
          r /= it->order;
        }
        return;
      }
      case K::Power:
      case K::Wreath: {
        const Node& base = children[0];
        if (kind == K::Wreath) {
          const std::uint64_t f = factorial(param);
          permutation_unrank(r % f, out.subspan(std::size_t{param} * base.width, param));
          r /= f;
        }
        for (unsigned i = param; i-- > 0;) {
          base.unrank(r % base.order, out.subspan(std::size_t{i} * base.width, base.width));
          r /= base.order;
        }
        return;
      }
    }
  }

  bool valid(std::span<const std::uint32_t> a) const {
    using K = GroupSpec::Kind;
    if (a.size() != width) return false;
    switch (kind) {
      case K::Cyclic:
        return a[0] < param;
      case K::Symmetric:
        return is_permutation_of_range(a);
      case K::Alternating:
        return is_permutation_of_range(a) && !permutation_is_odd(a);
      case K::DirectProduct: {
        std::size_t off = 0;
        for (const auto& c : children) {
          if (!c.valid(a.subspan(off, c.width))) return false;
          off += c.width;
        }
        return true;
      }
      case K::Power:
      case K::Wreath: {
        const Node& base = children[0];
        for (unsigned i = 0; i < param; ++i)
          if (!base.valid(a.subspan(std::size_t{i} * base.width, base.width))) return false;
        if (kind == K::Wreath)
          return is_permutation_of_range(a.subspan(std::size_t{param} * base.width, param));
        return true;
      }
    }
    return false;
  }
};

}  // namespace detail

// A finite group built from a GroupSpec, with exact element arithmetic.
//
// Products follow one convention everywhere: compose(a, b) applies a first, then b.
// For permutations that means (a * b)[i] = b[a[i]]. Groups up to kTableLimit elements
// carry precomputed Cayley, inverse and order tables; index-level arithmetic
// (mul/inv) is then a lookup. Instances are immutable and safe to share across threads.
class Group {
 public:
  static constexpr std::uint64_t kTableLimit = 1024;

  explicit Group(GroupSpec spec, std::uint64_t cap = kDefaultOrderCap)
      : spec_(std::move(spec)), order_(groupset::order(spec_, cap)), root_(detail::Node::build(spec_)) {
    abelian_ = groupset::is_abelian(spec_);
    if (order_ <= kTableLimit) build_tables();
  }

  const GroupSpec& spec() const noexcept { return spec_; }
  std::uint64_t order() const noexcept { return order_; }
  bool is_abelian() const noexcept { return abelian_; }
  std::size_t width() const noexcept { return root_.width; }
  bool has_tables() const noexcept { return !mul_.empty(); }

  Element identity() const {
    Element e;
    e.value.resize(root_.width);
    root_.identity(e.value);
    e.index = 0;
    return e;
  }

  Element element_at(std::uint64_t index) const {
    if (index >= order_) throw ElementMismatch("element index " + std::to_string(index) + " out of range");
    if (!values_.empty()) return Element{values_[index], index};
    Element e;
    e.value.resize(root_.width);
    root_.unrank(index, e.value);
    e.index = index;
    return e;
  }

  // Builds an element from its flat encoding; throws ElementMismatch if the value is not in the group.
  Element make(std::vector<std::uint32_t> value) const {
    if (!root_.valid(value)) throw ElementMismatch("value is not an element of this group");
    Element e{std::move(value), 0};
    e.index = root_.rank(e.value);
    return e;
  }

  bool contains(const Element& e) const {
    return e.index < order_ && root_.valid(e.value) && root_.rank(e.value) == e.index;
  }

  Element compose(const Element& a, const Element& b) const {
    check(a);
    check(b);
    if (has_tables()) return element_at(mul_[a.index * order_ + b.index]);
    Element out;
    out.value.resize(root_.width);
    root_.compose(a.value, b.value, out.value);
    out.index = root_.rank(out.value);
    return out;
  }

  Element inverse(const Element& a) const {
    check(a);
    if (has_tables()) return element_at(inv_[a.index]);
    Element out;
    out.value.resize(root_.width);
    root_.inverse(a.value, out.value);
    out.index = root_.rank(out.value);
    return out;
  }

  // Least k >= 1 with a^k = identity.
  std::uint64_t element_order(const Element& a) const {
    check(a);
    return order_of_index(a.index);
  }

  std::vector<Element> enumerate() const {
    std::vector<Element> out;
    out.reserve(static_cast<std::size_t>(order_));
    for (std::uint64_t i = 0; i < order_; ++i) out.push_back(element_at(i));
    return out;
  }

  std::map<std::uint64_t, std::uint64_t> order_histogram() const {
    std::map<std::uint64_t, std::uint64_t> h;
    for (std::uint64_t i = 0; i < order_; ++i) ++h[order_of_index(i)];
    return h;
  }

  // Index-level arithmetic. Indices are element positions in the canonical enumeration.
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (has_tables()) return mul_[std::size_t{a} * order_ + b];
    std::vector<std::uint32_t> va(root_.width), vb(root_.width), vo(root_.width);
    root_.unrank(a, va);
    root_.unrank(b, vb);
    root_.compose(va, vb, vo);
    return static_cast<std::uint32_t>(root_.rank(vo));
  }

  std::uint32_t inv(std::uint32_t a) const {
    if (has_tables()) return inv_[a];
    std::vector<std::uint32_t> va(root_.width), vo(root_.width);
    root_.unrank(a, va);
    root_.inverse(va, vo);
    return static_cast<std::uint32_t>(root_.rank(vo));
  }

  std::uint64_t order_of_index(std::uint64_t a) const {
    if (!orders_.empty()) return orders_[a];
    std::uint64_t k = 1;
    auto x = static_cast<std::uint32_t>(a);
    while (x != 0) {
      x = mul(x, static_cast<std::uint32_t>(a));
      ++k;
    }
    return k;
  }

 private:
  void check(const Element& e) const {
    if (e.value.size() != root_.width || e.index >= order_)
      throw ElementMismatch("element does not belong to this group");
  }

  void build_tables() {
    const auto n = static_cast<std::size_t>(order_);
    values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      values_[i].resize(root_.width);
      root_.unrank(i, values_[i]);
    }
    mul_.resize(n * n);
    inv_.resize(n);
    std::vector<std::uint32_t> tmp(root_.width);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        root_.compose(values_[i], values_[j], tmp);
        mul_[i * n + j] = static_cast<std::uint32_t>(root_.rank(tmp));
      }
      root_.inverse(values_[i], tmp);
      inv_[i] = static_cast<std::uint32_t>(root_.rank(tmp));
    }
    orders_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t k = 1;
      std::uint32_t x = static_cast<std::uint32_t>(i);
      while (x != 0) {
        x = mul_[std::size_t{x} * n + i];
        ++k;
      }
      orders_[i] = k;
    }
  }

  GroupSpec spec_;
  std::uint64_t order_;
  detail::Node root_;
  bool abelian_ = false;
  std::vector<std::vector<std::uint32_t>> values_;
  std::vector<std::uint32_t> mul_;
  std::vector<std::uint32_t> inv_;
  std::vector<std::uint64_t> orders_;
};

using GroupPtr = std::shared_ptr<const Group>;

}  // namespace groupset
