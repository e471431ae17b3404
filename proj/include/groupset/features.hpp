#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "groupset/errors.hpp"
#include "groupset/group.hpp"

namespace groupset {

enum class Scheme { Set4, Socks6, Quads3, Pentagons3, Octa, PermutationWires };

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Set4:
      return "set4";
    case Scheme::Socks6:
      return "socks6";
    case Scheme::Quads3:
      return "quads3";
    case Scheme::Pentagons3:
      return "pentagons3";
    case Scheme::Octa:
      return "octa";
    case Scheme::PermutationWires:
      return "permutation-wires";
  }
  return "unknown";
}

// Classic SET card: digit 0 is the count (value + 1 symbols), then shape, color, shading.
struct Set4Features {
  std::array<unsigned, 4> digits{};

  static constexpr std::array<std::string_view, 3> kShapes{"oval", "diamond", "squiggly"};
  static constexpr std::array<std::string_view, 3> kColors{"red", "green", "purple"};
  static constexpr std::array<std::string_view, 3> kShadings{"solid", "striped", "empty"};

  unsigned number() const { return digits[0] + 1; }
  std::string_view shape() const { return kShapes[digits[1]]; }
  std::string_view color() const { return kColors[digits[2]]; }
  std::string_view shading() const { return kShadings[digits[3]]; }

  friend bool operator==(const Set4Features&, const Set4Features&) = default;
};

// ProSet / Socks card: which of six colored socks are present.
struct Socks6Features {
  std::array<bool, 6> socks{};

  static constexpr std::array<std::string_view, 6> kColors{"red", "blue", "green", "yellow", "purple", "orange"};

  std::vector<std::string_view> colors() const {
    std::vector<std::string_view> out;
    for (std::size_t i = 0; i < socks.size(); ++i)
      if (socks[i]) out.push_back(kColors[i]);
    return out;
  }

  friend bool operator==(const Socks6Features&, const Socks6Features&) = default;
};

// EvenQuads card: three attributes with four values each. Each attribute packs two sock
// bits as {neither, one, the other, both} = {0, 1, 2, 3}.
struct Quads3Features {
  std::array<unsigned, 3> attributes{};  // count - 1, color, shape

  static constexpr std::array<std::string_view, 4> kColors{"red", "yellow", "green", "blue"};
  static constexpr std::array<std::string_view, 4> kShapes{"spiral", "polyhedron", "circle", "square"};

  friend bool operator==(const Quads3Features&, const Quads3Features&) = default;
};

// C53T card: one marked vertex direction on each of three pentagons.
struct Pentagons3Features {
  std::array<unsigned, 3> directions{};

  friend bool operator==(const Pentagons3Features&, const Pentagons3Features&) = default;
};

// OCTA card: the same group element drawn twice. The octahedron shows a permutation of
// four colors plus a swirl (reflection) bit; the cube shows a permutation of three colors
// plus one hollowness bit per color.
struct OctaFeatures {
  std::array<unsigned, 4> octa_colors{};
  unsigned swirl = 0;
  std::array<unsigned, 3> cube_colors{};
  std::array<unsigned, 3> hollow{};

  friend bool operator==(const OctaFeatures&, const OctaFeatures&) = default;
};

// Crossing wires: one panel per permutation factor; beads only on wreath panels.
struct WirePanel {
  std::vector<unsigned> images;
  std::vector<unsigned> beads;
  bool odd = false;  // parity dot

  friend bool operator==(const WirePanel&, const WirePanel&) = default;
};

struct WireFeatures {
  std::vector<WirePanel> panels;

  friend bool operator==(const WireFeatures&, const WireFeatures&) = default;
};

using FeatureVector =
    std::variant<Set4Features, Socks6Features, Quads3Features, Pentagons3Features, OctaFeatures, WireFeatures>;

namespace detail {

// Signed permutation matrix: column i is sign[i] * e_{perm[i]}.
struct SignedPermutation {
  std::array<unsigned, 3> perm{};
  std::array<int, 3> sign{};

  std::array<int, 3> apply(const std::array<int, 3>& x) const {
    std::array<int, 3> y{};
    for (unsigned i = 0; i < 3; ++i) y[perm[i]] += sign[i] * x[i];
    return y;
  }

  int det() const {
    std::array<std::uint32_t, 3> p{perm[0], perm[1], perm[2]};
    int d = permutation_is_odd(p) ? -1 : 1;
    for (int s : sign) d *= s;
    return d;
  }
};

// The four body diagonals of the cube, each up to sign.
inline constexpr std::array<std::array<int, 3>, 4> kDiagonals{{{1, 1, 1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1}}};

inline unsigned diagonal_index(const std::array<int, 3>& v) {
  for (unsigned j = 0; j < 4; ++j) {
    const auto& d = kDiagonals[j];
    if ((v[0] == d[0] && v[1] == d[1] && v[2] == d[2]) || (v[0] == -d[0] && v[1] == -d[1] && v[2] == -d[2]))
      return j;
  }
  return 4;
}

// For each S4 permutation rank, the cube rotation that permutes the diagonals that way.
inline const std::array<SignedPermutation, 24>& rotation_by_diagonal_permutation() {
  static const std::array<SignedPermutation, 24> table = [] {
    std::array<SignedPermutation, 24> t{};
    std::array<unsigned, 3> p{0, 1, 2};
    do {
      for (unsigned mask = 0; mask < 8; ++mask) {
        SignedPermutation m;
        m.perm = p;
        for (unsigned i = 0; i < 3; ++i) m.sign[i] = (mask >> i) & 1 ? -1 : 1;
        if (m.det() != 1) continue;
        std::array<std::uint32_t, 4> image{};
        for (unsigned i = 0; i < 4; ++i) image[i] = diagonal_index(m.apply(kDiagonals[i]));
        t[permutation_rank(image)] = m;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    return t;
  }();
  return table;
}

}  // namespace detail

// Cube view of a C2 x S4 element: (-1)^swirl times the rotation inducing the diagonal
// permutation, written as (hollowness bits, permutation of the three axes). The map is a
// group isomorphism C2 x S4 -> C2 wr S3 under the library's composition convention.
inline void octa_cube_view(unsigned swirl, const std::array<unsigned, 4>& octa_colors, std::array<unsigned, 3>& cube,
                           std::array<unsigned, 3>& hollow) {
  std::array<std::uint32_t, 4> p{octa_colors[0], octa_colors[1], octa_colors[2], octa_colors[3]};
  const auto& rot = detail::rotation_by_diagonal_permutation()[detail::permutation_rank(p)];
  for (unsigned i = 0; i < 3; ++i) {
    cube[i] = rot.perm[i];
    const int s = swirl ? -rot.sign[i] : rot.sign[i];
    hollow[i] = s < 0 ? 1 : 0;
  }
}

}  // namespace groupset
