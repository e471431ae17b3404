#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace groupset::gf2 {

// Rank over GF(2) of row vectors packed into 64-bit masks (xor basis by leading bit).
inline unsigned rank(std::span<const std::uint64_t> rows) {
  std::uint64_t basis[64] = {};
  unsigned r = 0;
  for (std::uint64_t v : rows) {
    while (v) {
      const int top = 63 - std::countl_zero(v);
      if (!basis[top]) {
        basis[top] = v;
        ++r;
        break;
      }
      v ^= basis[top];
    }
  }
  return r;
}

// Some non-empty subset xors to zero.
inline bool dependent(std::span<const std::uint64_t> rows) { return rank(rows) < rows.size(); }

}  // namespace groupset::gf2
