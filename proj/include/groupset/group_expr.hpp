#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "groupset/errors.hpp"
#include "groupset/group_spec.hpp"

// Text syntax for group specifications.
//
//   expr    := wreath ( 'x' wreath )*          direct product, one flat factor list
//   wreath  := power ( 'wr' 'S'<n> )*          base wr S_n, left-associative
//   power   := primary ( '^' ( <k> | '(' <k> ')' ) )*   binds tightest
//   primary := 'C'<n> | 'S'<n> | 'A'<n> | '(' expr ')'
//
// Atoms and operators are case-insensitive; whitespace is ignored between tokens.
// Examples: "C3^4", "C2 wr S3", "C2 x S4", "(C2 x C3)^2".

namespace groupset {

namespace detail {

class GroupExprParser {
 public:
  GroupExprParser(std::string_view text, std::uint64_t cap) : text_(text), cap_(cap) {}

  GroupSpec parse() {
    GroupSpec spec = parse_product();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected input");
    (void)groupset::order(spec, cap_);  // throws CapExceeded
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek_lower() {
    skip_ws();
    if (pos_ >= text_.size()) return '\0';
    return static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
  }

  bool at_keyword_wr() {
    skip_ws();
    if (pos_ + 1 >= text_.size()) return false;
    return std::tolower(static_cast<unsigned char>(text_[pos_])) == 'w' &&
           std::tolower(static_cast<unsigned char>(text_[pos_ + 1])) == 'r';
  }

  unsigned parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<unsigned>(text_[pos_] - '0');
      if (v > 0xFFFFFFFFull) {
        pos_ = start;
        fail("number too large");
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected a number");
    return static_cast<unsigned>(v);
  }

  GroupSpec parse_product() {
    std::vector<GroupSpec> factors;
    factors.push_back(parse_wreath());
    while (peek_lower() == 'x') {
      ++pos_;
      factors.push_back(parse_wreath());
    }
    if (factors.size() == 1) return std::move(factors[0]);
    return GroupSpec::direct_product(std::move(factors));
  }

  GroupSpec parse_wreath() {
    GroupSpec base = parse_power();
    while (at_keyword_wr()) {
      pos_ += 2;
      skip_ws();
      const std::size_t at = pos_;
      if (peek_lower() != 's') fail("wreath right operand must be S<n>");
      ++pos_;
      const unsigned n = parse_number();
      if (n < 1) {
        pos_ = at;
        fail("wreath degree must be >= 1");
      }
      base = GroupSpec::wreath(std::move(base), n);
      // A power after the top group would bind to S<n> alone, which is not a wreath operand.
      if (peek_lower() == '^') fail("wreath right operand must be S<n>");
    }
    return base;
  }

  GroupSpec parse_power() {
    GroupSpec base = parse_primary();
    while (peek_lower() == '^') {
      ++pos_;
      const std::size_t at = pos_;
      const bool grouped = peek_lower() == '(';
      if (grouped) ++pos_;
      const unsigned k = parse_number();
      if (grouped) {
        if (peek_lower() != ')') fail("expected ')'");
        ++pos_;
      }
      if (k < 1) {
        pos_ = at;
        fail("exponent must be >= 1");
      }
      base = GroupSpec::power(std::move(base), k);
    }
    return base;
  }

  GroupSpec parse_primary() {
    const char c = peek_lower();
    const std::size_t at = pos_;
    if (c == '(') {
      ++pos_;
      GroupSpec inner = parse_product();
      if (peek_lower() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (c == 'c' || c == 's' || c == 'a') {
      ++pos_;
      const unsigned n = parse_number();
      if (c == 'c') {
        if (n < 1) {
          pos_ = at;
          fail("unsupported atom C0");
        }
        return GroupSpec::cyclic(n);
      }
      if (c == 's') {
        if (n < 1) {
          pos_ = at;
          fail("unsupported atom S0");
        }
        return GroupSpec::symmetric(n);
      }
      if (n < 3) {
        pos_ = at;
        fail("unsupported atom A" + std::to_string(n));
      }
      return GroupSpec::alternating(n);
    }
    if (c == '\0') fail("unexpected end of input");
    fail("expected a group atom or '('");
  }

  std::string_view text_;
  std::uint64_t cap_;
  std::size_t pos_ = 0;
};

inline int precedence(const GroupSpec& s) {
  switch (s.kind) {
    case GroupSpec::Kind::DirectProduct:
      return 0;
    case GroupSpec::Kind::Wreath:
      return 1;
    case GroupSpec::Kind::Power:
      return 2;
    default:
      return 3;
  }
}

inline void print_into(const GroupSpec& s, std::string& out) {
  using K = GroupSpec::Kind;
  auto child = [&out](const GroupSpec& c, int min_prec) {
    if (precedence(c) < min_prec) {
      out += '(';
      print_into(c, out);
      out += ')';
    } else {
      print_into(c, out);
    }
  };
  switch (s.kind) {
    case K::Cyclic:
      out += "C" + std::to_string(s.param);
      return;
    case K::Symmetric:
      out += "S" + std::to_string(s.param);
      return;
    case K::Alternating:
      out += "A" + std::to_string(s.param);
      return;
    case K::DirectProduct:
      for (std::size_t i = 0; i < s.children.size(); ++i) {
        if (i) out += " x ";
        // A nested product must stay grouped, otherwise it would flatten on re-parse.
        child(s.children[i], 1);
      }
      return;
    case K::Power:
      child(s.children[0], 2);
      out += "^" + std::to_string(s.param);
      return;
    case K::Wreath:
      child(s.children[0], 1);
      out += " wr S" + std::to_string(s.param);
      return;
  }
}

}  // namespace detail

// Parses group expression text. Throws ParseError (with byte offset) or CapExceeded.
inline GroupSpec parse_group_expr(std::string_view text, std::uint64_t cap = kDefaultOrderCap) {
  return detail::GroupExprParser(text, cap).parse();
}

// Canonical text for a spec; parse_group_expr(print_group_expr(s)) == s.
inline std::string print_group_expr(const GroupSpec& spec) {
  std::string out;
  detail::print_into(spec, out);
  return out;
}

}  // namespace groupset
