#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace groupset {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A group specification is malformed (bad atom parameter, empty product, ...).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// The group would be larger than the configured order cap.
class CapExceeded : public Error {
 public:
  CapExceeded(std::uint64_t cap)
      : Error("group order exceeds cap of " + std::to_string(cap)), cap_(cap) {}

  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t cap_;
};

// Group expression text failed to parse. `offset` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset), reason_(what) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

// An element was used with a group it does not belong to.
class ElementMismatch : public Error {
 public:
  using Error::Error;
};

// A rule was applied to a card tuple of the wrong size, or with repeated cards.
class RuleError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied parameter is out of range (table larger than the deck, zero trials, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Lookup of an unknown variant, card, player or session.
class NotFound : public Error {
 public:
  using Error::Error;
};

// An operation that is well-formed but not allowed in the current state.
class Conflict : public Error {
 public:
  using Error::Error;
};

// A game action that is well-formed but against the rules, e.g. dealing extra cards in
// strict mode while a set is on the table. `reason` is a short machine-readable tag.
class RuleViolation : public Error {
 public:
  RuleViolation(const std::string& reason, const std::string& what) : Error(what), reason_(reason) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

// A session log that cannot be replayed. `seq` is the first event that failed to apply.
class ReplayDivergence : public Error {
 public:
  ReplayDivergence(std::uint64_t seq, const std::string& what)
      : Error("replay diverged at event " + std::to_string(seq) + ": " + what), seq_(seq) {}

  std::uint64_t seq() const noexcept { return seq_; }

 private:
  std::uint64_t seq_;
};

}  // namespace groupset
