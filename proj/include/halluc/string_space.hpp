#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace halluc {

using Str = std::string;
using EnumIndex = std::uint64_t;

/// Ordered alphabet of single-character tokens.
///
/// Enumeration order over the induced string space is shortlex: shorter
/// strings first, equal lengths ordered by token position with the leftmost
/// position most significant. The empty string occupies index 0 unless the
/// alphabet is constructed with include_empty = false, in which case the
/// enumeration starts at the first one-token string.
class TokenAlphabet {
 public:
  explicit TokenAlphabet(std::string tokens, bool include_empty = true);

  std::size_t size() const { return tokens_.size(); }
  char token(std::size_t pos) const { return tokens_[pos]; }
  const std::string& tokens() const { return tokens_; }
  bool includes_empty() const { return include_empty_; }

  std::optional<std::size_t> position(char token) const;
  bool contains(const Str& s) const;

 private:
  std::string tokens_;
  bool include_empty_;
  std::array<std::int16_t, 256> pos_{};
};

/// Returns the index-th string of the shortlex enumeration.
Str enumerate_string(EnumIndex index, const TokenAlphabet& alphabet);

/// Inverse of enumerate_string. Throws std::invalid_argument when s contains
/// a symbol outside the alphabet, or when s is empty and the alphabet
/// excludes the empty string. Throws std::overflow_error when the index does
/// not fit in 64 bits.
EnumIndex string_index(const Str& s, const TokenAlphabet& alphabet);

/// Cantor pairing k = (i+j)(i+j+1)/2 + j. Overflow throws, never wraps.
std::uint64_t cantor_pair(std::uint64_t i, std::uint64_t j);
std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k);

/// Successor in enumeration order. Strings that are not part of the
/// enumeration (foreign symbol, or excluded empty string) map to the first
/// enumerated string, which always differs from them.
Str delta_next(const Str& s, const TokenAlphabet& alphabet);

/// Least enumerated string not contained in avoid.
Str delta_avoiding(const std::set<Str>& avoid, const TokenAlphabet& alphabet);

/// Binary numeral over {a, b} with a = 1 and b = 0; zero encodes as "b" and
/// canonical encodings of positive numbers carry no leading "b".
Str encode_binary_ab(std::uint64_t n);

/// Positional decode. Accepts non-canonical leading-"b" forms; rejects the
/// empty string and foreign symbols, and values beyond 64 bits.
std::uint64_t decode_binary_ab(const Str& s);

}  // namespace halluc
