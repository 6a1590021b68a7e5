#include "halluc/string_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace halluc {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) {
    throw std::overflow_error("64-bit overflow in index arithmetic");
  }
  return r;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw std::overflow_error("64-bit overflow in index arithmetic");
  }
  return r;
}

}  // namespace

TokenAlphabet::TokenAlphabet(std::string tokens, bool include_empty)
    : tokens_(std::move(tokens)), include_empty_(include_empty) {
  if (tokens_.empty()) {
    throw std::invalid_argument("alphabet needs at least one token");
  }
  pos_.fill(-1);
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto c = static_cast<unsigned char>(tokens_[i]);
    if (pos_[c] != -1) {
      throw std::invalid_argument("alphabet tokens must be distinct");
    }
    pos_[c] = static_cast<std::int16_t>(i);
  }
}

std::optional<std::size_t> TokenAlphabet::position(char token) const {
  auto p = pos_[static_cast<unsigned char>(token)];
  if (p < 0) return std::nullopt;
  return static_cast<std::size_t>(p);
}

bool TokenAlphabet::contains(const Str& s) const {
  return std::all_of(s.begin(), s.end(),
                     [this](char c) { return position(c).has_value(); });
}

// Shortlex enumeration including the empty string is exactly bijective
// base-N numbering: rank 0 is the empty string, and rank k >= 1 is written
// with digits 1..N mapped onto token positions 0..N-1.
Str enumerate_string(EnumIndex index, const TokenAlphabet& alphabet) {
  std::uint64_t rank = index;
  if (!alphabet.includes_empty()) {
    rank = checked_add(rank, 1);
  }
  if (rank == 0) return {};
  const std::uint64_t n = alphabet.size();
  if (n == 1) {
    return Str(static_cast<std::size_t>(rank), alphabet.token(0));
  }
  Str out;
  while (rank > 0) {
    rank -= 1;
    out.push_back(alphabet.token(static_cast<std::size_t>(rank % n)));
    rank /= n;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

EnumIndex string_index(const Str& s, const TokenAlphabet& alphabet) {
  if (s.empty() && !alphabet.includes_empty()) {
    throw std::invalid_argument("empty string is excluded from enumeration");
  }
  const std::uint64_t n = alphabet.size();
  std::uint64_t rank = 0;
  for (char c : s) {
    auto p = alphabet.position(c);
    if (!p) {
      throw std::invalid_argument("symbol not in alphabet");
    }
    rank = checked_add(checked_mul(rank, n), *p + 1);
  }
  if (!alphabet.includes_empty()) {
    rank -= 1;
  }
  return rank;
}

std::uint64_t cantor_pair(std::uint64_t i, std::uint64_t j) {
  std::uint64_t s = checked_add(i, j);
  // s*(s+1)/2 computed without intermediate overflow: one factor is even.
  std::uint64_t tri = (s % 2 == 0) ? checked_mul(s / 2, s + 1)
                                   : checked_mul((s + 1) / 2, s);
  return checked_add(tri, j);
}

std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k) {
  // w = floor((sqrt(8k + 1) - 1) / 2), with fix-up since long double
  // arithmetic is only a seed.
  long double kd = static_cast<long double>(k);
  std::uint64_t w = static_cast<std::uint64_t>(
      std::floor((std::sqrt(8.0L * kd + 1.0L) - 1.0L) / 2.0L));
  auto tri = [](std::uint64_t x) { return (x % 2 == 0) ? (x / 2) * (x + 1) : ((x + 1) / 2) * x; };
  while (w > 0 && tri(w) > k) --w;
  while (tri(w + 1) <= k) ++w;
  std::uint64_t t = tri(w);
  std::uint64_t j = k - t;
  std::uint64_t i = w - j;
  return {i, j};
}

Str delta_next(const Str& s, const TokenAlphabet& alphabet) {
  if (!alphabet.contains(s) || (s.empty() && !alphabet.includes_empty())) {
    return enumerate_string(0, alphabet);
  }
  // Shortlex successor, computed on the string itself so inputs of any
  // length work: bump the rightmost non-maximal token and reset everything
  // to its right; an all-maximal string rolls over to the next length.
  Str out = s;
  const std::size_t n = alphabet.size();
  std::size_t pos = out.size();
  while (pos > 0) {
    --pos;
    std::size_t p = *alphabet.position(out[pos]);
    if (p + 1 < n) {
      out[pos] = alphabet.token(p + 1);
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(pos) + 1, out.end(),
                alphabet.token(0));
      return out;
    }
  }
  return Str(out.size() + 1, alphabet.token(0));
}

Str delta_avoiding(const std::set<Str>& avoid, const TokenAlphabet& alphabet) {
  for (EnumIndex k = 0;; ++k) {
    Str cand = enumerate_string(k, alphabet);
    if (avoid.find(cand) == avoid.end()) return cand;
  }
}

Str encode_binary_ab(std::uint64_t n) {
  if (n == 0) return "b";
  Str out;
  bool started = false;
  for (int bit = 63; bit >= 0; --bit) {
    bool one = (n >> bit) & 1u;
    if (one) started = true;
    if (started) out.push_back(one ? 'a' : 'b');
  }
  return out;
}

std::uint64_t decode_binary_ab(const Str& s) {
  if (s.empty()) {
    throw std::invalid_argument("empty string is not a numeral");
  }
  std::uint64_t v = 0;
  for (char c : s) {
    if (c != 'a' && c != 'b') {
      throw std::invalid_argument("numeral symbols must be a or b");
    }
    v = checked_add(checked_mul(v, 2), c == 'a' ? 1 : 0);
  }
  return v;
}

}  // namespace halluc
