#include <stdexcept>

#include "halluc/kernels.hpp"
#include "kernels_detail.hpp"

namespace halluc {

namespace detail {

void check_scan_range(const GroundTruth& truth, EnumIndex lo, EnumIndex hi) {
  if (lo > hi) throw std::invalid_argument("scan range is inverted");
  if (hi > truth.frozen_prefix()) {
    throw std::logic_error("scan range exceeds the frozen truth prefix");
  }
}

void check_subset_sum_size(std::size_t count) {
  if (count > 62) {
    throw std::length_error("subset-sum instance exceeds 62 items");
  }
}

std::uint64_t checked_string_count(const TokenAlphabet& alphabet,
                                   std::size_t length) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (alphabet.size() != 0 &&
        count > UINT64_MAX / static_cast<std::uint64_t>(alphabet.size())) {
      throw std::overflow_error("string count exceeds 64 bits");
    }
    count *= static_cast<std::uint64_t>(alphabet.size());
  }
  if (count > (std::uint64_t{1} << 24)) {
    throw std::length_error("string enumeration exceeds 2^24 entries");
  }
  return count;
}

Str string_at(const TokenAlphabet& alphabet, std::size_t length,
              std::uint64_t index) {
  Str s(length, '\0');
  for (std::size_t p = length; p-- > 0;) {
    s[p] = alphabet.token(static_cast<std::size_t>(index % alphabet.size()));
    index /= alphabet.size();
  }
  return s;
}

}  // namespace detail

std::vector<EnumIndex> disagreement_scan_serial(const LearnerState& state,
                                                const GroundTruth& truth,
                                                EnumIndex lo, EnumIndex hi) {
  detail::check_scan_range(truth, lo, hi);
  std::vector<EnumIndex> out;
  for (EnumIndex i = lo; i < hi; ++i) {
    if (state.answer(truth.prompt_at(i)) != truth.frozen_value(i)) {
      out.push_back(i);
    }
  }
  return out;
}

namespace {

bool subset_sum_dfs(const std::vector<std::int64_t>& items, std::size_t idx,
                    __int128 sum, std::int64_t target) {
  if (idx == items.size()) return sum == target;
  return subset_sum_dfs(items, idx + 1, sum, target) ||
         subset_sum_dfs(items, idx + 1, sum + items[idx], target);
}

}  // namespace

bool subset_sum_serial(const std::vector<std::int64_t>& items,
                       std::int64_t target) {
  detail::check_subset_sum_size(items.size());
  return subset_sum_dfs(items, 0, 0, target);
}

std::vector<Str> strings_of_length_serial(const TokenAlphabet& alphabet,
                                          std::size_t length) {
  if (alphabet.size() == 0 && length > 0) return {};
  const std::uint64_t count = detail::checked_string_count(alphabet, length);
  std::vector<Str> out;
  out.reserve(static_cast<std::size_t>(count));
  // Odometer over token positions, least significant digit rightmost.
  std::vector<std::size_t> digits(length, 0);
  for (std::uint64_t produced = 0; produced < count; ++produced) {
    Str s(length, '\0');
    for (std::size_t p = 0; p < length; ++p) s[p] = alphabet.token(digits[p]);
    out.push_back(std::move(s));
    for (std::size_t p = length; p-- > 0;) {
      if (++digits[p] < alphabet.size()) break;
      digits[p] = 0;
    }
  }
  return out;
}

}  // namespace halluc
