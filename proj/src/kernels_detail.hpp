#pragma once

#include <cstdint>

#include "halluc/kernels.hpp"

namespace halluc::detail {

void check_scan_range(const GroundTruth& truth, EnumIndex lo, EnumIndex hi);
void check_subset_sum_size(std::size_t count);
std::uint64_t checked_string_count(const TokenAlphabet& alphabet,
                                   std::size_t length);
Str string_at(const TokenAlphabet& alphabet, std::size_t length,
              std::uint64_t index);

}  // namespace halluc::detail
