#pragma once

#include <cstdint>
#include <vector>

#include "halluc/ground_truth.hpp"
#include "halluc/learners.hpp"
#include "halluc/string_space.hpp"

namespace halluc {

/// True when this build runs the _omp kernels with OpenMP; they fall back to
/// the serial code path otherwise.
bool kernels_parallel_enabled();

/// Indices i in [lo, hi) where the state's answer differs from the frozen
/// truth value, ascending. The truth prefix must already be frozen through
/// hi (std::logic_error otherwise); the scan itself never mutates the truth,
/// which is what makes the parallel variant safe.
std::vector<EnumIndex> disagreement_scan_serial(const LearnerState& state,
                                                const GroundTruth& truth,
                                                EnumIndex lo, EnumIndex hi);
std::vector<EnumIndex> disagreement_scan_omp(const LearnerState& state,
                                             const GroundTruth& truth,
                                             EnumIndex lo, EnumIndex hi);

/// Exact subset-sum decision (empty subset included, so target 0 is always
/// reachable). Items may be negative; sums are tracked in 128 bits. Both
/// variants are exhaustive and cap the instance size at 62 items.
bool subset_sum_serial(const std::vector<std::int64_t>& items,
                       std::int64_t target);
bool subset_sum_omp(const std::vector<std::int64_t>& items,
                    std::int64_t target);

/// All strings of exactly the given length over the alphabet's tokens, in
/// lexicographic token order (the shortlex order restricted to one length).
/// Throws std::overflow_error when the count does not fit in 64 bits and
/// std::length_error above 2^24 strings.
std::vector<Str> strings_of_length_serial(const TokenAlphabet& alphabet,
                                          std::size_t length);
std::vector<Str> strings_of_length_omp(const TokenAlphabet& alphabet,
                                       std::size_t length);

}  // namespace halluc
