#include <atomic>

#include "halluc/kernels.hpp"
#include "kernels_detail.hpp"

#if defined(HALLUC_HAVE_OPENMP)
#include <omp.h>
#endif

namespace halluc {

bool kernels_parallel_enabled() {
#if defined(HALLUC_HAVE_OPENMP)
  return true;
#else
  return false;
#endif
}

#if defined(HALLUC_HAVE_OPENMP)

std::vector<EnumIndex> disagreement_scan_omp(const LearnerState& state,
                                             const GroundTruth& truth,
                                             EnumIndex lo, EnumIndex hi) {
  detail::check_scan_range(truth, lo, hi);
  const std::int64_t n = static_cast<std::int64_t>(hi - lo);
  std::vector<char> mismatch(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t t = 0; t < n; ++t) {
    EnumIndex i = lo + static_cast<EnumIndex>(t);
    if (state.answer(truth.prompt_at(i)) != truth.frozen_value(i)) {
      mismatch[static_cast<std::size_t>(t)] = 1;
    }
  }
  std::vector<EnumIndex> out;
  for (std::int64_t t = 0; t < n; ++t) {
    if (mismatch[static_cast<std::size_t>(t)]) {
      out.push_back(lo + static_cast<EnumIndex>(t));
    }
  }
  return out;
}

bool subset_sum_omp(const std::vector<std::int64_t>& items,
                    std::int64_t target) {
  detail::check_subset_sum_size(items.size());
  const std::uint64_t masks = std::uint64_t{1} << items.size();
  std::atomic<bool> found{false};
#pragma omp parallel for schedule(static)
  for (std::int64_t m = 0; m < static_cast<std::int64_t>(masks); ++m) {
    if (found.load(std::memory_order_relaxed)) continue;
    __int128 sum = 0;
    std::uint64_t bits = static_cast<std::uint64_t>(m);
    while (bits) {
      unsigned b = static_cast<unsigned>(__builtin_ctzll(bits));
      sum += items[b];
      bits &= bits - 1;
    }
    if (sum == target) found.store(true, std::memory_order_relaxed);
  }
  return found.load();
}

std::vector<Str> strings_of_length_omp(const TokenAlphabet& alphabet,
                                       std::size_t length) {
  if (alphabet.size() == 0 && length > 0) return {};
  const std::uint64_t count = detail::checked_string_count(alphabet, length);
  std::vector<Str> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    out[static_cast<std::size_t>(i)] =
        detail::string_at(alphabet, length, static_cast<std::uint64_t>(i));
  }
  return out;
}

#else  // fallbacks without OpenMP

std::vector<EnumIndex> disagreement_scan_omp(const LearnerState& state,
                                             const GroundTruth& truth,
                                             EnumIndex lo, EnumIndex hi) {
  return disagreement_scan_serial(state, truth, lo, hi);
}

bool subset_sum_omp(const std::vector<std::int64_t>& items,
                    std::int64_t target) {
  return subset_sum_serial(items, target);
}

std::vector<Str> strings_of_length_omp(const TokenAlphabet& alphabet,
                                       std::size_t length) {
  return strings_of_length_serial(alphabet, length);
}

#endif

}  // namespace halluc
