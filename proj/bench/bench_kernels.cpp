// Timing comparison of the serial reference kernels against the OpenMP
// variants. Correctness equivalence lives in the test suite; this binary
// only reports wall times (speedups depend on the core count of the host).

#include <chrono>
#include <cstdio>
#include <functional>

#include "halluc/adversaries.hpp"
#include "halluc/kernels.hpp"
#include "halluc/registry.hpp"
#include "halluc/tasks.hpp"

using namespace halluc;

namespace {

double time_ms(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void row(const char* name, double serial_ms, double omp_ms) {
  std::printf("%-28s %12.2f %12.2f %10.2fx\n", name, serial_ms, omp_ms,
              omp_ms > 0 ? serial_ms / omp_ms : 0.0);
}

}  // namespace

int main() {
  std::printf("parallel kernels enabled: %s\n\n",
              kernels_parallel_enabled() ? "yes" : "no");
  std::printf("%-28s %12s %12s %10s\n", "kernel", "serial (ms)", "omp (ms)",
              "ratio");

  const TokenAlphabet alphabet("ab");

  {
    auto truth = make_singleton_truth(make_memorizer(), alphabet);
    truth->freeze_prefix(4000);
    auto state = make_constant("yes")->initial_state(0);
    std::vector<EnumIndex> serial_out;
    std::vector<EnumIndex> omp_out;
    double s = time_ms([&] {
      serial_out = disagreement_scan_serial(*state, *truth, 0, 4000);
    });
    double p = time_ms(
        [&] { omp_out = disagreement_scan_omp(*state, *truth, 0, 4000); });
    row("disagreement_scan n=4000", s, p);
    if (serial_out != omp_out) {
      std::fprintf(stderr, "kernel outputs diverge\n");
      return 1;
    }
  }

  {
    // A "no" instance forces both variants through the full search space.
    std::vector<std::int64_t> items;
    std::uint64_t state = 12345;
    for (int i = 0; i < 22; ++i) {
      items.push_back(static_cast<std::int64_t>(2 + 2 * (splitmix64_next(state) % 40)));
    }
    const std::int64_t target = 1;  // odd, unreachable from even items
    bool serial_hit = true;
    bool omp_hit = true;
    double s = time_ms([&] { serial_hit = subset_sum_serial(items, target); });
    double p = time_ms([&] { omp_hit = subset_sum_omp(items, target); });
    row("subset_sum m=22 (no)", s, p);
    if (serial_hit || omp_hit) {
      std::fprintf(stderr, "unexpected subset-sum hit\n");
      return 1;
    }
  }

  {
    std::vector<Str> serial_out;
    std::vector<Str> omp_out;
    double s = time_ms(
        [&] { serial_out = strings_of_length_serial(alphabet, 12); });
    double p =
        time_ms([&] { omp_out = strings_of_length_omp(alphabet, 12); });
    row("strings_of_length m=12", s, p);
    if (serial_out != omp_out) {
      std::fprintf(stderr, "kernel outputs diverge\n");
      return 1;
    }
  }

  return 0;
}
