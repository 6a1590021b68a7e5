#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halluc/learners.hpp"
#include "halluc/registry.hpp"
#include "halluc/string_space.hpp"

using namespace halluc;

namespace {

const TokenAlphabet kAb("ab");

StatePtr trained(const FamilyPtr& family, const std::vector<Sample>& samples) {
  return train_on_samples(*family, 0, samples);
}

// Reference n-gram count table built by a direct scan, independent of the
// incremental update path in the library.
std::map<std::string, std::map<int, std::uint64_t>> reference_counts(
    const std::vector<Sample>& samples, unsigned order) {
  std::map<std::string, std::map<int, std::uint64_t>> table;
  for (const auto& s : samples) {
    std::string w = s.prompt + s.completion;
    for (std::size_t t = 0; t <= w.size(); ++t) {
      std::size_t clen = std::min<std::size_t>(order, t);
      std::string ctx = w.substr(t - clen, clen);
      int next = t == w.size() ? NgramCounts::kStop
                               : static_cast<unsigned char>(w[t]);
      table[ctx][next] += 1;
    }
  }
  return table;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TEST_CASE("memorizer answers from its table and falls back to the default") {
  auto fam = make_memorizer("unknown");
  auto s0 = fam->initial_state(0);
  CHECK(s0->answer("ab") == "unknown");

  auto s1 = learner_update(s0, {"ab", "ba"});
  CHECK(s1->answer("ab") == "ba");
  CHECK(s1->answer("zz") == "unknown");
  // The pre-update state is unaffected.
  CHECK(s0->answer("ab") == "unknown");

  SUBCASE("re-showing a known pair reports no change") {
    auto r = s1->updated({"ab", "ba"});
    CHECK_FALSE(r.changed);
    auto r2 = s1->updated({"ab", "bb"});
    CHECK(r2.changed);
    CHECK(r2.state->answer("ab") == "bb");
  }

  SUBCASE("samples_consumed counts every sample, changed or not") {
    auto s2 = learner_update(s1, {"ab", "ba"});
    CHECK(s2->samples_consumed() == 2);
  }
}

TEST_CASE("constant learner ignores training and costs exactly one tick") {
  auto fam = make_constant("yes");
  auto s = fam->initial_state(7);
  CHECK(fam->ignores_samples());

  auto r = s->updated({"anything", "at all"});
  CHECK_FALSE(r.changed);
  CHECK(r.state->answer("q") == "yes");

  TickMeter meter(1);
  CHECK(s->answer("a very long prompt indeed", meter) == "yes");
  CHECK(meter.used() == 1);

  TickMeter zero(0);
  CHECK_THROWS_AS(s->answer("q", zero), TickLimitExceeded);

  SUBCASE("fits any linear budget") {
    StepBudget linear({1, 1});
    for (std::size_t m : {0u, 1u, 5u, 300u}) {
      std::string prompt(m, 'a');
      auto out = budget_guarded_answer(*s, prompt, linear);
      REQUIRE(out.kind == AnswerOutcome::Kind::answer);
      CHECK(out.text == "yes");
    }
  }
}

TEST_CASE("echo returns the prompt and costs 1 + length ticks") {
  auto fam = make_echo();
  auto s = fam->initial_state(0);
  for (std::size_t m : {0u, 1u, 4u, 100u}) {
    std::string prompt;
    for (std::size_t i = 0; i < m; ++i) prompt.push_back(i % 2 ? 'b' : 'a');
    TickMeter meter;
    CHECK(s->answer(prompt, meter) == prompt);
    CHECK(meter.used() == 1 + prompt.size());
  }
}

TEST_CASE("step budgets are clamped below at one and reject all-zero tables") {
  CHECK_THROWS_AS(StepBudget({}), std::invalid_argument);
  CHECK_THROWS_AS(StepBudget({0, 0, 0}), std::invalid_argument);

  StepBudget quadratic({0, 0, 10});
  CHECK(quadratic(0) == 1);
  CHECK(quadratic(1) == 10);
  CHECK(quadratic(2) == 40);
  CHECK(quadratic(12) == 1440);

  StepBudget affine({3, 2});
  CHECK(affine(0) == 3);
  CHECK(affine(10) == 23);

  // Saturating evaluation never wraps.
  StepBudget huge({UINT64_MAX, UINT64_MAX});
  CHECK(huge(UINT64_MAX) == UINT64_MAX);
}

TEST_CASE("untrained n-gram greedily emits the first alphabet token") {
  auto fam = make_ngram(kAb, 2, 64);
  auto s = fam->initial_state(0);
  CHECK(s->answer("ab") == std::string(64, 'a'));
  CHECK(s->answer("") == std::string(64, 'a'));
}

TEST_CASE("order-3 n-gram trained on aaab completes aa with exactly ab") {
  auto fam = make_ngram(kAb, 3, 64);
  auto s = trained(fam, {{"", "aaab"}});
  CHECK(s->answer("aa") == "ab");
  // Feeding the whole training word continues with nothing: the final
  // context has only the stop mark recorded.
  CHECK(s->answer("aaab") == "");
}

TEST_CASE("order-3 n-gram trained on abab completes ab with ab then stops") {
  auto fam = make_ngram(kAb, 3, 64);
  auto s = trained(fam, {{"", "abab"}});
  CHECK(s->answer("ab") == "ab");
}

TEST_CASE("n-gram count table matches an independent scan") {
  SUBCASE("single three-token sample at order 2") {
    auto fam = make_ngram(kAb, 2, 64);
    auto s = trained(fam, {{"a", "bb"}});
    const NgramCounts* counts = ngram_counts(*s);
    REQUIRE(counts != nullptr);
    // Word "abb": one count each for "" -> a, "a" -> b, "ab" -> b,
    // "bb" -> stop.
    CHECK(counts->table.size() == 4);
    CHECK(counts->table.at("").at('a') == 1);
    CHECK(counts->table.at("a").at('b') == 1);
    CHECK(counts->table.at("ab").at('b') == 1);
    CHECK(counts->table.at("bb").at(NgramCounts::kStop) == 1);
  }

  SUBCASE("random corpora at several orders") {
    for (unsigned order : {1u, 2u, 3u}) {
      for (std::uint64_t trial = 0; trial < 20; ++trial) {
        std::vector<Sample> corpus;
        std::uint64_t h = mix(trial * 3 + order);
        std::size_t n = 1 + h % 5;
        for (std::size_t k = 0; k < n; ++k) {
          std::string w;
          std::uint64_t g = mix(h + k);
          std::size_t len = g % 7;
          for (std::size_t i = 0; i < len; ++i) {
            w.push_back((mix(g + i) & 1) ? 'b' : 'a');
          }
          std::size_t cut = w.empty() ? 0 : mix(g ^ 0xf00d) % (w.size() + 1);
          corpus.push_back({w.substr(0, cut), w.substr(cut)});
        }
        auto fam = make_ngram(kAb, order, 64);
        auto s = trained(fam, corpus);
        const NgramCounts* counts = ngram_counts(*s);
        REQUIRE(counts != nullptr);
        auto want = reference_counts(corpus, order);
        REQUIRE(counts->table.size() == want.size());
        for (const auto& [ctx, row] : want) {
          auto it = counts->table.find(ctx);
          REQUIRE(it != counts->table.end());
          CHECK(std::map<int, std::uint64_t>(it->second.begin(),
                                             it->second.end()) == row);
        }
      }
    }
  }
}

TEST_CASE("ngram_complete rejects non-n-gram states") {
  auto echo = make_echo()->initial_state(0);
  CHECK_THROWS_AS(ngram_complete(*echo, "ab"), std::invalid_argument);
  auto ng = make_ngram(kAb, 2, 8)->initial_state(0);
  CHECK(ngram_complete(*ng, "") == std::string(8, 'a'));
}

TEST_CASE("lister enumerates all strings of the prompt's length") {
  auto fam = make_lister(kAb, 65536);
  auto s = fam->initial_state(0);
  CHECK(s->answer("") == "");
  CHECK(s->answer("x") == "a,b");
  CHECK(s->answer("ab") == "aa,ab,ba,bb");
  CHECK(s->answer("zzz") == "aaa,aab,aba,abb,baa,bab,bba,bbb");

  SUBCASE("tick count is one probe plus one per output character") {
    TickMeter meter;
    std::string out = s->answer("ab", meter);
    CHECK(out.size() == 11);
    CHECK(meter.used() == 12);
  }

  SUBCASE("the character cap truncates instead of diverging") {
    auto small = make_lister(kAb, 5)->initial_state(0);
    std::string out = small->answer("ab");
    CHECK(out.size() <= 6);
    CHECK(out.substr(0, 5) == "aa,ab");
  }
}

TEST_CASE("lister under a quadratic budget: correct for small prompts, "
          "budget-limited for large ones") {
  StepBudget budget({0, 0, 10});
  auto fam = make_lister(kAb, 1 << 20);
  auto s = fam->initial_state(0);

  for (std::size_t m = 0; m <= 3; ++m) {
    std::string prompt(m, 'a');
    auto out = budget_guarded_answer(*s, prompt, budget);
    REQUIRE(out.kind == AnswerOutcome::Kind::answer);
    // Cross-check against the string enumerator: the answer lists exactly
    // the length-m block in order.
    std::uint64_t lo = m == 0 ? 0 : string_index(std::string(m, 'a'), kAb);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < m; ++i) count *= 2;
    std::string joined;
    for (std::uint64_t i = 0; i < count; ++i) {
      if (i) joined.push_back(',');
      joined += enumerate_string(lo + i, kAb);
    }
    CHECK(out.text == joined);
  }

  bool exceeded = false;
  std::size_t first_fail = 0;
  for (std::size_t m = 4; m <= 14 && !exceeded; ++m) {
    std::string prompt(m, 'a');
    auto out = budget_guarded_answer(*s, prompt, budget);
    if (out.kind == AnswerOutcome::Kind::budget_exceeded) {
      exceeded = true;
      first_fail = m;
    }
  }
  CHECK(exceeded);
  // 2^m tokens of m characters plus separators outgrow 10 m^2 by m = 12 at
  // the latest.
  CHECK(first_fail <= 12);

  SUBCASE("a pointwise larger budget keeps every success") {
    StepBudget bigger({100, 100, 100});
    for (std::size_t m = 0; m <= 3; ++m) {
      std::string prompt(m, 'a');
      auto a = budget_guarded_answer(*s, prompt, budget);
      auto b = budget_guarded_answer(*s, prompt, bigger);
      REQUIRE(a.kind == AnswerOutcome::Kind::answer);
      REQUIRE(b.kind == AnswerOutcome::Kind::answer);
      CHECK(a.text == b.text);
    }
  }
}

TEST_CASE("order-facts learner answers by transitive closure of yes facts") {
  auto fam = make_order_facts();
  auto s = trained(fam, {{"a$b", "yes"}, {"b$c", "yes"}, {"x$y", "no"}});
  CHECK(s->answer("a$b") == "yes");
  CHECK(s->answer("b$c") == "yes");
  CHECK(s->answer("a$c") == "yes");
  CHECK(s->answer("c$a") == "no");
  CHECK(s->answer("a$a") == "no");
  CHECK(s->answer("x$y") == "no");
  CHECK(s->answer("no dollar here") == "N");
  CHECK(s->answer("too$many$dollars") == "N");
}

TEST_CASE("every zoo learner is total over arbitrary prompts") {
  auto zoo = default_zoo(kAb);
  REQUIRE(zoo.size() == 8);
  std::vector<Sample> warmup = {{"a", "b"}, {"ab$b", "yes"}, {"", "ab"}};
  for (const auto& fam : zoo) {
    auto s = trained(fam, warmup);
    for (std::size_t len : {0u, 1u, 2u, 7u, 64u, 256u}) {
      std::string prompt;
      for (std::size_t i = 0; i < len; ++i) {
        std::uint64_t g = mix(len * 1000 + i);
        char c = "ab$xyz 0"[g % 8];
        prompt.push_back(c);
      }
      // The unmetered wrapper must always produce a string.
      std::string a1 = s->answer(prompt);
      std::string a2 = s->answer(prompt);
      CHECK(a1 == a2);
      // The guarded wrapper must never throw, whatever the budget.
      StepBudget tight({1});
      auto out = budget_guarded_answer(*s, prompt, tight);
      bool ok = out.kind == AnswerOutcome::Kind::answer ||
                out.kind == AnswerOutcome::Kind::budget_exceeded ||
                out.kind == AnswerOutcome::Kind::refused;
      CHECK(ok);
    }
  }
}

TEST_CASE("answers are deterministic and states are immutable") {
  auto zoo = default_zoo(kAb);
  std::vector<Sample> corpus = {{"aa", "b"}, {"a$b", "yes"}, {"", "abba"}};
  for (const auto& fam : zoo) {
    auto base = fam->initial_state(3);
    auto s = train_on_samples(*fam, 3, corpus);
    std::string before = s->answer("aa");
    // Updating returns a new state and leaves the original intact.
    auto r = s->updated({"aa", "aaaa"});
    CHECK(r.state->samples_consumed() == s->samples_consumed() + 1);
    CHECK(s->answer("aa") == before);
    for (int k = 0; k < 3; ++k) CHECK(s->answer("aa") == before);
    CHECK(base->seed() == 3);
    CHECK(s->seed() == 3);
  }
}

TEST_CASE("stream training equals a fold of single-sample updates") {
  auto zoo = default_zoo(kAb);
  std::vector<Sample> corpus = {
      {"ab", "ba"}, {"b$a", "yes"}, {"", "bab"}, {"ab", "ab"}, {"a$c", "yes"}};
  std::vector<std::string> probes = {"", "a", "ab", "ba", "a$c", "b$c", "zq"};
  for (const auto& fam : zoo) {
    std::size_t pos = 0;
    auto streamed = train_on_stream(*fam, 11, [&]() -> std::optional<Sample> {
      if (pos >= corpus.size()) return std::nullopt;
      return corpus[pos++];
    });
    StatePtr folded = fam->initial_state(11);
    for (const auto& sample : corpus) folded = learner_update(folded, sample);
    CHECK(streamed->samples_consumed() == folded->samples_consumed());
    for (const auto& p : probes) CHECK(streamed->answer(p) == folded->answer(p));

    // Extending a trained state with the tail equals training on the whole.
    std::size_t cut = 2;
    StatePtr head =
        train_on_samples(*fam, 11, {corpus.begin(), corpus.begin() + cut});
    std::size_t tail_pos = cut;
    auto extended = extend_trained(head, [&]() -> std::optional<Sample> {
      if (tail_pos >= corpus.size()) return std::nullopt;
      return corpus[tail_pos++];
    });
    CHECK(extended->samples_consumed() == corpus.size());
    for (const auto& p : probes) CHECK(extended->answer(p) == folded->answer(p));
  }
}

TEST_CASE("family specs round-trip through the registry parser") {
  auto zoo = default_zoo(kAb);
  for (const auto& fam : zoo) {
    auto reparsed = parse_learner_spec(fam->spec(), kAb);
    CHECK(reparsed->spec() == fam->spec());
    // States created from the reparsed family report the same spec.
    CHECK(reparsed->initial_state(0)->family_spec() ==
          fam->initial_state(0)->family_spec());
  }
  CHECK_THROWS_AS(parse_learner_spec("nonsense", kAb), std::invalid_argument);
  CHECK_THROWS_AS(parse_learner_spec("ngram:order=0", kAb),
                  std::invalid_argument);
}

TEST_CASE("capability flags match family behavior") {
  auto zoo = default_zoo(kAb);
  for (const auto& fam : zoo) {
    if (!fam->ignores_samples()) continue;
    auto fresh = fam->initial_state(5);
    auto fed = train_on_samples(*fam, 5, {{"a", "b"}, {"b", "a"}});
    for (const std::string p : {"", "a", "ab", "ba"}) {
      CHECK(fresh->answer(p) == fed->answer(p));
    }
  }
}
