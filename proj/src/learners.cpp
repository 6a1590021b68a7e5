#include "halluc/learners.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace halluc {

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_add_overflow(a, b, &r) ? UINT64_MAX : r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? UINT64_MAX : r;
}

}  // namespace

StepBudget::StepBudget(std::vector<std::uint64_t> coefficients)
    : coeffs_(std::move(coefficients)) {
  if (std::all_of(coeffs_.begin(), coeffs_.end(),
                  [](std::uint64_t c) { return c == 0; })) {
    throw std::invalid_argument(
        "budget polynomial needs a positive coefficient");
  }
}

std::uint64_t StepBudget::operator()(std::uint64_t length) const {
  std::uint64_t total = 0;
  std::uint64_t power = 1;
  for (std::size_t d = 0; d < coeffs_.size(); ++d) {
    total = sat_add(total, sat_mul(coeffs_[d], power));
    power = sat_mul(power, length);
  }
  return std::max<std::uint64_t>(total, 1);
}

Str LearnerState::answer(const Str& prompt) const {
  TickMeter unlimited;
  try {
    return answer(prompt, unlimited);
  } catch (const AnswerRefused&) {
    return "unknown";
  }
}

UpdateResult LearnerState::updated(const Sample& sample) const {
  std::unique_ptr<LearnerState> next = clone();
  bool changed = next->absorb(sample);
  next->consumed_ += 1;
  return {StatePtr(std::move(next)), changed};
}

StatePtr learner_update(const StatePtr& state, const Sample& sample) {
  return state->updated(sample).state;
}

Str learner_answer(const StatePtr& state, const Str& prompt) {
  return state->answer(prompt);
}

AnswerOutcome budget_guarded_answer(const LearnerState& state, const Str& prompt,
                                    const StepBudget& budget) {
  TickMeter meter(budget(prompt.size()));
  try {
    return AnswerOutcome::answer(state.answer(prompt, meter));
  } catch (const TickLimitExceeded&) {
    return AnswerOutcome::budget_exceeded();
  } catch (const AnswerRefused&) {
    return AnswerOutcome::refused();
  }
}

StatePtr train_on_stream(const LearnerFamily& family, std::uint64_t seed,
                         const std::function<std::optional<Sample>()>& next) {
  StatePtr initial = family.initial_state(seed);
  std::unique_ptr<LearnerState> work = initial->clone();
  while (auto s = next()) {
    work->absorb(*s);
    work->consumed_ += 1;
  }
  return StatePtr(std::move(work));
}

StatePtr extend_trained(const StatePtr& state,
                        const std::function<std::optional<Sample>()>& next) {
  std::unique_ptr<LearnerState> work = state->clone();
  while (auto s = next()) {
    work->absorb(*s);
    work->consumed_ += 1;
  }
  return StatePtr(std::move(work));
}

StatePtr train_on_samples(const LearnerFamily& family, std::uint64_t seed,
                          const std::vector<Sample>& samples) {
  std::size_t pos = 0;
  return train_on_stream(family, seed, [&]() -> std::optional<Sample> {
    if (pos >= samples.size()) return std::nullopt;
    return samples[pos++];
  });
}

namespace {

// ---------------------------------------------------------------------------
// Memorizer: exact lookup table with a fixed default answer.

class MemorizerState final : public LearnerState {
 public:
  MemorizerState(Str default_answer, std::uint64_t seed)
      : default_(std::move(default_answer)) {
    seed_ = seed;
  }

  std::string family_spec() const override {
    return "memorizer:default=" + default_;
  }

  Str answer(const Str& prompt, TickMeter& meter) const override {
    meter.tick();  // table probe
    auto it = table_.find(prompt);
    const Str& out = it == table_.end() ? default_ : it->second;
    meter.tick(out.size());
    return out;
  }

 protected:
  std::unique_ptr<LearnerState> clone() const override {
    return std::make_unique<MemorizerState>(*this);
  }

  bool absorb(const Sample& sample) override {
    auto it = table_.find(sample.prompt);
    if (it != table_.end() && it->second == sample.completion) return false;
    table_[sample.prompt] = sample.completion;
    return true;
  }

 private:
  Str default_;
  std::unordered_map<Str, Str> table_;
};

class MemorizerFamily final : public LearnerFamily {
 public:
  explicit MemorizerFamily(Str default_answer)
      : default_(std::move(default_answer)) {}
  std::string spec() const override { return "memorizer:default=" + default_; }
  StatePtr initial_state(std::uint64_t seed) const override {
    return std::make_shared<MemorizerState>(default_, seed);
  }
  bool order_insensitive() const override { return true; }

 private:
  Str default_;
};

// ---------------------------------------------------------------------------
// Constant answer.

class ConstantState final : public LearnerState {
 public:
  ConstantState(Str answer, std::uint64_t seed) : answer_(std::move(answer)) {
    seed_ = seed;
  }
  std::string family_spec() const override { return "const:answer=" + answer_; }
  Str answer(const Str&, TickMeter& meter) const override {
    meter.tick();  // one stored-string fetch
    return answer_;
  }

 protected:
  std::unique_ptr<LearnerState> clone() const override {
    return std::make_unique<ConstantState>(*this);
  }
  bool absorb(const Sample&) override { return false; }

 private:
  Str answer_;
};

class ConstantFamily final : public LearnerFamily {
 public:
  explicit ConstantFamily(Str answer) : answer_(std::move(answer)) {}
  std::string spec() const override { return "const:answer=" + answer_; }
  StatePtr initial_state(std::uint64_t seed) const override {
    return std::make_shared<ConstantState>(answer_, seed);
  }
  bool ignores_samples() const override { return true; }
  bool order_insensitive() const override { return true; }

 private:
  Str answer_;
};

// ---------------------------------------------------------------------------
// Echo.

class EchoState final : public LearnerState {
 public:
  explicit EchoState(std::uint64_t seed) { seed_ = seed; }
  std::string family_spec() const override { return "echo"; }
  Str answer(const Str& prompt, TickMeter& meter) const override {
    meter.tick(1 + prompt.size());
    return prompt;
  }

 protected:
  std::unique_ptr<LearnerState> clone() const override {
    return std::make_unique<EchoState>(*this);
  }
  bool absorb(const Sample&) override { return false; }
};

class EchoFamily final : public LearnerFamily {
 public:
  std::string spec() const override { return "echo"; }
  StatePtr initial_state(std::uint64_t seed) const override {
    return std::make_shared<EchoState>(seed);
  }
  bool ignores_samples() const override { return true; }
  bool order_insensitive() const override { return true; }
};

// ---------------------------------------------------------------------------
// Autoregressive n-gram with greedy decoding.

class NgramState final : public LearnerState {
 public:
  NgramState(TokenAlphabet alphabet, unsigned order, std::size_t max_output,
             std::uint64_t seed)
      : alphabet_(std::move(alphabet)), order_(order), max_output_(max_output) {
    seed_ = seed;
  }

  std::string family_spec() const override {
    return "ngram:order=" + std::to_string(order_) +
           ",max_out=" + std::to_string(max_output_);
  }

  Str answer(const Str& prompt, TickMeter& meter) const override {
    Str text = prompt;
    Str out;
    while (out.size() < max_output_) {
      std::size_t clen = std::min<std::size_t>(order_, text.size());
      Str context = text.substr(text.size() - clen);
      meter.tick();  // context probe
      int next = next_symbol(context);
      if (next == NgramCounts::kStop) break;
      meter.tick();  // emission
      out.push_back(static_cast<char>(next));
      text.push_back(static_cast<char>(next));
    }
    return out;
  }

  const NgramCounts& counts() const { return counts_; }

 protected:
  std::unique_ptr<LearnerState> clone() const override {
    return std::make_unique<NgramState>(*this);
  }

  bool absorb(const Sample& sample) override {
    Str w = sample.prompt + sample.completion;
    for (std::size_t t = 0; t <= w.size(); ++t) {
      std::size_t clen = std::min<std::size_t>(order_, t);
      Str context = w.substr(t - clen, clen);
      int next = t == w.size() ? NgramCounts::kStop
                               : static_cast<unsigned char>(w[t]);
      counts_.table[context][next] += 1;
    }
    return true;
  }

 private:
  // Tie preference: alphabet tokens in alphabet order, then other bytes in
  // byte order, the stop mark last of all.
  std::uint64_t preference(int symbol) const {
    if (symbol == NgramCounts::kStop) return 1u << 20;
    auto p = alphabet_.position(static_cast<char>(symbol));
    if (p) return *p;
    return 1024 + static_cast<std::uint64_t>(symbol);
  }

  int next_symbol(const Str& context) const {
    auto it = counts_.table.find(context);
    if (it == counts_.table.end() || it->second.empty()) {
      // Unseen context: uniform over the alphabet, ties to the first token.
      return static_cast<unsigned char>(alphabet_.token(0));
    }
    int best = NgramCounts::kStop;
    std::uint64_t best_count = 0;
    std::uint64_t best_pref = UINT64_MAX;
    for (const auto& [sym, count] : it->second) {
      std::uint64_t pref = preference(sym);
      if (count > best_count || (count == best_count && pref < best_pref)) {
        best = sym;
        best_count = count;
        best_pref = pref;
      }
    }
    return best;
  }

  TokenAlphabet alphabet_;
  unsigned order_;
  std::size_t max_output_;
  NgramCounts counts_;
};

class NgramFamily final : public LearnerFamily {
 public:
  NgramFamily(TokenAlphabet alphabet, unsigned order, std::size_t max_output)
      : alphabet_(std::move(alphabet)), order_(order), max_output_(max_output) {
    if (order_ == 0) throw std::invalid_argument("ngram order must be >= 1");
  }
  std::string spec() const override {
    return "ngram:order=" + std::to_string(order_) +
           ",max_out=" + std::to_string(max_output_);
  }
  StatePtr initial_state(std::uint64_t seed) const override {
    return std::make_shared<NgramState>(alphabet_, order_, max_output_, seed);
  }
  bool order_insensitive() const override { return true; }

 private:
  TokenAlphabet alphabet_;
  unsigned order_;
  std::size_t max_output_;
};

// ---------------------------------------------------------------------------
// Exhaustive lister: answers any prompt of length m with the comma-joined
// list of all length-m strings over its alphabet. Exponential in m by
// design; the character cap keeps it total.

class ListerState final : public LearnerState {
 public:
  ListerState(TokenAlphabet alphabet, std::size_t max_chars, std::uint64_t seed)
      : alphabet_(std::move(alphabet)), max_chars_(max_chars) {
    seed_ = seed;
  }

  std::string family_spec() const override {
    return "lister:max_chars=" + std::to_string(max_chars_);
  }

  Str answer(const Str& prompt, TickMeter& meter) const override {
    const std::size_t m = prompt.size();
    meter.tick();
    Str out;
    std::vector<std::size_t> digits(m, 0);
    bool first = true;
    for (;;) {
      if (!first) {
        if (out.size() >= max_chars_) break;
        meter.tick();
        out.push_back(',');
      }
      first = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (out.size() >= max_chars_) return out;
        meter.tick();
        out.push_back(alphabet_.token(digits[i]));
      }
      // Odometer step, most significant position leftmost.
      std::size_t pos = m;
      while (pos > 0) {
        --pos;
        if (++digits[pos] < alphabet_.size()) break;
        digits[pos] = 0;
        if (pos == 0) return out;
      }
      if (m == 0) return out;
    }
    return out;
  }

 protected:
  std::unique_ptr<LearnerState> clone() const override {
    return std::make_unique<ListerState>(*this);
  }
  bool absorb(const Sample&) override { return false; }

 private:
  TokenAlphabet alphabet_;
  std::size_t max_chars_;
};

class ListerFamily final : public LearnerFamily {
 public:
  ListerFamily(TokenAlphabet alphabet, std::size_t max_chars)
      : alphabet_(std::move(alphabet)), max_chars_(max_chars) {}
  std::string spec() const override {
    return "lister:max_chars=" + std::to_string(max_chars_);
  }
  StatePtr initial_state(std::uint64_t seed) const override {
    return std::make_shared<ListerState>(alphabet_, max_chars_, seed);
  }
  bool ignores_samples() const override { return true; }
  bool order_insensitive() const override { return true; }

 private:
  TokenAlphabet alphabet_;
  std::size_t max_chars_;
};

// ---------------------------------------------------------------------------
// Order-fact learner: stores yes-facts "x$y" as edges and answers comparison
// prompts by reachability, which is exactly the transitive closure of what
// it was shown. Non-comparison prompts get the fixed answer "N", matching
// the observation that every finite training order has a least element.

class OrderFactsState final : public LearnerState {
 public:
  explicit OrderFactsState(std::uint64_t seed) { seed_ = seed; }

  std::string family_spec() const override { return "orderfacts"; }

  Str answer(const Str& prompt, TickMeter& meter) const override {
    meter.tick(1 + prompt.size());  // parse scan
    auto parsed = split_pair(prompt);
    if (!parsed) return "N";
    const auto& [lhs, rhs] = *parsed;
    return reachable(lhs, rhs, meter) ? "yes" : "no";
  }

 protected:
  std::unique_ptr<LearnerState> clone() const override {
    return std::make_unique<OrderFactsState>(*this);
  }

  bool absorb(const Sample& sample) override {
    if (sample.completion != "yes") return false;
    auto parsed = split_pair(sample.prompt);
    if (!parsed) return false;
    auto& succ = adj_[parsed->first];
    if (!succ.insert(parsed->second).second) return false;
    return true;
  }

 private:
  static std::optional<std::pair<Str, Str>> split_pair(const Str& prompt) {
    auto pos = prompt.find('$');
    if (pos == Str::npos || prompt.find('$', pos + 1) != Str::npos) {
      return std::nullopt;
    }
    return std::make_pair(prompt.substr(0, pos), prompt.substr(pos + 1));
  }

  bool reachable(const Str& from, const Str& to, TickMeter& meter) const {
    if (from == to) return false;
    std::deque<Str> queue{from};
    std::unordered_set<Str> seen{from};
    while (!queue.empty()) {
      Str cur = std::move(queue.front());
      queue.pop_front();
      auto it = adj_.find(cur);
      if (it == adj_.end()) continue;
      for (const Str& nxt : it->second) {
        meter.tick();  // edge visit
        if (nxt == to) return true;
        if (seen.insert(nxt).second) queue.push_back(nxt);
      }
    }
    return false;
  }

  std::unordered_map<Str, std::set<Str>> adj_;
};

class OrderFactsFamily final : public LearnerFamily {
 public:
  std::string spec() const override { return "orderfacts"; }
  StatePtr initial_state(std::uint64_t seed) const override {
    return std::make_shared<OrderFactsState>(seed);
  }
  bool order_insensitive() const override { return true; }
};

}  // namespace

FamilyPtr make_memorizer(Str default_answer) {
  return std::make_shared<MemorizerFamily>(std::move(default_answer));
}

FamilyPtr make_constant(Str answer) {
  return std::make_shared<ConstantFamily>(std::move(answer));
}

FamilyPtr make_echo() { return std::make_shared<EchoFamily>(); }

FamilyPtr make_ngram(const TokenAlphabet& alphabet, unsigned order,
                     std::size_t max_output) {
  return std::make_shared<NgramFamily>(alphabet, order, max_output);
}

FamilyPtr make_lister(const TokenAlphabet& alphabet, std::size_t max_chars) {
  return std::make_shared<ListerFamily>(alphabet, max_chars);
}

FamilyPtr make_order_facts() { return std::make_shared<OrderFactsFamily>(); }

const NgramCounts* ngram_counts(const LearnerState& state) {
  auto* ngram = dynamic_cast<const NgramState*>(&state);
  return ngram ? &ngram->counts() : nullptr;
}

Str ngram_complete(const LearnerState& ngram_state, const Str& prompt) {
  if (ngram_counts(ngram_state) == nullptr) {
    throw std::invalid_argument("state is not an n-gram model");
  }
  return ngram_state.answer(prompt);
}

}  // namespace halluc
