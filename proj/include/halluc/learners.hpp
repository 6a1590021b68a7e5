#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "halluc/string_space.hpp"

namespace halluc {

struct Sample {
  Str prompt;
  Str completion;
};

/// Thrown by metered answer routines once the tick limit is crossed.
class TickLimitExceeded : public std::exception {
 public:
  const char* what() const noexcept override { return "tick limit exceeded"; }
};

/// Thrown by learners that refuse to answer (exhausted hypothesis class).
class AnswerRefused : public std::exception {
 public:
  const char* what() const noexcept override { return "learner refused"; }
};

/// Counts primitive interpreter steps: table probes, token emissions and
/// count updates each cost one tick.
class TickMeter {
 public:
  static constexpr std::uint64_t kNoLimit = UINT64_MAX;

  explicit TickMeter(std::uint64_t limit = kNoLimit) : limit_(limit) {}

  void tick(std::uint64_t n = 1) {
    if (n > limit_ - used_) {
      used_ = limit_;
      throw TickLimitExceeded{};
    }
    used_ += n;
  }

  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t used_ = 0;
  std::uint64_t limit_;
};

/// Polynomial step budget in the prompt length, lowest degree first.
/// Evaluation saturates instead of overflowing and is clamped below at 1,
/// so every length gets a positive budget. At least one coefficient must be
/// positive.
class StepBudget {
 public:
  explicit StepBudget(std::vector<std::uint64_t> coefficients);

  std::uint64_t operator()(std::uint64_t length) const;
  const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }

 private:
  std::vector<std::uint64_t> coeffs_;
};

struct AnswerOutcome {
  enum class Kind { answer, budget_exceeded, refused };

  Kind kind;
  Str text;  // answer payload; the fixed refusal marker for refused

  static AnswerOutcome answer(Str t) { return {Kind::answer, std::move(t)}; }
  static AnswerOutcome budget_exceeded() { return {Kind::budget_exceeded, {}}; }
  static AnswerOutcome refused() { return {Kind::refused, "unknown"}; }
};

class LearnerState;
using StatePtr = std::shared_ptr<const LearnerState>;

struct UpdateResult {
  StatePtr state;
  bool changed;  // whether the sample changed answering behavior
};

/// Immutable learner state. updated() is pure: the receiver is never
/// modified and stays usable.
class LearnerState {
 public:
  virtual ~LearnerState() = default;

  virtual std::string family_spec() const = 0;
  std::uint64_t samples_consumed() const { return consumed_; }
  std::uint64_t seed() const { return seed_; }

  /// Deterministic metered answer. Throws TickLimitExceeded through the
  /// meter and AnswerRefused when the learner declines to answer.
  virtual Str answer(const Str& prompt, TickMeter& meter) const = 0;

  /// Unmetered convenience wrapper; refusals surface as the literal string
  /// "unknown" so the call is total.
  Str answer(const Str& prompt) const;

  UpdateResult updated(const Sample& sample) const;

 protected:
  virtual std::unique_ptr<LearnerState> clone() const = 0;
  /// Mutating absorption of one sample; returns whether behavior changed.
  virtual bool absorb(const Sample& sample) = 0;

  std::uint64_t consumed_ = 0;
  std::uint64_t seed_ = 0;

  friend StatePtr train_on_stream(
      const class LearnerFamily& family, std::uint64_t seed,
      const std::function<std::optional<Sample>()>& next);
  friend StatePtr extend_trained(
      const StatePtr& state,
      const std::function<std::optional<Sample>()>& next);
};

class LearnerFamily {
 public:
  virtual ~LearnerFamily() = default;

  /// Canonical spec string, accepted by parse_learner_spec.
  virtual std::string spec() const = 0;
  virtual StatePtr initial_state(std::uint64_t seed = 0) const = 0;

  /// True when updates ignore sample content; bulk trainers may then skip
  /// sample generation without changing the resulting state.
  virtual bool ignores_samples() const { return false; }

  /// True when the trained state depends only on the multiset of samples.
  /// Stage trainers use this to extend a previous state instead of
  /// retraining, which is behaviorally identical for such families.
  virtual bool order_insensitive() const { return false; }
};

using FamilyPtr = std::shared_ptr<const LearnerFamily>;

StatePtr learner_update(const StatePtr& state, const Sample& sample);
Str learner_answer(const StatePtr& state, const Str& prompt);

/// Runs the metered answer under budget(prompt length). Exceeding the budget
/// yields a budget_exceeded outcome; the partial answer is discarded, never
/// returned truncated.
AnswerOutcome budget_guarded_answer(const LearnerState& state, const Str& prompt,
                                    const StepBudget& budget);

/// Folds updates over a sample stream (next() until nullopt) starting from a
/// fresh initial state. Equivalent to repeated learner_update.
StatePtr train_on_stream(const LearnerFamily& family, std::uint64_t seed,
                         const std::function<std::optional<Sample>()>& next);

/// Continues training from an existing state over further samples.
StatePtr extend_trained(const StatePtr& state,
                        const std::function<std::optional<Sample>()>& next);

StatePtr train_on_samples(const LearnerFamily& family, std::uint64_t seed,
                          const std::vector<Sample>& samples);

// Zoo factories.

FamilyPtr make_memorizer(Str default_answer = "unknown");
FamilyPtr make_constant(Str answer);
FamilyPtr make_echo();
FamilyPtr make_ngram(const TokenAlphabet& alphabet, unsigned order,
                     std::size_t max_output = 64);
FamilyPtr make_lister(const TokenAlphabet& alphabet,
                      std::size_t max_chars = 65536);
FamilyPtr make_order_facts();

/// Count tables of the autoregressive n-gram learner, exposed for
/// inspection. Contexts are the last min(order, position) characters;
/// kStop marks the end of a training string.
struct NgramCounts {
  static constexpr int kStop = 256;
  std::unordered_map<Str, std::map<int, std::uint64_t>> table;
};

/// Access to the counts of an n-gram state; nullptr for other families.
const NgramCounts* ngram_counts(const LearnerState& state);

/// Greedy completion of the n-gram model; identical to state.answer().
Str ngram_complete(const LearnerState& ngram_state, const Str& prompt);

}  // namespace halluc
