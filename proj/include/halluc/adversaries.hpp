#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <vector>

#include "halluc/ground_truth.hpp"

namespace halluc {

/// Adversarial truth whose value at index i is the successor of what the
/// i-th re-enumerated state answers on the i-th prompt. States are trained
/// on this truth's own stream, so every state disagrees with the truth at
/// its own diagonal index by construction.
class DiagonalTruth final : public GroundTruth {
 public:
  DiagonalTruth(std::vector<FamilyPtr> families, TokenAlphabet alphabet);

  std::string kind() const override { return "diagonal"; }
  Str prompt_at(EnumIndex i) const override;
  const TokenAlphabet& alphabet() const { return alphabet_; }

  /// The i-th re-enumerated state, drawn from the internal trained-state
  /// cache (grown on demand).
  StatePtr state_at(EnumIndex i);

 protected:
  Str compute(EnumIndex i) override;

 private:
  StatePtr chain_state(std::size_t family, std::uint64_t nsamples);

  std::vector<FamilyPtr> families_;
  TokenAlphabet alphabet_;
  std::vector<std::vector<StatePtr>> chains_;
};

/// Value at index i avoids the answers of every state with code at most i,
/// so state k disagrees with the truth on all indices from k on.
class InfiniteDiagonalTruth final : public GroundTruth {
 public:
  InfiniteDiagonalTruth(std::vector<FamilyPtr> families, TokenAlphabet alphabet,
                        std::string kind_tag = "infinite_diagonal");

  std::string kind() const override { return kind_; }
  Str prompt_at(EnumIndex i) const override;
  const TokenAlphabet& alphabet() const { return alphabet_; }

  StatePtr state_at(EnumIndex i);

 protected:
  Str compute(EnumIndex i) override;

 private:
  friend std::unique_ptr<InfiniteDiagonalTruth> make_singleton_truth(
      FamilyPtr family, TokenAlphabet alphabet);

  StatePtr chain_state(std::size_t family, std::uint64_t nsamples);

  std::vector<FamilyPtr> families_;
  TokenAlphabet alphabet_;
  std::string kind_;
  std::vector<std::vector<StatePtr>> chains_;
  // With several families, state codes interleave (family, sample count)
  // through the pairing. A one-family list has the simpler natural
  // enumeration: state k is the state after k samples. The singleton
  // reduction uses that, which strengthens the guarantee to "the j-sample
  // state disagrees on every index from j on".
  bool direct_states_ = false;
};

/// Single-learner reduction: the infinite diagonal over a one-element
/// family list, with states enumerated directly by sample count.
std::unique_ptr<InfiniteDiagonalTruth> make_singleton_truth(
    FamilyPtr family, TokenAlphabet alphabet);

struct StageRecord {
  std::size_t stage;
  Str query;
  Str subject_answer;
  bool parseable;      // whether the trimmed answer was one of the two forms
  bool first_branch;   // order: claim taken as "yes"; iso: straddle step
  Str truth_answer;    // order queries: the post-assignment comparison truth
};

/// Stage-wise adversary that keeps extending a strict total order so the
/// subject's answer at every stage comes out wrong.
///
/// At stage n the subject is trained afresh on every comparison pair over
/// the first 2n elements (lexicographic pair order, both directions,
/// reflexive pairs answered "no") and then queried on the two new elements.
/// Answer "yes" puts them above everything in the refuting orientation;
/// anything else orients them the other way. Families that declare
/// order-insensitive training are extended incrementally, which produces the
/// identical state.
class OrderAdversary {
 public:
  OrderAdversary(FamilyPtr subject, TokenAlphabet alphabet,
                 std::uint64_t seed = 0);

  void run_stage();
  void ensure_stages(std::size_t count);
  std::size_t stages_run() const { return records_.size(); }
  const std::vector<StageRecord>& transcript() const { return records_; }

  /// Rank of an element, running stages lazily until it is assigned.
  std::int64_t rank(EnumIndex element);
  bool has_rank(EnumIndex element) const;
  Str compare(EnumIndex lhs, EnumIndex rhs);  // "yes" iff lhs below rhs

  Str render_prompt(EnumIndex lhs, EnumIndex rhs) const;
  const TokenAlphabet& alphabet() const { return alphabet_; }

 private:
  StatePtr stage_subject(std::size_t n);
  Str ordered_answer(EnumIndex lhs, EnumIndex rhs) const;

  FamilyPtr subject_;
  TokenAlphabet alphabet_;
  std::uint64_t seed_;
  std::vector<std::int64_t> ranks_;
  std::int64_t max_rank_ = -1;
  std::vector<StageRecord> records_;
  StatePtr prev_state_;
};

/// Comparison truth backed by an order adversary; prompt p decodes through
/// the Cantor pairing into the element pair it compares.
class OrderTruth final : public GroundTruth {
 public:
  explicit OrderTruth(std::shared_ptr<OrderAdversary> adversary);

  std::string kind() const override { return "order"; }
  Str prompt_at(EnumIndex p) const override;

 protected:
  Str compute(EnumIndex p) override;

 private:
  std::shared_ptr<OrderAdversary> adversary_;
};

/// Stage-wise adversary against the fixed order-type query. A subject that
/// eventually always says "N" keeps receiving new minima (order type Z); one
/// that settles on "Z" only ever gets a new top segment (order type N).
class IsoAdversary {
 public:
  static constexpr const char* kQuery = "is ordering < isomorphic to N or Z?";

  IsoAdversary(FamilyPtr subject, TokenAlphabet alphabet, std::uint64_t seed = 0);

  void run_stage();
  void ensure_stages(std::size_t count);
  std::size_t stages_run() const { return records_.size(); }
  const std::vector<StageRecord>& transcript() const { return records_; }

  std::int64_t rank(EnumIndex element) const;
  Str render_prompt(EnumIndex lhs, EnumIndex rhs) const;
  const TokenAlphabet& alphabet() const { return alphabet_; }

 private:
  StatePtr stage_subject(std::size_t n);

  FamilyPtr subject_;
  TokenAlphabet alphabet_;
  std::uint64_t seed_;
  std::vector<std::int64_t> ranks_;
  std::int64_t max_rank_ = -1;
  std::int64_t min_rank_ = 0;
  std::vector<StageRecord> records_;
  StatePtr prev_state_;
};

/// "Z" when a straddle step occurred in the last half of the window
/// [0, window), "N" otherwise. Requires that many stages to have run.
Str iso_order_type_estimate(const IsoAdversary& adversary, std::size_t window);

/// Subset-sum truth over a canonical instance enumeration. Instances render
/// as "subset-sum items=3,1,4 target=5"; the empty subset participates, so
/// target 0 is always a yes.
class SubsetSumTruth final : public GroundTruth {
 public:
  std::string kind() const override { return "subset_sum"; }
  Str prompt_at(EnumIndex i) const override;

  static Str render_prompt(const std::vector<std::int64_t>& items,
                           std::int64_t target);
  /// Throws std::invalid_argument on malformed prompts.
  static std::pair<std::vector<std::int64_t>, std::int64_t> parse_prompt(
      const Str& prompt);
  /// Decides a rendered prompt; malformed input is an error, not an answer.
  Str answer_prompt(const Str& prompt) const;

  static std::pair<std::vector<std::int64_t>, std::int64_t> instance_at(
      EnumIndex i);

 protected:
  Str compute(EnumIndex i) override;
};

}  // namespace halluc
