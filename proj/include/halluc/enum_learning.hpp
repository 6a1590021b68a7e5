#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "halluc/learners.hpp"
#include "halluc/string_space.hpp"

namespace halluc {

/// Thrown when the enumeration learner has rejected every member of its
/// hypothesis class.
class ClassExhausted : public AnswerRefused {
 public:
  const char* what() const noexcept override { return "hypothesis class exhausted"; }
};

/// Finite ordered class of total functions over enumeration indices.
///
/// Member spec grammar (also used inside learner specs and class files):
///   const=VALUE   constant answer VALUE
///   step=T        "yes" for indices below T, "no" from T on
///   enum_echo     the index-th enumerated string itself
///   shift=D       the (index+D)-th enumerated string
class FunctionClass {
 public:
  struct Member {
    std::string spec;
    std::function<Str(EnumIndex)> fn;
  };

  FunctionClass(TokenAlphabet alphabet, std::vector<Member> members);

  static FunctionClass parse(const TokenAlphabet& alphabet,
                             const std::vector<std::string>& member_specs);
  /// Loads {"members": ["const=yes", ...]} from a JSON file.
  static FunctionClass load_file(const TokenAlphabet& alphabet,
                                 const std::string& path);

  std::size_t size() const { return members_.size(); }
  const Member& at(std::size_t i) const { return members_.at(i); }
  const TokenAlphabet& alphabet() const { return alphabet_; }

  /// Evaluates member i on a prompt. Prompts outside the enumeration (foreign
  /// symbols, index overflow) evaluate to the empty string so members stay
  /// total over arbitrary prompts.
  Str eval(std::size_t member, const Str& prompt) const;
  Str eval_index(std::size_t member, EnumIndex idx) const;

  std::string spec_string() const;  // "+"-joined member specs

 private:
  TokenAlphabet alphabet_;
  std::vector<Member> members_;
};

using ClassPtr = std::shared_ptr<const FunctionClass>;

/// Identification-by-enumeration learner. Keeps the least class member
/// consistent with everything seen; a contradicting sample advances the
/// cursor to the next consistent member. Once no member fits, the learner is
/// exhausted and refuses to answer rather than fabricating one.
class EnumLearnerState final : public LearnerState {
 public:
  EnumLearnerState(ClassPtr cls, std::uint64_t seed);

  std::string family_spec() const override;
  Str answer(const Str& prompt, TickMeter& meter) const override;

  std::size_t current_index() const { return current_; }
  std::uint64_t mind_changes() const { return mind_changes_; }
  bool exhausted() const { return exhausted_; }
  std::size_t class_size() const { return cls_->size(); }

 protected:
  std::unique_ptr<LearnerState> clone() const override;
  bool absorb(const Sample& sample) override;

 private:
  bool consistent(std::size_t member) const;

  ClassPtr cls_;
  std::size_t current_ = 0;
  bool exhausted_ = false;
  std::uint64_t mind_changes_ = 0;
  std::vector<Sample> seen_;
};

FamilyPtr make_enum_learner(ClassPtr cls);

StatePtr enum_learner_update(const StatePtr& state, const Sample& sample);
/// Propagates ClassExhausted (as AnswerRefused) instead of fabricating.
Str enum_learner_answer(const StatePtr& state, const Str& prompt);

/// Rank of an n-element index set in colex order (combinatorial number
/// system): {c_1 < ... < c_n} has rank sum_j C(c_j, j).
std::uint64_t subset_rank(const std::vector<EnumIndex>& sorted_indices);
std::vector<EnumIndex> subset_unrank(std::size_t n, std::uint64_t rank);

/// The rank-th n-sample training set: prompts at the unranked indices in
/// ascending order, labels drawn from label_source.
std::vector<Sample> enumerate_training_sets(
    std::size_t n, std::uint64_t rank, const TokenAlphabet& alphabet,
    const std::function<Str(EnumIndex)>& label_source);

/// A trained base learner patched to return the stored labels on its
/// training prompts and its own answer elsewhere.
class PatchedFunction {
 public:
  PatchedFunction(std::vector<Sample> training, StatePtr trained);

  Str operator()(const Str& s) const;
  const std::vector<Sample>& training() const { return training_; }
  const StatePtr& trained() const { return trained_; }

 private:
  std::vector<Sample> training_;
  StatePtr trained_;
};

PatchedFunction make_patched_function(
    const LearnerFamily& base, std::size_t n, std::uint64_t rank,
    const TokenAlphabet& alphabet,
    const std::function<Str(EnumIndex)>& label_source);

Str patched_function_eval(const PatchedFunction& f, const Str& s);

}  // namespace halluc
