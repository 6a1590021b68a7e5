#pragma once

#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "halluc/learners.hpp"
#include "halluc/string_space.hpp"

namespace halluc {

/// Lazily evaluated ground truth over an enumerated prompt space.
///
/// Derived classes implement compute(); the base memoizes values, guards
/// against re-entrant evaluation of an index (the recursions must stay
/// well-founded), and can freeze a prefix into a dense read-only block.
/// Growth happens in a single execution context; once a prefix is frozen,
/// frozen_value() is safe to call from parallel readers.
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;

  virtual std::string kind() const = 0;
  virtual Str prompt_at(EnumIndex i) const = 0;

  Str value_at(EnumIndex i);

  void freeze_prefix(EnumIndex n);
  EnumIndex frozen_prefix() const { return frozen_.size(); }
  const Str& frozen_value(EnumIndex i) const;

  Sample sample_at(EnumIndex i) { return {prompt_at(i), value_at(i)}; }

 protected:
  virtual Str compute(EnumIndex i) = 0;

 private:
  std::unordered_map<EnumIndex, Str> memo_;
  std::unordered_set<EnumIndex> in_flight_;
  std::vector<Str> frozen_;
};

/// Re-enumeration of trained states. Decomposes k via cantor_unpair into
/// (family cursor, sample count); the cursor wraps around the finite family
/// list and the state is trained on that many samples of the truth's own
/// canonical stream.
StatePtr enumerate_states(const std::vector<FamilyPtr>& families, EnumIndex k,
                          GroundTruth& truth);

}  // namespace halluc
