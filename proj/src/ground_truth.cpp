#include "halluc/ground_truth.hpp"

#include <stdexcept>

namespace halluc {

Str GroundTruth::value_at(EnumIndex i) {
  if (i < frozen_.size()) return frozen_[i];
  auto it = memo_.find(i);
  if (it != memo_.end()) return it->second;
  if (!in_flight_.insert(i).second) {
    throw std::logic_error("ground truth recursion revisited index " +
                           std::to_string(i));
  }
  Str v = compute(i);
  in_flight_.erase(i);
  memo_.emplace(i, v);
  return v;
}

void GroundTruth::freeze_prefix(EnumIndex n) {
  while (frozen_.size() < n) {
    frozen_.push_back(value_at(frozen_.size()));
  }
}

const Str& GroundTruth::frozen_value(EnumIndex i) const {
  if (i >= frozen_.size()) {
    throw std::out_of_range("index beyond frozen prefix");
  }
  return frozen_[i];
}

StatePtr enumerate_states(const std::vector<FamilyPtr>& families, EnumIndex k,
                          GroundTruth& truth) {
  if (families.empty()) {
    throw std::invalid_argument("state enumeration needs at least one family");
  }
  auto [cursor, nsamples] = cantor_unpair(k);
  const LearnerFamily& family = *families[cursor % families.size()];
  EnumIndex t = 0;
  return train_on_stream(family, 0, [&]() -> std::optional<Sample> {
    if (t >= nsamples) return std::nullopt;
    Sample s = truth.sample_at(t);
    ++t;
    return s;
  });
}

}  // namespace halluc
