#include "halluc/enum_learning.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace halluc {

namespace {

// Binomial coefficient, saturating at UINT64_MAX. The stepwise division is
// exact since each prefix is itself a binomial coefficient.
std::uint64_t sat_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

FunctionClass::Member parse_member(const TokenAlphabet& alphabet,
                                   const std::string& spec) {
  auto eq = spec.find('=');
  std::string head = eq == std::string::npos ? spec : spec.substr(0, eq);
  std::string arg = eq == std::string::npos ? "" : spec.substr(eq + 1);
  if (head == "const") {
    return {spec, [arg](EnumIndex) { return arg; }};
  }
  if (head == "step") {
    EnumIndex t = std::stoull(arg);
    return {spec, [t](EnumIndex i) { return i < t ? Str("yes") : Str("no"); }};
  }
  if (head == "enum_echo") {
    TokenAlphabet a = alphabet;
    return {spec, [a](EnumIndex i) { return enumerate_string(i, a); }};
  }
  if (head == "shift") {
    EnumIndex d = std::stoull(arg);
    TokenAlphabet a = alphabet;
    return {spec, [a, d](EnumIndex i) { return enumerate_string(i + d, a); }};
  }
  throw std::invalid_argument("unknown class member spec: " + spec);
}

}  // namespace

FunctionClass::FunctionClass(TokenAlphabet alphabet, std::vector<Member> members)
    : alphabet_(std::move(alphabet)), members_(std::move(members)) {
  if (members_.empty()) {
    throw std::invalid_argument("function class needs at least one member");
  }
}

FunctionClass FunctionClass::parse(const TokenAlphabet& alphabet,
                                   const std::vector<std::string>& member_specs) {
  std::vector<Member> members;
  members.reserve(member_specs.size());
  for (const auto& s : member_specs) members.push_back(parse_member(alphabet, s));
  return FunctionClass(alphabet, std::move(members));
}

FunctionClass FunctionClass::load_file(const TokenAlphabet& alphabet,
                                       const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open class file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::vector<std::string> specs = j.at("members").get<std::vector<std::string>>();
  return parse(alphabet, specs);
}

Str FunctionClass::eval(std::size_t member, const Str& prompt) const {
  EnumIndex idx;
  try {
    idx = string_index(prompt, alphabet_);
  } catch (const std::exception&) {
    return {};
  }
  return eval_index(member, idx);
}

Str FunctionClass::eval_index(std::size_t member, EnumIndex idx) const {
  return members_.at(member).fn(idx);
}

std::string FunctionClass::spec_string() const {
  std::string out;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) out += '+';
    out += members_[i].spec;
  }
  return out;
}

EnumLearnerState::EnumLearnerState(ClassPtr cls, std::uint64_t seed)
    : cls_(std::move(cls)) {
  seed_ = seed;
}

std::string EnumLearnerState::family_spec() const {
  return "enum:class=" + cls_->spec_string();
}

Str EnumLearnerState::answer(const Str& prompt, TickMeter& meter) const {
  if (exhausted_) throw ClassExhausted{};
  Str out = cls_->eval(current_, prompt);
  meter.tick(1 + out.size());
  return out;
}

std::unique_ptr<LearnerState> EnumLearnerState::clone() const {
  return std::make_unique<EnumLearnerState>(*this);
}

bool EnumLearnerState::consistent(std::size_t member) const {
  for (const auto& s : seen_) {
    if (cls_->eval(member, s.prompt) != s.completion) return false;
  }
  return true;
}

bool EnumLearnerState::absorb(const Sample& sample) {
  if (exhausted_) return false;
  seen_.push_back(sample);
  if (cls_->eval(current_, sample.prompt) == sample.completion) return false;
  for (std::size_t c = current_ + 1; c < cls_->size(); ++c) {
    if (consistent(c)) {
      current_ = c;
      mind_changes_ += 1;
      return true;
    }
  }
  exhausted_ = true;
  current_ = cls_->size();
  seen_.clear();
  seen_.shrink_to_fit();
  return true;
}

namespace {

class EnumFamily final : public LearnerFamily {
 public:
  explicit EnumFamily(ClassPtr cls) : cls_(std::move(cls)) {}
  std::string spec() const override { return "enum:class=" + cls_->spec_string(); }
  StatePtr initial_state(std::uint64_t seed) const override {
    return std::make_shared<EnumLearnerState>(cls_, seed);
  }

 private:
  ClassPtr cls_;
};

}  // namespace

FamilyPtr make_enum_learner(ClassPtr cls) {
  return std::make_shared<EnumFamily>(std::move(cls));
}

StatePtr enum_learner_update(const StatePtr& state, const Sample& sample) {
  return learner_update(state, sample);
}

Str enum_learner_answer(const StatePtr& state, const Str& prompt) {
  TickMeter unlimited;
  return state->answer(prompt, unlimited);
}

std::uint64_t subset_rank(const std::vector<EnumIndex>& sorted_indices) {
  std::uint64_t rank = 0;
  for (std::size_t j = 0; j < sorted_indices.size(); ++j) {
    std::uint64_t b = sat_binomial(sorted_indices[j], j + 1);
    if (__builtin_add_overflow(rank, b, &rank)) {
      throw std::overflow_error("subset rank exceeds 64 bits");
    }
  }
  return rank;
}

std::vector<EnumIndex> subset_unrank(std::size_t n, std::uint64_t rank) {
  std::vector<EnumIndex> out(n);
  std::uint64_t rest = rank;
  for (std::size_t j = n; j >= 1; --j) {
    // Largest c with C(c, j) <= rest, found by galloping + binary search.
    std::uint64_t lo = j - 1;
    std::uint64_t hi = j;
    while (sat_binomial(hi, j) <= rest) {
      lo = hi;
      if (__builtin_mul_overflow(hi, 2u, &hi)) {
        hi = UINT64_MAX;
        break;
      }
    }
    while (lo + 1 < hi) {
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (sat_binomial(mid, j) <= rest) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out[j - 1] = lo;
    rest -= sat_binomial(lo, j);
  }
  return out;
}

std::vector<Sample> enumerate_training_sets(
    std::size_t n, std::uint64_t rank, const TokenAlphabet& alphabet,
    const std::function<Str(EnumIndex)>& label_source) {
  std::vector<EnumIndex> indices = subset_unrank(n, rank);
  std::vector<Sample> out;
  out.reserve(n);
  for (EnumIndex idx : indices) {
    out.push_back({enumerate_string(idx, alphabet), label_source(idx)});
  }
  return out;
}

PatchedFunction::PatchedFunction(std::vector<Sample> training, StatePtr trained)
    : training_(std::move(training)), trained_(std::move(trained)) {}

Str PatchedFunction::operator()(const Str& s) const {
  for (const auto& sample : training_) {
    if (sample.prompt == s) return sample.completion;
  }
  return trained_->answer(s);
}

PatchedFunction make_patched_function(
    const LearnerFamily& base, std::size_t n, std::uint64_t rank,
    const TokenAlphabet& alphabet,
    const std::function<Str(EnumIndex)>& label_source) {
  std::vector<Sample> training =
      enumerate_training_sets(n, rank, alphabet, label_source);
  StatePtr trained = train_on_samples(base, 0, training);
  return PatchedFunction(std::move(training), std::move(trained));
}

Str patched_function_eval(const PatchedFunction& f, const Str& s) { return f(s); }

}  // namespace halluc
