#include "halluc/adversaries.hpp"

#include <algorithm>
#include <stdexcept>

#include "halluc/kernels.hpp"

namespace halluc {

namespace {

Str trimmed(const Str& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == Str::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Trained-state chain per family: chain[n] is the family's state after the
// first n samples of the truth's own stream.
StatePtr grow_chain(std::vector<std::vector<StatePtr>>& chains,
                    const std::vector<FamilyPtr>& families, std::size_t family,
                    std::uint64_t nsamples, GroundTruth& truth) {
  auto& chain = chains.at(family);
  if (chain.empty()) chain.push_back(families[family]->initial_state(0));
  while (chain.size() <= nsamples) {
    Sample s = truth.sample_at(chain.size() - 1);
    chain.push_back(chain.back()->updated(s).state);
  }
  return chain[static_cast<std::size_t>(nsamples)];
}

}  // namespace

// ---------------------------------------------------------------------------
// DiagonalTruth

DiagonalTruth::DiagonalTruth(std::vector<FamilyPtr> families,
                             TokenAlphabet alphabet)
    : families_(std::move(families)), alphabet_(std::move(alphabet)) {
  if (families_.empty()) {
    throw std::invalid_argument("diagonal truth needs at least one family");
  }
  chains_.resize(families_.size());
}

Str DiagonalTruth::prompt_at(EnumIndex i) const {
  return enumerate_string(i, alphabet_);
}

StatePtr DiagonalTruth::chain_state(std::size_t family, std::uint64_t nsamples) {
  return grow_chain(chains_, families_, family, nsamples, *this);
}

StatePtr DiagonalTruth::state_at(EnumIndex i) {
  auto [cursor, nsamples] = cantor_unpair(i);
  return chain_state(cursor % families_.size(), nsamples);
}

Str DiagonalTruth::compute(EnumIndex i) {
  StatePtr st = state_at(i);
  Str ans = st->answer(prompt_at(i));
  return delta_next(ans, alphabet_);
}

// ---------------------------------------------------------------------------
// InfiniteDiagonalTruth

InfiniteDiagonalTruth::InfiniteDiagonalTruth(std::vector<FamilyPtr> families,
                                             TokenAlphabet alphabet,
                                             std::string kind_tag)
    : families_(std::move(families)),
      alphabet_(std::move(alphabet)),
      kind_(std::move(kind_tag)) {
  if (families_.empty()) {
    throw std::invalid_argument("diagonal truth needs at least one family");
  }
  chains_.resize(families_.size());
}

Str InfiniteDiagonalTruth::prompt_at(EnumIndex i) const {
  return enumerate_string(i, alphabet_);
}

StatePtr InfiniteDiagonalTruth::chain_state(std::size_t family,
                                            std::uint64_t nsamples) {
  return grow_chain(chains_, families_, family, nsamples, *this);
}

StatePtr InfiniteDiagonalTruth::state_at(EnumIndex i) {
  if (direct_states_) return chain_state(0, i);
  auto [cursor, nsamples] = cantor_unpair(i);
  return chain_state(cursor % families_.size(), nsamples);
}

Str InfiniteDiagonalTruth::compute(EnumIndex i) {
  const Str prompt = prompt_at(i);
  std::set<Str> avoid;
  if (direct_states_) {
    for (EnumIndex k = 0; k <= i; ++k) {
      avoid.insert(chain_state(0, k)->answer(prompt));
    }
    return delta_avoiding(avoid, alphabet_);
  }
  std::set<std::pair<std::size_t, std::uint64_t>> visited;
  for (EnumIndex k = 0; k <= i; ++k) {
    auto [cursor, nsamples] = cantor_unpair(k);
    auto key = std::make_pair(static_cast<std::size_t>(cursor % families_.size()),
                              nsamples);
    if (!visited.insert(key).second) continue;
    avoid.insert(chain_state(key.first, key.second)->answer(prompt));
  }
  return delta_avoiding(avoid, alphabet_);
}

std::unique_ptr<InfiniteDiagonalTruth> make_singleton_truth(
    FamilyPtr family, TokenAlphabet alphabet) {
  auto truth = std::make_unique<InfiniteDiagonalTruth>(
      std::vector<FamilyPtr>{std::move(family)}, std::move(alphabet),
      "singleton");
  truth->direct_states_ = true;
  return truth;
}

// ---------------------------------------------------------------------------
// OrderAdversary

OrderAdversary::OrderAdversary(FamilyPtr subject, TokenAlphabet alphabet,
                               std::uint64_t seed)
    : subject_(std::move(subject)),
      alphabet_(std::move(alphabet)),
      seed_(seed) {}

Str OrderAdversary::render_prompt(EnumIndex lhs, EnumIndex rhs) const {
  return enumerate_string(lhs, alphabet_) + "$" + enumerate_string(rhs, alphabet_);
}

Str OrderAdversary::ordered_answer(EnumIndex lhs, EnumIndex rhs) const {
  return ranks_[lhs] < ranks_[rhs] ? "yes" : "no";
}

StatePtr OrderAdversary::stage_subject(std::size_t n) {
  const EnumIndex limit = 2 * static_cast<EnumIndex>(n);
  if (subject_->ignores_samples()) {
    if (!prev_state_) prev_state_ = subject_->initial_state(seed_);
    return prev_state_;
  }
  const bool incremental = prev_state_ && subject_->order_insensitive();
  const EnumIndex fresh_from = incremental ? limit - 2 : limit;
  // Pairs in lexicographic (i, j) order, both directions, reflexive pairs
  // included with answer "no"; the incremental path replays only pairs that
  // touch the two newest elements.
  EnumIndex i = 0;
  EnumIndex j = 0;
  auto stream = [&]() -> std::optional<Sample> {
    for (;;) {
      if (i >= limit) return std::nullopt;
      if (j >= limit) {
        j = 0;
        ++i;
        continue;
      }
      EnumIndex a = i;
      EnumIndex b = j;
      ++j;
      if (incremental && a < fresh_from && b < fresh_from) continue;
      return Sample{render_prompt(a, b), ordered_answer(a, b)};
    }
  };
  prev_state_ = incremental ? extend_trained(prev_state_, stream)
                            : train_on_stream(*subject_, seed_, stream);
  return prev_state_;
}

void OrderAdversary::run_stage() {
  const std::size_t n = records_.size();
  StatePtr h = stage_subject(n);
  const EnumIndex e_lo = 2 * static_cast<EnumIndex>(n);
  const EnumIndex e_hi = e_lo + 1;
  Str query = render_prompt(e_hi, e_lo);
  Str answer = h->answer(query);
  Str t = trimmed(answer);
  bool claim_yes = t == "yes";
  bool parseable = claim_yes || t == "no";
  ranks_.resize(static_cast<std::size_t>(e_hi) + 1);
  if (claim_yes) {
    // Refute "e_hi below e_lo": put e_lo below e_hi at the top.
    ranks_[e_lo] = ++max_rank_;
    ranks_[e_hi] = ++max_rank_;
  } else {
    ranks_[e_hi] = ++max_rank_;
    ranks_[e_lo] = ++max_rank_;
  }
  records_.push_back(
      {n, query, answer, parseable, claim_yes, ordered_answer(e_hi, e_lo)});
}

void OrderAdversary::ensure_stages(std::size_t count) {
  while (records_.size() < count) run_stage();
}

bool OrderAdversary::has_rank(EnumIndex element) const {
  return element < ranks_.size();
}

std::int64_t OrderAdversary::rank(EnumIndex element) {
  ensure_stages(static_cast<std::size_t>(element / 2) + 1);
  return ranks_[element];
}

Str OrderAdversary::compare(EnumIndex lhs, EnumIndex rhs) {
  std::int64_t rl = rank(lhs);
  std::int64_t rr = rank(rhs);
  return rl < rr ? "yes" : "no";
}

// ---------------------------------------------------------------------------
// OrderTruth

OrderTruth::OrderTruth(std::shared_ptr<OrderAdversary> adversary)
    : adversary_(std::move(adversary)) {}

Str OrderTruth::prompt_at(EnumIndex p) const {
  auto [lhs, rhs] = cantor_unpair(p);
  return adversary_->render_prompt(lhs, rhs);
}

Str OrderTruth::compute(EnumIndex p) {
  auto [lhs, rhs] = cantor_unpair(p);
  return adversary_->compare(lhs, rhs);
}

// ---------------------------------------------------------------------------
// IsoAdversary

IsoAdversary::IsoAdversary(FamilyPtr subject, TokenAlphabet alphabet,
                           std::uint64_t seed)
    : subject_(std::move(subject)),
      alphabet_(std::move(alphabet)),
      seed_(seed) {}

Str IsoAdversary::render_prompt(EnumIndex lhs, EnumIndex rhs) const {
  return enumerate_string(lhs, alphabet_) + "$" + enumerate_string(rhs, alphabet_);
}

std::int64_t IsoAdversary::rank(EnumIndex element) const {
  if (element >= ranks_.size()) {
    throw std::out_of_range("element not yet ranked");
  }
  return ranks_[element];
}

StatePtr IsoAdversary::stage_subject(std::size_t n) {
  const EnumIndex limit = 2 * static_cast<EnumIndex>(n);
  if (subject_->ignores_samples()) {
    if (!prev_state_) prev_state_ = subject_->initial_state(seed_);
    return prev_state_;
  }
  const bool incremental = prev_state_ && subject_->order_insensitive();
  const EnumIndex fresh_from = incremental ? limit - 2 : limit;
  EnumIndex i = 0;
  EnumIndex j = 0;
  auto stream = [&]() -> std::optional<Sample> {
    for (;;) {
      if (i >= limit) return std::nullopt;
      if (j >= limit) {
        j = 0;
        ++i;
        continue;
      }
      EnumIndex a = i;
      EnumIndex b = j;
      ++j;
      if (incremental && a < fresh_from && b < fresh_from) continue;
      Str completion = ranks_[a] < ranks_[b] ? "yes" : "no";
      return Sample{render_prompt(a, b), completion};
    }
  };
  prev_state_ = incremental ? extend_trained(prev_state_, stream)
                            : train_on_stream(*subject_, seed_, stream);
  return prev_state_;
}

void IsoAdversary::run_stage() {
  const std::size_t n = records_.size();
  StatePtr h = stage_subject(n);
  const EnumIndex e_lo = 2 * static_cast<EnumIndex>(n);
  const EnumIndex e_hi = e_lo + 1;
  Str answer = h->answer(kQuery);
  Str t = trimmed(answer);
  bool said_n = t == "N";
  bool parseable = said_n || t == "Z";
  ranks_.resize(static_cast<std::size_t>(e_hi) + 1);
  if (said_n) {
    // Straddle: e_hi becomes the new minimum, e_lo the new maximum.
    ranks_[e_hi] = --min_rank_;
    ranks_[e_lo] = ++max_rank_;
  } else {
    ranks_[e_lo] = ++max_rank_;
    ranks_[e_hi] = ++max_rank_;
  }
  records_.push_back({n, Str(kQuery), answer, parseable, said_n, Str{}});
}

void IsoAdversary::ensure_stages(std::size_t count) {
  while (records_.size() < count) run_stage();
}

Str iso_order_type_estimate(const IsoAdversary& adversary, std::size_t window) {
  if (adversary.stages_run() < window || window == 0) {
    throw std::logic_error("estimate window exceeds stages run");
  }
  const auto& rec = adversary.transcript();
  for (std::size_t s = window / 2; s < window; ++s) {
    if (rec[s].first_branch) return "Z";
  }
  return "N";
}

// ---------------------------------------------------------------------------
// SubsetSumTruth

std::pair<std::vector<std::int64_t>, std::int64_t> SubsetSumTruth::instance_at(
    EnumIndex i) {
  auto [code, target] = cantor_unpair(i);
  std::vector<std::int64_t> items;
  while (code > 0) {
    auto [head, rest] = cantor_unpair(code - 1);
    if (head > static_cast<std::uint64_t>(INT64_MAX)) {
      throw std::overflow_error("instance item exceeds 64-bit range");
    }
    items.push_back(static_cast<std::int64_t>(head));
    code = rest;
    if (items.size() > 24) {
      throw std::length_error("instance exceeds the exhaustive-search cap");
    }
  }
  if (target > static_cast<std::uint64_t>(INT64_MAX)) {
    throw std::overflow_error("instance target exceeds 64-bit range");
  }
  return {std::move(items), static_cast<std::int64_t>(target)};
}

Str SubsetSumTruth::render_prompt(const std::vector<std::int64_t>& items,
                                  std::int64_t target) {
  Str out = "subset-sum items=";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(items[i]);
  }
  out += " target=";
  out += std::to_string(target);
  return out;
}

std::pair<std::vector<std::int64_t>, std::int64_t> SubsetSumTruth::parse_prompt(
    const Str& prompt) {
  const Str items_key = "subset-sum items=";
  const Str target_key = " target=";
  if (prompt.rfind(items_key, 0) != 0) {
    throw std::invalid_argument("malformed subset-sum prompt");
  }
  auto tpos = prompt.find(target_key, items_key.size());
  if (tpos == Str::npos) {
    throw std::invalid_argument("malformed subset-sum prompt");
  }
  Str items_text = prompt.substr(items_key.size(), tpos - items_key.size());
  Str target_text = prompt.substr(tpos + target_key.size());
  auto parse_int = [](const Str& text) {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument("malformed subset-sum integer");
    }
    return static_cast<std::int64_t>(v);
  };
  std::vector<std::int64_t> items;
  if (!items_text.empty()) {
    std::size_t start = 0;
    for (;;) {
      auto comma = items_text.find(',', start);
      items.push_back(parse_int(items_text.substr(
          start, comma == Str::npos ? Str::npos : comma - start)));
      if (comma == Str::npos) break;
      start = comma + 1;
    }
  }
  return {std::move(items), parse_int(target_text)};
}

Str SubsetSumTruth::prompt_at(EnumIndex i) const {
  auto [items, target] = instance_at(i);
  return render_prompt(items, target);
}

Str SubsetSumTruth::answer_prompt(const Str& prompt) const {
  auto [items, target] = parse_prompt(prompt);
  return subset_sum_serial(items, target) ? "yes" : "no";
}

Str SubsetSumTruth::compute(EnumIndex i) {
  auto [items, target] = instance_at(i);
  return subset_sum_serial(items, target) ? "yes" : "no";
}

}  // namespace halluc
