#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "halluc/string_space.hpp"

namespace halluc {

enum class TaskKind { List, Order1, Order2, Index, SubsetSum };

std::string task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(const std::string& name);

/// Deterministic cross-platform RNG primitives. std:: distributions are not
/// used anywhere because their outputs differ across standard libraries.
std::uint64_t splitmix64_next(std::uint64_t& state);
/// Uniform draw in [0, bound) by rejection sampling; bound must be nonzero.
std::uint64_t uniform_below(std::uint64_t& state, std::uint64_t bound);

/// English number word for 1..99 ("two", "twenty-one"), digits beyond.
std::string number_words(std::uint64_t n);
/// "1st", "2nd", "3rd", "11th", ...
std::string ordinal_suffixed(std::uint64_t n);

/// The fixed assistant preamble prepended to every task prompt.
const Str& base_prompt();

struct TaskSpec {
  TaskKind kind = TaskKind::List;
  Str id;
  std::uint64_t seed = 0;

  // Parameters; unused ones stay at their defaults.
  std::size_t m = 0;                // list length / numeral bound / string length
  Str alphabet_tokens;              // list alphabet
  std::size_t n = 0;                // character position (1-indexed)
  std::size_t item_count = 0;       // subset-sum instance size
  std::vector<std::int64_t> items;  // subset-sum items
  std::int64_t target = 0;          // subset-sum target

  /// Shared rendered prompt prefix (bit-exact from kind, parameters, seed).
  Str prompt_text;
  /// Per-query payloads: order statements "x$y", index test strings,
  /// subset-sum instance renderings. Empty for the single-prompt list task.
  std::vector<Str> statements;
  /// Kind-specific expected values: the full string set for List, "true" /
  /// "false" per statement for the order tasks, one character per test
  /// string for Index, "yes"/"no" for SubsetSum.
  std::vector<Str> oracle;
};

enum class VerdictOutcome { pass, fail, unknown_ok, malformed };

std::string verdict_outcome_name(VerdictOutcome outcome);

struct Verdict {
  VerdictOutcome outcome = VerdictOutcome::fail;
  std::vector<Str> missing;    // list: oracle items absent from the response
  std::vector<Str> extra;      // list: response items outside the oracle
  std::vector<Str> judgments;  // per-statement notes for multi-query kinds
  Str note;

  bool passed() const {
    return outcome == VerdictOutcome::pass ||
           outcome == VerdictOutcome::unknown_ok;
  }
};

// Generators. Prompts are deterministic in (kind, parameters, seed).

/// All-strings-of-length-m listing task. Requires m >= 1, |alphabet| >= 2;
/// refuses to generate oracles above 2^20 items (std::length_error).
TaskSpec gen_list_task(std::size_t m, const TokenAlphabet& alphabet,
                       std::uint64_t seed);

/// Ordering task over binary numerals with successor-pair examples covering
/// 0..m. Case Order1 draws five pairs with both values covered by the
/// examples but never adjacent (the pair's relation is not itself an
/// example); Order2 puts one side beyond the example range. Each pair is
/// asked in both directions: ten statements. Requires m >= 2.
TaskSpec gen_order_task(std::size_t m, TaskKind order_case, std::uint64_t seed);

/// N-th-character task: five worked 16-character examples, then five random
/// test strings of length m. Requires 1 <= n <= min(m, 16).
TaskSpec gen_index_task(std::size_t m, std::size_t n, std::uint64_t seed);

/// Subset-sum decision task: item_count items in [1, 50]; the target is a
/// reachable subset sum for even seed draws and a random value otherwise.
TaskSpec gen_subset_sum_task(std::size_t item_count, std::uint64_t seed);

/// Fully rendered prompt per query (one entry for List, one per statement
/// otherwise).
std::vector<Str> task_prompts(const TaskSpec& spec);

// Validators.

/// Tokenizes on whitespace, commas, semicolons and bullet markers, strips
/// quotes, backticks, brackets and edge punctuation, then compares the
/// support of the result against the oracle set (duplicates allowed).
Verdict validate_list_response(const TaskSpec& spec, const Str& response);

/// One response per statement. Answers are parsed with parse_truth_token;
/// any unparseable response is malformed. Order2 passes with unknown_ok when
/// every answer parses to "unknown".
Verdict validate_order_response(const TaskSpec& spec,
                                const std::vector<Str>& responses);

/// One response per test string; a response's answer is the last quoted or
/// standalone single character in it.
Verdict validate_index_response(const TaskSpec& spec,
                                const std::vector<Str>& responses);

/// One response per instance, parsed like order answers ("yes"/"no"
/// expected; "unknown" parses but never passes).
Verdict validate_subset_sum_response(const TaskSpec& spec,
                                     const std::vector<Str>& responses);

/// Kind dispatch over the validators above.
Verdict validate_responses(const TaskSpec& spec,
                           const std::vector<Str>& responses);

/// Last word-boundary occurrence of true/false/unknown (case-insensitive),
/// lowercased; empty when none is present.
Str parse_truth_token(const Str& text);
/// Same scheme for yes/no/unknown.
Str parse_yes_no_token(const Str& text);
/// Last quoted or standalone single character; empty when none is present.
Str extract_single_char(const Str& text);

nlohmann::json task_spec_to_json(const TaskSpec& spec);
TaskSpec task_spec_from_json(const nlohmann::json& j);
nlohmann::json verdict_to_json(const Verdict& verdict);

}  // namespace halluc
