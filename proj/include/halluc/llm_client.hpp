#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "halluc/string_space.hpp"

namespace halluc {

/// 64-bit FNV-1a of the bytes, rendered as 16 lowercase hex digits.
Str fnv1a64_hex(const Str& data);

/// Chat-completion endpoint description. The credential itself is never
/// stored: only the name of the environment variable holding it, resolved at
/// request time.
struct EndpointConfig {
  Str base_url;                         // scheme://host:port
  Str path = "/v1/chat/completions";
  Str model;
  Str credential_env;                   // empty: unauthenticated endpoint
  double temperature = 0.0;
  int max_tokens = 1024;
  int timeout_ms = 30000;
  int retry_count = 2;                  // retries after the first attempt
  int retry_backoff_ms = 250;
};

/// Serialization round-trips everything above; the resolved credential value
/// never appears in the JSON.
nlohmann::json endpoint_config_to_json(const EndpointConfig& config);
EndpointConfig endpoint_config_from_json(const nlohmann::json& j);

/// Configuration-level failure (missing credential variable, HTTP 401/403).
/// Never retried.
class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport or server failure after the retry budget is exhausted.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TranscriptEntry {
  Str prompt;
  Str prompt_hash;     // fnv1a64_hex(prompt)
  std::uint64_t seed = 0;
  Str model;
  double temperature = 0.0;
  Str response;
  Str response_hash;   // fnv1a64_hex(response)
  Str finish_reason;
  Str error;           // nonempty when the request ultimately failed
};

nlohmann::json transcript_entry_to_json(const TranscriptEntry& entry);
TranscriptEntry transcript_entry_from_json(const nlohmann::json& j);

/// Append-only request/response log with hash-checked persistence.
class TranscriptLog {
 public:
  void append(TranscriptEntry entry);
  const std::vector<TranscriptEntry>& entries() const { return entries_; }

  /// Most recent successful entry for (prompt hash, seed); nullptr when the
  /// log has none.
  const TranscriptEntry* find(const Str& prompt_hash, std::uint64_t seed) const;

  void save_jsonl(const Str& path) const;
  /// Recomputes every hash; a mismatch throws std::runtime_error.
  static TranscriptLog load_jsonl(const Str& path);

 private:
  std::vector<TranscriptEntry> entries_;
};

struct CompletionResult {
  Str text;
  Str finish_reason;
  int attempts = 0;
};

/// One chat completion. Sends at most 1 + retry_count requests; retries
/// cover transport failures, 429 and 5xx. 401/403 and a missing credential
/// variable raise AuthError immediately. Every terminal outcome (success or
/// error) is appended to the log when one is supplied.
CompletionResult complete_prompt(const EndpointConfig& config, const Str& prompt,
                                 std::uint64_t seed,
                                 TranscriptLog* log = nullptr);

}  // namespace halluc
