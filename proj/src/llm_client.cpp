#include "halluc/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "httplib.h"

namespace halluc {

Str fnv1a64_hex(const Str& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* digits = "0123456789abcdef";
  Str out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

nlohmann::json endpoint_config_to_json(const EndpointConfig& config) {
  return nlohmann::json{{"base_url", config.base_url},
                        {"path", config.path},
                        {"model", config.model},
                        {"credential_env", config.credential_env},
                        {"temperature", config.temperature},
                        {"max_tokens", config.max_tokens},
                        {"timeout_ms", config.timeout_ms},
                        {"retry_count", config.retry_count},
                        {"retry_backoff_ms", config.retry_backoff_ms}};
}

EndpointConfig endpoint_config_from_json(const nlohmann::json& j) {
  EndpointConfig config;
  config.base_url = j.at("base_url").get<Str>();
  config.path = j.value("path", config.path);
  config.model = j.value("model", Str{});
  config.credential_env = j.value("credential_env", Str{});
  config.temperature = j.value("temperature", 0.0);
  config.max_tokens = j.value("max_tokens", 1024);
  config.timeout_ms = j.value("timeout_ms", 30000);
  config.retry_count = j.value("retry_count", 2);
  config.retry_backoff_ms = j.value("retry_backoff_ms", 250);
  return config;
}

nlohmann::json transcript_entry_to_json(const TranscriptEntry& entry) {
  return nlohmann::json{{"v", 1},
                        {"prompt", entry.prompt},
                        {"prompt_hash", entry.prompt_hash},
                        {"seed", entry.seed},
                        {"model", entry.model},
                        {"temperature", entry.temperature},
                        {"response", entry.response},
                        {"response_hash", entry.response_hash},
                        {"finish_reason", entry.finish_reason},
                        {"error", entry.error}};
}

TranscriptEntry transcript_entry_from_json(const nlohmann::json& j) {
  if (j.value("v", 0) != 1) {
    throw std::runtime_error("unsupported transcript schema version");
  }
  TranscriptEntry entry;
  entry.prompt = j.at("prompt").get<Str>();
  entry.prompt_hash = j.at("prompt_hash").get<Str>();
  entry.seed = j.at("seed").get<std::uint64_t>();
  entry.model = j.value("model", Str{});
  entry.temperature = j.value("temperature", 0.0);
  entry.response = j.value("response", Str{});
  entry.response_hash = j.at("response_hash").get<Str>();
  entry.finish_reason = j.value("finish_reason", Str{});
  entry.error = j.value("error", Str{});
  return entry;
}

void TranscriptLog::append(TranscriptEntry entry) {
  entries_.push_back(std::move(entry));
}

const TranscriptEntry* TranscriptLog::find(const Str& prompt_hash,
                                           std::uint64_t seed) const {
  const TranscriptEntry* hit = nullptr;
  for (const auto& e : entries_) {
    if (e.prompt_hash == prompt_hash && e.seed == seed && e.error.empty()) {
      hit = &e;
    }
  }
  return hit;
}

void TranscriptLog::save_jsonl(const Str& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open transcript file: " + path);
  for (const auto& e : entries_) {
    out << transcript_entry_to_json(e).dump() << "\n";
  }
}

TranscriptLog TranscriptLog::load_jsonl(const Str& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open transcript file: " + path);
  TranscriptLog log;
  Str line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TranscriptEntry entry =
        transcript_entry_from_json(nlohmann::json::parse(line));
    if (entry.prompt_hash != fnv1a64_hex(entry.prompt) ||
        entry.response_hash != fnv1a64_hex(entry.response)) {
      throw std::runtime_error("transcript integrity failure at line " +
                               std::to_string(lineno));
    }
    log.append(std::move(entry));
  }
  return log;
}

namespace {

TranscriptEntry make_entry(const EndpointConfig& config, const Str& prompt,
                           std::uint64_t seed) {
  TranscriptEntry entry;
  entry.prompt = prompt;
  entry.prompt_hash = fnv1a64_hex(prompt);
  entry.seed = seed;
  entry.model = config.model;
  entry.temperature = config.temperature;
  entry.response_hash = fnv1a64_hex(entry.response);
  return entry;
}

}  // namespace

CompletionResult complete_prompt(const EndpointConfig& config, const Str& prompt,
                                 std::uint64_t seed, TranscriptLog* log) {
  if (prompt.empty()) throw std::invalid_argument("prompt is empty");

  Str credential;
  if (!config.credential_env.empty()) {
    const char* value = std::getenv(config.credential_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw AuthError("credential environment variable not set: " +
                      config.credential_env);
    }
    credential = value;
  }

  nlohmann::json body{
      {"model", config.model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"temperature", config.temperature},
      {"max_tokens", config.max_tokens},
      {"seed", seed}};
  const Str payload = body.dump();

  TranscriptEntry entry = make_entry(config, prompt, seed);
  const int max_attempts = 1 + std::max(0, config.retry_count);
  Str last_error = "no attempt made";
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1 && config.retry_backoff_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config.retry_backoff_ms * (attempt - 1)));
    }
    httplib::Client client(config.base_url);
    client.set_connection_timeout(0, config.timeout_ms * 1000LL);
    client.set_read_timeout(config.timeout_ms / 1000,
                            config.timeout_ms % 1000 * 1000);
    httplib::Headers headers;
    if (!credential.empty()) {
      headers.emplace("Authorization", "Bearer " + credential);
    }
    auto res = client.Post(config.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      entry.error = "auth: HTTP " + std::to_string(res->status);
      if (log) log->append(entry);
      throw AuthError("endpoint rejected credentials: HTTP " +
                      std::to_string(res->status));
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "retryable: HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      entry.error = "HTTP " + std::to_string(res->status);
      if (log) log->append(entry);
      throw TransportError("endpoint error: HTTP " +
                           std::to_string(res->status));
    }
    try {
      auto parsed = nlohmann::json::parse(res->body);
      CompletionResult result;
      result.text = parsed.at("choices").at(0).at("message").at("content")
                        .get<Str>();
      result.finish_reason =
          parsed.at("choices").at(0).value("finish_reason", Str{});
      result.attempts = attempt;
      entry.response = result.text;
      entry.response_hash = fnv1a64_hex(result.text);
      entry.finish_reason = result.finish_reason;
      if (log) log->append(std::move(entry));
      return result;
    } catch (const nlohmann::json::exception& e) {
      last_error = Str("malformed response body: ") + e.what();
      continue;
    }
  }
  entry.error = last_error;
  entry.response_hash = fnv1a64_hex(entry.response);
  if (log) log->append(std::move(entry));
  throw TransportError("retries exhausted: " + last_error);
}

}  // namespace halluc
