#include "halluc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "halluc/kernels.hpp"
#include "halluc/registry.hpp"

namespace halluc {

// ---------------------------------------------------------------------------
// Training loop

TrainingRun run_training_procedure(const LearnerFamily& family,
                                   GroundTruth& truth,
                                   const StoppingPolicy& stopping,
                                   std::uint64_t seed) {
  StatePtr state = family.initial_state(seed);
  std::uint64_t i = 0;
  std::uint64_t unchanged_streak = 0;
  Str reason;
  for (;;) {
    if (stopping.consistency_window > 0 &&
        unchanged_streak >= stopping.consistency_window) {
      reason = "consistency_window";
      break;
    }
    if (i >= stopping.max_samples) {
      reason = "max_samples";
      break;
    }
    Sample sample = truth.sample_at(i);
    UpdateResult result = state->updated(sample);
    unchanged_streak = result.changed ? 0 : unchanged_streak + 1;
    state = std::move(result.state);
    ++i;
  }
  return {std::move(state), i, std::move(reason)};
}

// ---------------------------------------------------------------------------
// Detection and classification

std::vector<EnumIndex> detect_hallucination(const LearnerState& state,
                                            GroundTruth& truth, EnumIndex lo,
                                            EnumIndex hi, bool parallel) {
  if (lo > hi) throw std::invalid_argument("scan range is inverted");
  if (truth.frozen_prefix() < hi) truth.freeze_prefix(hi);
  return parallel ? disagreement_scan_omp(state, truth, lo, hi)
                  : disagreement_scan_serial(state, truth, lo, hi);
}

Str world_relation_name(WorldRelation relation) {
  switch (relation) {
    case WorldRelation::Total: return "total";
    case WorldRelation::Some: return "some";
    case WorldRelation::FreeOnPrefix: return "free_on_prefix";
  }
  throw std::logic_error("unreachable world relation");
}

WorldRelation classify_world_relation(const LearnerState& state,
                                      GroundTruth& truth, EnumIndex lo,
                                      EnumIndex hi, bool parallel) {
  if (lo >= hi) throw std::invalid_argument("scan range is empty");
  auto disagreements = detect_hallucination(state, truth, lo, hi, parallel);
  if (disagreements.empty()) return WorldRelation::FreeOnPrefix;
  if (disagreements.size() == hi - lo) return WorldRelation::Total;
  return WorldRelation::Some;
}

// ---------------------------------------------------------------------------
// Subjects

namespace {

class ZooSubject final : public Subject {
 public:
  ZooSubject(FamilyPtr family, std::uint64_t seed)
      : name_("zoo:" + family->spec()), state_(family->initial_state(seed)) {}

  Str name() const override { return name_; }
  Str complete(const Str& prompt, std::uint64_t) override {
    return state_->answer(prompt);
  }

 private:
  Str name_;
  StatePtr state_;
};

class OracleSubject final : public Subject {
 public:
  explicit OracleSubject(const std::vector<TaskSpec>& tasks) {
    for (const auto& spec : tasks) {
      auto prompts = task_prompts(spec);
      for (std::size_t q = 0; q < prompts.size(); ++q) {
        answers_[prompts[q]] = render_answer(spec, q);
      }
    }
  }

  Str name() const override { return "oracle"; }
  Str complete(const Str& prompt, std::uint64_t) override {
    auto it = answers_.find(prompt);
    if (it == answers_.end()) {
      throw std::runtime_error("oracle subject has no answer for this prompt");
    }
    return it->second;
  }

 private:
  static Str render_answer(const TaskSpec& spec, std::size_t q) {
    switch (spec.kind) {
      case TaskKind::List: {
        Str joined;
        for (std::size_t i = 0; i < spec.oracle.size(); ++i) {
          if (i) joined += ", ";
          joined += spec.oracle[i];
        }
        return joined;
      }
      case TaskKind::Index:
        return "\"" + spec.oracle[q] + "\"";
      case TaskKind::Order1:
      case TaskKind::Order2:
      case TaskKind::SubsetSum:
        return spec.oracle[q];
    }
    throw std::logic_error("unreachable task kind");
  }

  std::unordered_map<Str, Str> answers_;
};

class TruncatingSubject final : public Subject {
 public:
  TruncatingSubject(SubjectPtr inner, std::size_t cap)
      : inner_(std::move(inner)), cap_(cap) {}

  Str name() const override {
    return inner_->name() + "+truncate:" + std::to_string(cap_);
  }
  Str complete(const Str& prompt, std::uint64_t seed) override {
    Str full = inner_->complete(prompt, seed);
    if (full.size() > cap_) full.resize(cap_);
    return full;
  }

 private:
  SubjectPtr inner_;
  std::size_t cap_;
};

class EndpointSubject final : public Subject {
 public:
  EndpointSubject(EndpointConfig config, std::shared_ptr<TranscriptLog> log)
      : config_(std::move(config)), log_(std::move(log)) {}

  Str name() const override { return "endpoint:" + config_.model; }
  Str complete(const Str& prompt, std::uint64_t seed) override {
    return complete_prompt(config_, prompt, seed, log_.get()).text;
  }

 private:
  EndpointConfig config_;
  std::shared_ptr<TranscriptLog> log_;
};

class ReplaySubject final : public Subject {
 public:
  explicit ReplaySubject(std::shared_ptr<const TranscriptLog> log)
      : log_(std::move(log)) {}

  Str name() const override { return "replay"; }
  Str complete(const Str& prompt, std::uint64_t seed) override {
    const Str hash = fnv1a64_hex(prompt);
    const TranscriptEntry* entry = log_->find(hash, seed);
    if (entry == nullptr) {
      throw std::runtime_error("transcript missing for prompt hash " + hash +
                               " seed " + std::to_string(seed));
    }
    return entry->response;
  }

 private:
  std::shared_ptr<const TranscriptLog> log_;
};

class RecordingSubject final : public Subject {
 public:
  RecordingSubject(SubjectPtr inner, std::shared_ptr<TranscriptLog> log)
      : inner_(std::move(inner)), log_(std::move(log)) {}

  Str name() const override { return inner_->name(); }
  Str complete(const Str& prompt, std::uint64_t seed) override {
    TranscriptEntry entry;
    entry.prompt = prompt;
    entry.prompt_hash = fnv1a64_hex(prompt);
    entry.seed = seed;
    entry.model = inner_->name();
    try {
      entry.response = inner_->complete(prompt, seed);
    } catch (const std::exception& e) {
      entry.error = e.what();
      entry.response_hash = fnv1a64_hex(entry.response);
      log_->append(std::move(entry));
      throw;
    }
    entry.response_hash = fnv1a64_hex(entry.response);
    entry.finish_reason = "recorded";
    Str response = entry.response;
    log_->append(std::move(entry));
    return response;
  }

 private:
  SubjectPtr inner_;
  std::shared_ptr<TranscriptLog> log_;
};

}  // namespace

SubjectPtr make_zoo_subject(FamilyPtr family, std::uint64_t seed) {
  return std::make_shared<ZooSubject>(std::move(family), seed);
}

SubjectPtr make_oracle_subject(const std::vector<TaskSpec>& tasks) {
  return std::make_shared<OracleSubject>(tasks);
}

SubjectPtr make_truncating_subject(SubjectPtr inner, std::size_t cap_chars) {
  return std::make_shared<TruncatingSubject>(std::move(inner), cap_chars);
}

SubjectPtr make_endpoint_subject(EndpointConfig config,
                                 std::shared_ptr<TranscriptLog> log) {
  return std::make_shared<EndpointSubject>(std::move(config), std::move(log));
}

SubjectPtr make_replay_subject(std::shared_ptr<const TranscriptLog> log) {
  return std::make_shared<ReplaySubject>(std::move(log));
}

SubjectPtr make_recording_subject(SubjectPtr inner,
                                  std::shared_ptr<TranscriptLog> log) {
  return std::make_shared<RecordingSubject>(std::move(inner), std::move(log));
}

// ---------------------------------------------------------------------------
// Experiment specification

TaskSpec generate_task(const TaskConfig& config) {
  switch (config.kind) {
    case TaskKind::List:
      return gen_list_task(config.m, TokenAlphabet(config.alphabet),
                           config.seed);
    case TaskKind::Order1:
    case TaskKind::Order2:
      return gen_order_task(config.m, config.kind, config.seed);
    case TaskKind::Index:
      return gen_index_task(config.m, config.n, config.seed);
    case TaskKind::SubsetSum:
      return gen_subset_sum_task(config.item_count, config.seed);
  }
  throw std::logic_error("unreachable task kind");
}

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : spec.tasks) {
    tasks.push_back({{"kind", task_kind_name(t.kind)},
                     {"m", t.m},
                     {"n", t.n},
                     {"item_count", t.item_count},
                     {"alphabet", t.alphabet},
                     {"seed", t.seed}});
  }
  nlohmann::json j{{"name", spec.name},
                   {"subject", spec.subject},
                   {"tasks", std::move(tasks)},
                   {"seeds", spec.seeds}};
  if (spec.has_endpoint) j["endpoint"] = endpoint_config_to_json(spec.endpoint);
  return j;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.name = j.at("name").get<Str>();
  spec.subject = j.at("subject").get<Str>();
  for (const auto& t : j.at("tasks")) {
    TaskConfig config;
    config.kind = task_kind_from_name(t.at("kind").get<std::string>());
    config.m = t.value("m", std::size_t{0});
    config.n = t.value("n", std::size_t{0});
    config.item_count = t.value("item_count", std::size_t{0});
    config.alphabet = t.value("alphabet", Str("ab"));
    config.seed = t.value("seed", std::uint64_t{0});
    spec.tasks.push_back(std::move(config));
  }
  spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("endpoint")) {
    spec.has_endpoint = true;
    spec.endpoint = endpoint_config_from_json(j.at("endpoint"));
  }
  return spec;
}

Str experiment_spec_hash(const ExperimentSpec& spec) {
  return fnv1a64_hex(experiment_spec_to_json(spec).dump());
}

// ---------------------------------------------------------------------------
// Records and reports

nlohmann::json trial_record_to_json(const TrialRecord& record) {
  return nlohmann::json{{"task_id", record.task_id},
                        {"seed", record.seed},
                        {"outcome", record.outcome},
                        {"verdict", record.verdict},
                        {"error", record.error},
                        {"responses", record.responses},
                        {"wall_ms", record.wall_ms}};
}

TrialRecord trial_record_from_json(const nlohmann::json& j) {
  TrialRecord record;
  record.task_id = j.at("task_id").get<Str>();
  record.seed = j.at("seed").get<std::uint64_t>();
  record.outcome = j.at("outcome").get<Str>();
  record.verdict = j.value("verdict", nlohmann::json{});
  record.error = j.value("error", Str{});
  record.responses = j.value("responses", std::vector<Str>{});
  record.wall_ms = j.value("wall_ms", std::uint64_t{0});
  return record;
}

void trial_records_save_jsonl(const Str& path,
                              const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open records file: " + path);
  for (const auto& r : records) out << trial_record_to_json(r).dump() << "\n";
}

std::vector<TrialRecord> trial_records_load_jsonl(const Str& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open records file: " + path);
  std::vector<TrialRecord> records;
  Str line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(trial_record_from_json(nlohmann::json::parse(line)));
  }
  return records;
}

Report report_from_records(const ExperimentSpec& spec,
                           const std::vector<TrialRecord>& records) {
  Report report;
  report.experiment = spec.name;
  report.subject = spec.subject;
  report.spec_hash = experiment_spec_hash(spec);
  report.seeds = spec.seeds;
  for (const auto& config : spec.tasks) {
    const Str task_id = generate_task(config).id;
    ReportRow row;
    row.task_id = task_id;
    bool any_pass = false;
    bool any_unknown_ok = false;
    bool all_error = true;
    for (std::uint64_t seed : spec.seeds) {
      Str outcome = "missing";
      for (const auto& r : records) {
        if (r.task_id == task_id && r.seed == seed) outcome = r.outcome;
      }
      if (outcome == "pass") any_pass = true;
      if (outcome == "unknown_ok") any_unknown_ok = true;
      if (outcome != "error" && outcome != "missing") all_error = false;
      row.per_seed.push_back(std::move(outcome));
    }
    if (any_pass) {
      row.cell = "pass";
    } else if (any_unknown_ok) {
      row.cell = "unknown_ok";
    } else if (all_error) {
      row.cell = "inconclusive";
    } else {
      row.cell = "fail";
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

nlohmann::json report_to_json(const Report& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"task", row.task_id},
                    {"cell", row.cell},
                    {"per_seed", row.per_seed}});
  }
  return nlohmann::json{{"experiment", report.experiment},
                        {"subject", report.subject},
                        {"spec_hash", report.spec_hash},
                        {"seeds", report.seeds},
                        {"scope", "scanned prompts only; no global claims"},
                        {"rows", std::move(rows)}};
}

namespace {

Str cell_mark(const Str& cell) {
  if (cell == "pass" || cell == "unknown_ok") return "✓";
  if (cell == "fail") return "✗";
  return "?";
}

Str csv_quote(const Str& field) {
  if (field.find_first_of(",\"\n") == Str::npos) return field;
  Str out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

Str report_to_markdown(const Report& report) {
  Str out = "# " + report.experiment + "\n\n";
  out += "- subject: `" + report.subject + "`\n";
  out += "- spec hash: `" + report.spec_hash + "`\n";
  out += "- seeds:";
  for (auto s : report.seeds) out += " " + std::to_string(s);
  out += "\n- scope: results cover the scanned prompts only\n\n";
  out += "| task | result |";
  for (auto s : report.seeds) out += " seed " + std::to_string(s) + " |";
  out += "\n|---|---|";
  for (std::size_t i = 0; i < report.seeds.size(); ++i) out += "---|";
  out += "\n";
  for (const auto& row : report.rows) {
    out += "| " + row.task_id + " | " + cell_mark(row.cell) + " |";
    for (const auto& o : row.per_seed) out += " " + o + " |";
    out += "\n";
  }
  return out;
}

Str report_to_csv(const Report& report) {
  Str out = "task,cell";
  for (auto s : report.seeds) out += ",seed_" + std::to_string(s);
  out += "\n";
  for (const auto& row : report.rows) {
    out += csv_quote(row.task_id) + "," + csv_quote(row.cell);
    for (const auto& o : row.per_seed) out += "," + csv_quote(o);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Suite execution

SubjectPtr resolve_subject(const ExperimentSpec& spec,
                           std::shared_ptr<TranscriptLog> endpoint_log) {
  const Str& s = spec.subject;
  auto generated_tasks = [&spec]() {
    std::vector<TaskSpec> tasks;
    for (const auto& config : spec.tasks) tasks.push_back(generate_task(config));
    return tasks;
  };
  if (s.rfind("zoo:", 0) == 0) {
    return make_zoo_subject(
        parse_learner_spec(s.substr(4), TokenAlphabet("ab")));
  }
  if (s == "oracle") return make_oracle_subject(generated_tasks());
  if (s.rfind("truncate:", 0) == 0) {
    std::size_t cap = std::stoull(s.substr(9));
    return make_truncating_subject(make_oracle_subject(generated_tasks()), cap);
  }
  if (s == "endpoint") {
    if (!spec.has_endpoint) {
      throw std::invalid_argument("subject 'endpoint' needs an endpoint config");
    }
    return make_endpoint_subject(spec.endpoint, std::move(endpoint_log));
  }
  throw std::invalid_argument("unknown subject spec: " + s);
}

SuiteResult run_task_suite(const ExperimentSpec& spec, Subject& subject) {
  SuiteResult result;
  for (const auto& config : spec.tasks) {
    const TaskSpec task = generate_task(config);
    const auto prompts = task_prompts(task);
    for (std::uint64_t seed : spec.seeds) {
      TrialRecord record;
      record.task_id = task.id;
      record.seed = seed;
      const auto started = std::chrono::steady_clock::now();
      try {
        for (const auto& prompt : prompts) {
          record.responses.push_back(subject.complete(prompt, seed));
        }
        Verdict verdict = validate_responses(task, record.responses);
        record.outcome = verdict_outcome_name(verdict.outcome);
        record.verdict = verdict_to_json(verdict);
      } catch (const std::exception& e) {
        record.outcome = "error";
        record.error = e.what();
      }
      record.wall_ms = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::milliseconds>(
              std::chrono::steady_clock::now() - started)
              .count());
      result.records.push_back(std::move(record));
    }
  }
  result.report = report_from_records(spec, result.records);
  return result;
}

SuiteResult replay_transcripts(const Str& transcript_path,
                               const ExperimentSpec& spec) {
  auto log = std::make_shared<TranscriptLog>(
      TranscriptLog::load_jsonl(transcript_path));
  auto subject = make_replay_subject(log);
  return run_task_suite(spec, *subject);
}

}  // namespace halluc
