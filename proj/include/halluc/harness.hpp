#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "halluc/ground_truth.hpp"
#include "halluc/learners.hpp"
#include "halluc/llm_client.hpp"
#include "halluc/tasks.hpp"

namespace halluc {

// ---------------------------------------------------------------------------
// Training loop

/// Termination condition for the training procedure. max_samples is the
/// mandatory hard bound; a nonzero consistency_window additionally stops the
/// loop once that many consecutive updates left the state's behavior
/// unchanged.
struct StoppingPolicy {
  std::uint64_t max_samples = 0;
  std::uint64_t consistency_window = 0;
};

struct TrainingRun {
  StatePtr state;
  std::uint64_t samples_used = 0;
  Str stop_reason;  // "max_samples" | "consistency_window"
};

/// Feeds the truth's canonical stream (s_0, f(s_0)), (s_1, f(s_1)), ... into
/// a fresh learner state, checking the stopping condition before each
/// retrieval, and returns the deployed state.
TrainingRun run_training_procedure(const LearnerFamily& family,
                                   GroundTruth& truth,
                                   const StoppingPolicy& stopping,
                                   std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Detection and classification

/// Indices i in [lo, hi) with state(s_i) != f(s_i), ascending. Freezes the
/// truth prefix through hi, then scans (parallel when enabled). An empty
/// result certifies freedom on the scanned prefix only, never globally.
std::vector<EnumIndex> detect_hallucination(const LearnerState& state,
                                            GroundTruth& truth, EnumIndex lo,
                                            EnumIndex hi, bool parallel = true);

enum class WorldRelation { Total, Some, FreeOnPrefix };

Str world_relation_name(WorldRelation relation);

/// Total when every scanned index disagrees, FreeOnPrefix when none does,
/// Some otherwise. The scan range must be nonempty; every claim is relative
/// to the scanned prefix.
WorldRelation classify_world_relation(const LearnerState& state,
                                      GroundTruth& truth, EnumIndex lo,
                                      EnumIndex hi, bool parallel = true);

// ---------------------------------------------------------------------------
// Subjects

/// Anything that can answer task prompts: zoo learners, mocks, a live
/// endpoint, or a recorded transcript.
class Subject {
 public:
  virtual ~Subject() = default;
  virtual Str name() const = 0;
  /// May throw; the suite runner records the failure as a trial error.
  virtual Str complete(const Str& prompt, std::uint64_t seed) = 0;
};

using SubjectPtr = std::shared_ptr<Subject>;

SubjectPtr make_zoo_subject(FamilyPtr family, std::uint64_t seed = 0);
/// Answers every prompt of the given tasks with the oracle-correct response.
SubjectPtr make_oracle_subject(const std::vector<TaskSpec>& tasks);
/// Truncates the inner subject's responses to at most cap_chars characters.
SubjectPtr make_truncating_subject(SubjectPtr inner, std::size_t cap_chars);
SubjectPtr make_endpoint_subject(EndpointConfig config,
                                 std::shared_ptr<TranscriptLog> log);
/// Replays recorded responses, matched by (prompt hash, seed); a prompt
/// without a successful transcript entry raises an error (reported, never
/// skipped).
SubjectPtr make_replay_subject(std::shared_ptr<const TranscriptLog> log);
/// Wraps any subject and appends every completion (or failure) to the log.
SubjectPtr make_recording_subject(SubjectPtr inner,
                                  std::shared_ptr<TranscriptLog> log);

// ---------------------------------------------------------------------------
// Experiment specification

struct TaskConfig {
  TaskKind kind = TaskKind::List;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t item_count = 0;
  Str alphabet = "ab";
  std::uint64_t seed = 0;
};

TaskSpec generate_task(const TaskConfig& config);

/// Declarative experiment: subject, task list, replication seeds. Subject
/// spec strings:
///   zoo:<learner spec>   (parsed against the task alphabet "ab")
///   oracle               (perfect-oracle mock)
///   truncate:<cap>       (oracle mock truncated to cap characters)
///   endpoint             (uses the embedded endpoint config)
struct ExperimentSpec {
  Str name;
  Str subject;
  std::vector<TaskConfig> tasks;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  bool has_endpoint = false;
  EndpointConfig endpoint;
};

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
/// FNV-1a64 of the canonical (sorted-key) spec JSON.
Str experiment_spec_hash(const ExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Records and reports

struct TrialRecord {
  Str task_id;
  std::uint64_t seed = 0;
  Str outcome;  // pass | fail | unknown_ok | malformed | error
  nlohmann::json verdict;
  Str error;
  std::vector<Str> responses;
  std::uint64_t wall_ms = 0;  // recorded in JSONL, excluded from reports
};

nlohmann::json trial_record_to_json(const TrialRecord& record);
TrialRecord trial_record_from_json(const nlohmann::json& j);
void trial_records_save_jsonl(const Str& path,
                              const std::vector<TrialRecord>& records);
std::vector<TrialRecord> trial_records_load_jsonl(const Str& path);

struct ReportRow {
  Str task_id;
  Str cell;  // pass | unknown_ok | fail | inconclusive
  std::vector<Str> per_seed;
};

struct Report {
  Str experiment;
  Str subject;
  Str spec_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<ReportRow> rows;
};

/// Success is any-of-seeds: a row passes when any seed passed (unknown_ok
/// counts); it is inconclusive only when every seed errored.
Report report_from_records(const ExperimentSpec& spec,
                           const std::vector<TrialRecord>& records);

nlohmann::json report_to_json(const Report& report);
Str report_to_markdown(const Report& report);
Str report_to_csv(const Report& report);

// ---------------------------------------------------------------------------
// Suite execution

struct SuiteResult {
  std::vector<TrialRecord> records;
  Report report;
};

/// Builds the spec's subject. An endpoint subject records into endpoint_log
/// when one is supplied.
SubjectPtr resolve_subject(const ExperimentSpec& spec,
                           std::shared_ptr<TranscriptLog> endpoint_log = {});

SuiteResult run_task_suite(const ExperimentSpec& spec, Subject& subject);

/// Re-runs the suite against a recorded transcript; prompts without a
/// transcript entry surface as trial errors.
SuiteResult replay_transcripts(const Str& transcript_path,
                               const ExperimentSpec& spec);

}  // namespace halluc
