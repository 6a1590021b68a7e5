#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"

#include "halluc/adversaries.hpp"
#include "halluc/harness.hpp"
#include "halluc/kernels.hpp"
#include "halluc/registry.hpp"
#include "halluc/string_space.hpp"
#include "halluc/tasks.hpp"

namespace {

using namespace halluc;

std::unique_ptr<GroundTruth> make_truth(const std::string& kind,
                                        const TokenAlphabet& alphabet) {
  if (kind == "diagonal") {
    return std::make_unique<DiagonalTruth>(default_zoo(alphabet), alphabet);
  }
  if (kind == "infinite") {
    return std::make_unique<InfiniteDiagonalTruth>(default_zoo(alphabet),
                                                   alphabet);
  }
  if (kind.rfind("singleton:", 0) == 0) {
    return make_singleton_truth(parse_learner_spec(kind.substr(10), alphabet),
                                alphabet);
  }
  if (kind.rfind("order:", 0) == 0) {
    auto adversary = std::make_shared<OrderAdversary>(
        parse_learner_spec(kind.substr(6), alphabet), alphabet);
    return std::make_unique<OrderTruth>(std::move(adversary));
  }
  if (kind == "subsetsum") {
    return std::make_unique<SubsetSumTruth>();
  }
  throw CLI::ValidationError(
      "truth must be diagonal, infinite, singleton:<learner>, "
      "order:<learner>, or subsetsum");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
  nlohmann::json j;
  in >> j;
  return experiment_spec_from_json(j);
}

void emit_suite_outputs(const SuiteResult& result, const std::string& records,
                        const std::string& json_path, const std::string& md,
                        const std::string& csv) {
  if (!records.empty()) trial_records_save_jsonl(records, result.records);
  if (!json_path.empty()) {
    write_text(json_path, report_to_json(result.report).dump(2) + "\n");
  }
  if (!md.empty()) write_text(md, report_to_markdown(result.report));
  if (!csv.empty()) write_text(csv, report_to_csv(result.report));
  std::cout << report_to_markdown(result.report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Executable laboratory for hallucination-by-construction "
               "experiments on toy learners"};
  app.require_subcommand(1);

  std::string alphabet_tokens = "ab";
  app.add_option("--alphabet", alphabet_tokens,
                 "Token alphabet for string enumeration")
      ->capture_default_str();

  // enumerate -------------------------------------------------------------
  auto* cmd_enum = app.add_subcommand(
      "enumerate", "Map indices to strings of the shortlex enumeration");
  std::uint64_t enum_lo = 0;
  std::uint64_t enum_hi = 10;
  std::string enum_string;
  bool enum_pairs = false;
  cmd_enum->add_option("--lo", enum_lo, "First index");
  cmd_enum->add_option("--hi", enum_hi, "One past the last index");
  cmd_enum->add_option("--string", enum_string,
                       "Print the index of this string instead");
  cmd_enum->add_flag("--pairs", enum_pairs,
                     "Also decode each index through the Cantor pairing");

  // adversary -------------------------------------------------------------
  auto* cmd_adv = app.add_subcommand("adversary",
                                     "Build or inspect adversarial truths");
  cmd_adv->require_subcommand(1);
  std::string adv_truth = "diagonal";
  std::uint64_t adv_count = 20;
  std::uint64_t adv_index = 0;
  std::string adv_out = "-";
  std::string adv_subject = "const:answer=yes";
  std::uint64_t adv_stages = 10;
  std::string adv_kind = "order";

  auto* adv_build = cmd_adv->add_subcommand(
      "build", "Run an order/iso adversary for a number of stages");
  adv_build->add_option("--subject", adv_subject, "Learner spec to defeat")
      ->capture_default_str();
  adv_build->add_option("--stages", adv_stages, "Stages to run")
      ->capture_default_str();
  adv_build
      ->add_option("--kind", adv_kind, "Adversary kind: order or iso")
      ->capture_default_str();

  auto* adv_eval = cmd_adv->add_subcommand(
      "eval", "Evaluate a truth at one enumeration index");
  adv_eval->add_option("--truth", adv_truth, "Truth kind")
      ->capture_default_str();
  adv_eval->add_option("--index", adv_index, "Enumeration index")
      ->required();

  auto* adv_dump = cmd_adv->add_subcommand(
      "dump", "Dump {i, prompt, value} JSONL for a truth prefix");
  adv_dump->add_option("--truth", adv_truth, "Truth kind")
      ->capture_default_str();
  adv_dump->add_option("--count", adv_count, "Prefix length")
      ->capture_default_str();
  adv_dump->add_option("--out", adv_out, "Output path, - for stdout")
      ->capture_default_str();

  // train ------------------------------------------------------------------
  auto* cmd_train = app.add_subcommand(
      "train", "Run the training loop against a truth and report the stop");
  std::string train_family = "memorizer";
  std::string train_truth = "diagonal";
  std::uint64_t train_max = 100;
  std::uint64_t train_window = 0;
  std::vector<std::string> train_probes;
  cmd_train->add_option("--family", train_family, "Learner spec")
      ->capture_default_str();
  cmd_train->add_option("--truth", train_truth, "Truth kind")
      ->capture_default_str();
  cmd_train->add_option("--max-samples", train_max, "Hard sample bound")
      ->capture_default_str();
  cmd_train->add_option("--window", train_window,
                        "Consistency window (0 disables)");
  cmd_train->add_option("--probe", train_probes,
                        "Prompts to answer with the deployed state");

  // detect -----------------------------------------------------------------
  auto* cmd_detect = app.add_subcommand(
      "detect", "Scan a trained state for disagreements with a truth");
  std::string detect_family = "memorizer";
  std::string detect_truth = "diagonal";
  std::uint64_t detect_train = 0;
  std::uint64_t detect_lo = 0;
  std::uint64_t detect_hi = 50;
  bool detect_serial = false;
  cmd_detect->add_option("--family", detect_family, "Learner spec")
      ->capture_default_str();
  cmd_detect->add_option("--truth", detect_truth, "Truth kind")
      ->capture_default_str();
  cmd_detect->add_option("--train", detect_train,
                         "Samples to train on before scanning");
  cmd_detect->add_option("--lo", detect_lo, "Scan start")->capture_default_str();
  cmd_detect->add_option("--hi", detect_hi, "Scan end (exclusive)")
      ->capture_default_str();
  cmd_detect->add_flag("--serial", detect_serial,
                       "Force the serial scan kernel");

  // suite ------------------------------------------------------------------
  auto* cmd_suite = app.add_subcommand("suite", "Run or re-render task suites");
  cmd_suite->require_subcommand(1);
  std::string suite_spec_path;
  std::string suite_records = "records.jsonl";
  std::string suite_report_json;
  std::string suite_report_md;
  std::string suite_report_csv;
  std::string suite_transcript;

  auto* suite_run = cmd_suite->add_subcommand("run", "Execute an experiment");
  suite_run->add_option("--spec", suite_spec_path, "Experiment JSON file")
      ->required();
  suite_run->add_option("--records", suite_records, "Trial records JSONL out")
      ->capture_default_str();
  suite_run->add_option("--report-json", suite_report_json, "Report JSON out");
  suite_run->add_option("--report-md", suite_report_md, "Report markdown out");
  suite_run->add_option("--report-csv", suite_report_csv, "Report CSV out");
  suite_run->add_option("--transcript", suite_transcript,
                        "Record all subject responses to this JSONL");

  auto* suite_report = cmd_suite->add_subcommand(
      "report", "Rebuild a report from stored trial records");
  suite_report->add_option("--spec", suite_spec_path, "Experiment JSON file")
      ->required();
  suite_report->add_option("--records", suite_records, "Trial records JSONL in")
      ->capture_default_str();
  suite_report->add_option("--report-json", suite_report_json,
                           "Report JSON out");
  suite_report->add_option("--report-md", suite_report_md,
                           "Report markdown out");
  suite_report->add_option("--report-csv", suite_report_csv, "Report CSV out");

  // replay -----------------------------------------------------------------
  auto* cmd_replay = app.add_subcommand(
      "replay", "Re-validate an experiment from a recorded transcript");
  std::string replay_transcript;
  std::string replay_records;
  cmd_replay->add_option("--spec", suite_spec_path, "Experiment JSON file")
      ->required();
  cmd_replay->add_option("--transcript", replay_transcript, "Transcript JSONL")
      ->required();
  cmd_replay->add_option("--records", replay_records,
                         "Trial records JSONL out");
  cmd_replay->add_option("--report-json", suite_report_json, "Report JSON out");
  cmd_replay->add_option("--report-md", suite_report_md, "Report markdown out");
  cmd_replay->add_option("--report-csv", suite_report_csv, "Report CSV out");

  CLI11_PARSE(app, argc, argv);

  try {
    const TokenAlphabet alphabet(alphabet_tokens);

    if (*cmd_enum) {
      if (!enum_string.empty()) {
        std::cout << string_index(enum_string, alphabet) << "\n";
        return 0;
      }
      for (std::uint64_t i = enum_lo; i < enum_hi; ++i) {
        nlohmann::json j{{"i", i}, {"s", enumerate_string(i, alphabet)}};
        if (enum_pairs) {
          auto [a, b] = cantor_unpair(i);
          j["pair"] = {a, b};
        }
        std::cout << j.dump() << "\n";
      }
      return 0;
    }

    if (*cmd_adv) {
      if (*adv_build) {
        nlohmann::json out = nlohmann::json::array();
        auto dump_records = [&out](const std::vector<StageRecord>& records) {
          for (const auto& r : records) {
            out.push_back({{"stage", r.stage},
                           {"query", r.query},
                           {"subject_answer", r.subject_answer},
                           {"parseable", r.parseable},
                           {"first_branch", r.first_branch},
                           {"truth_answer", r.truth_answer}});
          }
        };
        Str estimate;
        if (adv_kind == "order") {
          OrderAdversary adversary(parse_learner_spec(adv_subject, alphabet),
                                   alphabet);
          adversary.ensure_stages(adv_stages);
          dump_records(adversary.transcript());
        } else if (adv_kind == "iso") {
          IsoAdversary adversary(parse_learner_spec(adv_subject, alphabet),
                                 alphabet);
          adversary.ensure_stages(adv_stages);
          dump_records(adversary.transcript());
          estimate = iso_order_type_estimate(adversary, adv_stages);
        } else {
          throw CLI::ValidationError("--kind must be order or iso");
        }
        for (const auto& j : out) std::cout << j.dump() << "\n";
        if (!estimate.empty()) {
          std::cout << "order type estimate: " << estimate << "\n";
        }
        return 0;
      }
      if (*adv_eval) {
        auto truth = make_truth(adv_truth, alphabet);
        nlohmann::json j{{"i", adv_index},
                         {"prompt", truth->prompt_at(adv_index)},
                         {"value", truth->value_at(adv_index)}};
        std::cout << j.dump() << "\n";
        return 0;
      }
      if (*adv_dump) {
        auto truth = make_truth(adv_truth, alphabet);
        Str lines;
        for (std::uint64_t i = 0; i < adv_count; ++i) {
          nlohmann::json j{{"i", i},
                           {"prompt", truth->prompt_at(i)},
                           {"value", truth->value_at(i)}};
          lines += j.dump() + "\n";
        }
        write_text(adv_out, lines);
        return 0;
      }
    }

    if (*cmd_train) {
      auto truth = make_truth(train_truth, alphabet);
      auto family = parse_learner_spec(train_family, alphabet);
      TrainingRun run = run_training_procedure(
          *family, *truth, {train_max, train_window});
      nlohmann::json j{{"family", family->spec()},
                       {"samples_used", run.samples_used},
                       {"stop_reason", run.stop_reason}};
      std::cout << j.dump() << "\n";
      for (const auto& probe : train_probes) {
        nlohmann::json p{{"prompt", probe}, {"answer", run.state->answer(probe)}};
        std::cout << p.dump() << "\n";
      }
      return 0;
    }

    if (*cmd_detect) {
      auto truth = make_truth(detect_truth, alphabet);
      auto family = parse_learner_spec(detect_family, alphabet);
      TrainingRun run =
          run_training_procedure(*family, *truth, {detect_train, 0});
      auto disagreements = detect_hallucination(*run.state, *truth, detect_lo,
                                                detect_hi, !detect_serial);
      WorldRelation relation = classify_world_relation(
          *run.state, *truth, detect_lo, detect_hi, !detect_serial);
      nlohmann::json j{{"family", family->spec()},
                       {"trained_samples", run.samples_used},
                       {"scan", {detect_lo, detect_hi}},
                       {"disagreements", disagreements},
                       {"relation", world_relation_name(relation)},
                       {"parallel_kernels", kernels_parallel_enabled()}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*cmd_suite) {
      ExperimentSpec spec = load_spec(suite_spec_path);
      if (*suite_run) {
        auto endpoint_log = std::make_shared<TranscriptLog>();
        SubjectPtr subject = resolve_subject(spec, endpoint_log);
        std::shared_ptr<TranscriptLog> recording;
        if (!suite_transcript.empty()) {
          recording = std::make_shared<TranscriptLog>();
          subject = make_recording_subject(std::move(subject), recording);
        }
        SuiteResult result = run_task_suite(spec, *subject);
        if (recording) recording->save_jsonl(suite_transcript);
        if (spec.subject == "endpoint" && !endpoint_log->entries().empty() &&
            suite_transcript.empty()) {
          endpoint_log->save_jsonl(suite_records + ".transcript.jsonl");
        }
        emit_suite_outputs(result, suite_records, suite_report_json,
                           suite_report_md, suite_report_csv);
        return 0;
      }
      if (*suite_report) {
        auto records = trial_records_load_jsonl(suite_records);
        Report report = report_from_records(spec, records);
        SuiteResult result{std::move(records), std::move(report)};
        emit_suite_outputs(result, "", suite_report_json, suite_report_md,
                           suite_report_csv);
        return 0;
      }
    }

    if (*cmd_replay) {
      ExperimentSpec spec = load_spec(suite_spec_path);
      SuiteResult result = replay_transcripts(replay_transcript, spec);
      emit_suite_outputs(result, replay_records, suite_report_json,
                         suite_report_md, suite_report_csv);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
