// Copyright 2026 The GASC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Competition execution: the problems x adapters x repetitions job matrix,
// the append-only event log (events.jsonl) and its fold into results.json.
//
// Event kinds, one JSON object per line:
//   run_started  {manifest, plan}
//   job_started  {problem_id, adapter_name, repetition_index, started_at}
//   job_finished {record}
//   run_finished {summary}
// results.json is always produced by folding the log, so replaying the log
// later yields the same bytes.

#ifndef GASC_RUNNER_HPP
#define GASC_RUNNER_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasc/adapters.hpp"
#include "gasc/corpus.hpp"
#include "gasc/process.hpp"
#include "gasc/util.hpp"

namespace gasc::runner {

enum class TimingMode { Parallel, Serial };
std::string_view to_string(TimingMode m);
std::optional<TimingMode> timing_mode_from(std::string_view s);

struct RunConfig {
  double wall_limit_s = 10.0;
  double cpu_limit_s = 10.0;
  int mem_limit_mib = 1024;
  int workers = 1;
  TimingMode timing_mode = TimingMode::Serial;
  int repetitions = 1;
  double grace_kill_s = 0.5;
  bool keep_workdirs = false;

  // Throws InvalidConfig.
  void validate() const;
  Json to_json() const;
  process::Limits limits() const;
};

struct RunRecord {
  std::string problem_id;
  std::string adapter_name;
  int repetition_index = 0;
  adapters::Verdict verdict = adapters::Verdict::Error;
  double wall_time_s = 0;
  double cpu_time_s = 0;
  double max_rss_mib = 0;
  std::optional<int> exit_code;
  std::optional<int> term_signal;
  process::LimitBreach limit = process::LimitBreach::None;
  std::string stdout_excerpt;
  std::string stderr_excerpt;
  std::optional<std::string> proof_artifact_path;  // relative to the run dir
  std::string diagnostic;

  Json to_json() const;
  static RunRecord from_json(const Json& j);
  bool operator==(const RunRecord&) const = default;
};

// Canonical record order: (problem_id, adapter_name, repetition_index).
bool canonical_less(const RunRecord& a, const RunRecord& b);
void sort_canonical(std::vector<RunRecord>& records);

struct HostInfo {
  std::string os;
  std::string cpu_model;
  unsigned logical_cores = 0;
  std::uint64_t total_ram_mib = 0;
};
HostInfo capture_host();

struct RunManifest {
  std::string run_id;
  std::string started_at;
  HostInfo host;
  std::string config_hash;
  std::string tool_version;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

struct PlanProblem {
  std::string id;
  std::string axiom_system;
  std::string conjecture_type;
  corpus::ExpectedStatus expected_status = corpus::ExpectedStatus::Proved;
};

struct PlanAdapter {
  std::string name;
  std::string method;
  std::string input_dialect;
  adapters::Readability readable_proofs = adapters::Readability::NotAvailable;
};

// What the run intends to execute, written into run_started.
struct RunPlan {
  std::vector<PlanProblem> problems;
  std::vector<PlanAdapter> adapters;
  std::vector<std::string> skipped_adapters;
  int repetitions = 1;
  std::size_t total_jobs = 0;
  Json config;

  Json to_json() const;
  static RunPlan from_json(const Json& j);
};

struct Results {
  RunManifest manifest;
  RunPlan plan;
  bool complete = false;
  std::vector<RunRecord> records;  // canonical order

  Json to_json() const;
  std::string serialize() const;  // canonical results.json bytes
};

struct InFlightJob {
  std::string problem_id;
  std::string adapter_name;
  int repetition_index = 0;
  double started_at = 0;  // unix seconds
};

// Fold of a log prefix. Lines not terminated by '\n' are ignored, so a
// concurrently growing log can be read at any instant.
struct LogSnapshot {
  Results results;
  std::vector<InFlightJob> in_flight;
  std::size_t bytes = 0;  // length of the consumed prefix
  bool truncated = false;  // stopped at an undecodable line
};

// Throws MissingRunStart when no run_started event leads the log.
LogSnapshot fold_events(std::string_view log_text);
Results replay_log(const std::filesystem::path& events_path);

Json summary_of(const std::vector<RunRecord>& records);

struct CompetitionInput {
  std::vector<corpus::ProblemEntry> problems;
  std::vector<adapters::AdapterSpec> adapters;
  Json corpus_manifest;  // hashed into the run manifest
  // Called after each job, serialized; `done` counts finished jobs.
  std::function<void(const RunRecord&, std::size_t done, std::size_t total)> progress;
};

struct CompetitionOutput {
  Results results;
  std::filesystem::path events_path;
  std::filesystem::path results_path;
};

inline constexpr std::string_view kEventsFile = "events.jsonl";
inline constexpr std::string_view kResultsFile = "results.json";
inline constexpr std::string_view kLockFile = ".run.lock";

// Throws OutDirNotWritable, NoRunnableAdapters, InvalidConfig. A failing job
// is recorded with verdict Error; it never aborts the run.
CompetitionOutput run_competition(const CompetitionInput& input, const RunConfig& config,
                                  const std::filesystem::path& out_dir);

// True while a runner holds the lock file in `run_dir`.
bool runner_alive(const std::filesystem::path& run_dir);

}  // namespace gasc::runner

#endif  // GASC_RUNNER_HPP
