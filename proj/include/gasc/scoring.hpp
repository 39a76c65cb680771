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

// Adjudication of verdicts against ground truth, proof quality measures and
// the competition ranking.

#ifndef GASC_SCORING_HPP
#define GASC_SCORING_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasc/corpus.hpp"
#include "gasc/runner.hpp"
#include "gasc/util.hpp"

namespace gasc::scoring {

enum class ValidationClass { Good, Fair, Poor };
std::string_view to_string(ValidationClass c);

// good: t <= 1.5s, fair: 1.5s < t <= 3s, poor: t > 3s. Throws
// InvalidMeasurement for negative or NaN t.
ValidationClass classify_validation_time(double t);

// informal / formal. Throws ZeroSize when either size is 0.
double de_bruijn_factor(std::size_t informal_size, std::size_t formal_size);
// Byte count after collapsing whitespace runs and trimming.
std::size_t normalized_size(std::string_view text);
// nullopt (unavailable) when either text is missing.
std::optional<double> de_bruijn_factor(const std::optional<std::string>& informal,
                                       const std::optional<std::string>& formal);

enum class Correctness { CorrectSolve, IncorrectClaim, NoSolve, NovelClaim };
std::string_view to_string(Correctness c);
Correctness judge(adapters::Verdict v, corpus::ExpectedStatus expected);

struct GroundTruth {
  corpus::ExpectedStatus expected = corpus::ExpectedStatus::Proved;
  std::optional<std::string> informal_proof;
};
using TruthTable = std::map<std::string, GroundTruth>;

TruthTable truth_from(const std::vector<corpus::ProblemEntry>& entries);
// Expected statuses only (no informal proofs), as recorded in a run plan.
TruthTable truth_from(const runner::RunPlan& plan);

struct AdjudicatedResult {
  runner::RunRecord record;  // the representative repetition
  Correctness correctness = Correctness::NoSolve;
  std::optional<ValidationClass> validation_class;  // set iff CorrectSolve
  std::optional<double> db_factor;
  int repetitions = 1;

  Json to_json() const;
};

// Repetitions of one (problem, adapter) job collapse to the one with the
// smallest wall time (lowest index on ties) carrying the minimum CPU time of
// all repetitions. Proof artifacts are looked up below `artifact_root` when
// given. Output is in canonical order. Throws UnknownProblemId.
std::vector<AdjudicatedResult> adjudicate(const std::vector<runner::RunRecord>& records,
                                          const TruthTable& truth,
                                          const std::filesystem::path& artifact_root = {});

struct ClassCounts {
  int good = 0;
  int fair = 0;
  int poor = 0;
  bool operator==(const ClassCounts&) const = default;
};

struct RankingEntry {
  std::string adapter_name;
  int tier = 0;
  int solved = 0;
  int incorrect = 0;
  int novel = 0;
  double total_time_s = 0;
  ClassCounts class_counts;
  adapters::Readability readable_proofs = adapters::Readability::NotAvailable;
  bool operator==(const RankingEntry&) const = default;
};

// Tier 0 (no incorrect claims) before tier 1, then solved desc,
// total_time_s asc, adapter_name asc.
bool ranks_before(const RankingEntry& a, const RankingEntry& b);

struct Ranking {
  std::vector<RankingEntry> entries;

  Json to_json() const;
  static Ranking from_json(const Json& j);
  std::string serialize() const;
  bool operator==(const Ranking&) const = default;
};

// Every adapter in `adapters` gets an entry even without records.
Ranking rank(const std::vector<AdjudicatedResult>& results,
             const std::vector<runner::PlanAdapter>& adapters);

Json adjudicated_to_json(const std::vector<AdjudicatedResult>& results);

// Adjudicate + rank over a results document, ground truth from its plan.
Ranking rank_results(const runner::Results& results);

}  // namespace gasc::scoring

#endif  // GASC_SCORING_HPP
