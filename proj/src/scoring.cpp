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

#include "gasc/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "gasc/error.hpp"

namespace gasc::scoring {

namespace fs = std::filesystem;
using adapters::Verdict;
using corpus::ExpectedStatus;

std::string_view to_string(ValidationClass c) {
  switch (c) {
    case ValidationClass::Good: return "good";
    case ValidationClass::Fair: return "fair";
    case ValidationClass::Poor: return "poor";
  }
  return "?";
}

ValidationClass classify_validation_time(double t) {
  if (!(t >= 0)) {
    throw Error(ErrorCode::InvalidMeasurement, "validation time must be >= 0, got " +
                                                   std::to_string(t));
  }
  if (t <= 1.5) return ValidationClass::Good;
  if (t <= 3.0) return ValidationClass::Fair;
  return ValidationClass::Poor;
}

double de_bruijn_factor(std::size_t informal_size, std::size_t formal_size) {
  if (informal_size == 0 || formal_size == 0) {
    throw Error(ErrorCode::ZeroSize, "proof size is zero");
  }
  return static_cast<double>(informal_size) / static_cast<double>(formal_size);
}

std::size_t normalized_size(std::string_view text) { return normalize_whitespace(text).size(); }

std::optional<double> de_bruijn_factor(const std::optional<std::string>& informal,
                                       const std::optional<std::string>& formal) {
  if (!informal || !formal) return std::nullopt;
  return de_bruijn_factor(normalized_size(*informal), normalized_size(*formal));
}

std::string_view to_string(Correctness c) {
  switch (c) {
    case Correctness::CorrectSolve: return "CorrectSolve";
    case Correctness::IncorrectClaim: return "IncorrectClaim";
    case Correctness::NoSolve: return "NoSolve";
    case Correctness::NovelClaim: return "NovelClaim";
  }
  return "?";
}

Correctness judge(Verdict v, ExpectedStatus expected) {
  if (!adapters::is_definite(v)) return Correctness::NoSolve;
  if (expected == ExpectedStatus::Open) return Correctness::NovelClaim;
  const bool agrees = (v == Verdict::Proved) == (expected == ExpectedStatus::Proved);
  return agrees ? Correctness::CorrectSolve : Correctness::IncorrectClaim;
}

TruthTable truth_from(const std::vector<corpus::ProblemEntry>& entries) {
  TruthTable t;
  for (const auto& e : entries) t[e.id()] = {e.expected_status, e.informal_proof};
  return t;
}

TruthTable truth_from(const runner::RunPlan& plan) {
  TruthTable t;
  for (const auto& p : plan.problems) t[p.id] = {p.expected_status, std::nullopt};
  return t;
}

Json AdjudicatedResult::to_json() const {
  Json j = record.to_json();
  j["correctness"] = to_string(correctness);
  j["validation_class"] = validation_class ? Json(to_string(*validation_class)) : Json(nullptr);
  j["db_factor"] = db_factor ? Json(*db_factor) : Json(nullptr);
  j["repetitions"] = repetitions;
  return j;
}

std::vector<AdjudicatedResult> adjudicate(const std::vector<runner::RunRecord>& records,
                                          const TruthTable& truth,
                                          const fs::path& artifact_root) {
  std::map<std::pair<std::string, std::string>, std::vector<const runner::RunRecord*>> jobs;
  for (const auto& r : records) {
    if (!truth.count(r.problem_id)) {
      throw Error(ErrorCode::UnknownProblemId, r.problem_id);
    }
    jobs[{r.problem_id, r.adapter_name}].push_back(&r);
  }

  std::vector<AdjudicatedResult> out;
  out.reserve(jobs.size());
  for (auto& [key, reps] : jobs) {
    const runner::RunRecord* best = reps.front();
    double min_cpu = best->cpu_time_s;
    for (const auto* r : reps) {
      if (std::tie(r->wall_time_s, r->repetition_index) <
          std::tie(best->wall_time_s, best->repetition_index)) {
        best = r;
      }
      min_cpu = std::min(min_cpu, r->cpu_time_s);
    }
    AdjudicatedResult a;
    a.record = *best;
    a.record.cpu_time_s = min_cpu;
    a.repetitions = static_cast<int>(reps.size());
    const GroundTruth& gt = truth.at(key.first);
    a.correctness = judge(best->verdict, gt.expected);
    if (a.correctness == Correctness::CorrectSolve) {
      a.validation_class = classify_validation_time(best->wall_time_s);
      if (!artifact_root.empty() && best->proof_artifact_path && gt.informal_proof) {
        std::optional<std::string> formal;
        try {
          formal = read_file(artifact_root / *best->proof_artifact_path);
        } catch (const Error&) {
        }
        try {
          a.db_factor = de_bruijn_factor(gt.informal_proof, formal);
        } catch (const Error&) {
          // Empty proof text: factor unavailable.
        }
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

bool ranks_before(const RankingEntry& a, const RankingEntry& b) {
  return std::make_tuple(a.tier, -a.solved, a.total_time_s, std::string_view(a.adapter_name)) <
         std::make_tuple(b.tier, -b.solved, b.total_time_s, std::string_view(b.adapter_name));
}

Json Ranking::to_json() const {
  Json list = Json::array();
  int pos = 1;
  for (const auto& e : entries) {
    Json x;
    x["rank"] = pos++;
    x["adapter_name"] = e.adapter_name;
    x["tier"] = e.tier;
    x["solved"] = e.solved;
    x["incorrect"] = e.incorrect;
    x["novel"] = e.novel;
    x["total_time_s"] = e.total_time_s;
    Json cc;
    cc["good"] = e.class_counts.good;
    cc["fair"] = e.class_counts.fair;
    cc["poor"] = e.class_counts.poor;
    x["class_counts"] = std::move(cc);
    x["readable_proofs"] = adapters::to_string(e.readable_proofs);
    list.push_back(std::move(x));
  }
  Json j;
  j["entries"] = std::move(list);
  return j;
}

Ranking Ranking::from_json(const Json& j) {
  try {
    Ranking r;
    for (const auto& x : j.at("entries")) {
      RankingEntry e;
      e.adapter_name = x.at("adapter_name").get<std::string>();
      e.tier = x.at("tier").get<int>();
      e.solved = x.at("solved").get<int>();
      e.incorrect = x.at("incorrect").get<int>();
      e.novel = x.value("novel", 0);
      e.total_time_s = x.at("total_time_s").get<double>();
      const Json& cc = x.at("class_counts");
      e.class_counts = {cc.at("good").get<int>(), cc.at("fair").get<int>(),
                        cc.at("poor").get<int>()};
      auto rp = adapters::readability_from(x.at("readable_proofs").get<std::string>());
      if (!rp) throw Error(ErrorCode::SchemaError, "bad readable_proofs in ranking");
      e.readable_proofs = *rp;
      r.entries.push_back(std::move(e));
    }
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("ranking: ") + e.what());
  }
}

std::string Ranking::serialize() const { return dump_pretty(to_json()); }

Ranking rank(const std::vector<AdjudicatedResult>& results,
             const std::vector<runner::PlanAdapter>& adapters) {
  std::map<std::string, RankingEntry> by_name;
  for (const auto& a : adapters) {
    RankingEntry& e = by_name[a.name];
    e.adapter_name = a.name;
    e.readable_proofs = a.readable_proofs;
  }
  // Sum times in canonical order so the floating-point total does not depend
  // on input order.
  std::vector<const AdjudicatedResult*> sorted;
  sorted.reserve(results.size());
  for (const auto& r : results) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return runner::canonical_less(a->record, b->record);
  });
  for (const auto* r : sorted) {
    RankingEntry& e = by_name[r->record.adapter_name];
    e.adapter_name = r->record.adapter_name;
    switch (r->correctness) {
      case Correctness::CorrectSolve:
        ++e.solved;
        e.total_time_s += r->record.wall_time_s;
        switch (classify_validation_time(r->record.wall_time_s)) {
          case ValidationClass::Good: ++e.class_counts.good; break;
          case ValidationClass::Fair: ++e.class_counts.fair; break;
          case ValidationClass::Poor: ++e.class_counts.poor; break;
        }
        break;
      case Correctness::IncorrectClaim: ++e.incorrect; break;
      case Correctness::NovelClaim: ++e.novel; break;
      case Correctness::NoSolve: break;
    }
  }
  Ranking out;
  for (auto& [name, e] : by_name) {
    e.tier = e.incorrect > 0 ? 1 : 0;
    e.total_time_s = round_micro(e.total_time_s);
    out.entries.push_back(std::move(e));
  }
  std::sort(out.entries.begin(), out.entries.end(), ranks_before);
  return out;
}

Json adjudicated_to_json(const std::vector<AdjudicatedResult>& results) {
  Json list = Json::array();
  for (const auto& r : results) list.push_back(r.to_json());
  Json j;
  j["results"] = std::move(list);
  return j;
}

Ranking rank_results(const runner::Results& results) {
  return rank(adjudicate(results.records, truth_from(results.plan)), results.plan.adapters);
}

}  // namespace gasc::scoring
