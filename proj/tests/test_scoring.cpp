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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>

#include "gasc/error.hpp"
#include "gasc/scoring.hpp"
#include "support/paths.hpp"
#include "support/results_gen.hpp"

using namespace gasc;
using namespace gasc::scoring;
using adapters::Verdict;
using corpus::ExpectedStatus;
using runner::PlanAdapter;
using runner::RunRecord;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

RunRecord rec(const std::string& problem, const std::string& adapter, Verdict v, double wall,
              int rep = 0) {
  RunRecord r;
  r.problem_id = problem;
  r.adapter_name = adapter;
  r.verdict = v;
  r.wall_time_s = wall;
  r.cpu_time_s = wall;
  r.repetition_index = rep;
  return r;
}

PlanAdapter adapter(const std::string& name,
                    adapters::Readability r = adapters::Readability::NotAvailable) {
  return {name, "m", "gclc", r};
}

std::vector<std::string> order(const Ranking& r) {
  std::vector<std::string> names;
  for (const auto& e : r.entries) names.push_back(e.adapter_name);
  return names;
}

// Independent stats: counts straight from verdict/expected pairs.
struct Stats {
  int solved = 0, incorrect = 0;
  double time = 0;
};

std::map<std::string, Stats> oracle_stats(const gasc::testing::ResultSet& s) {
  std::map<std::string, Stats> st;
  for (const auto& a : s.adapters) st[a.name];
  // Best repetition per job: smallest wall, then lowest index.
  std::map<std::pair<std::string, std::string>, RunRecord> best;
  for (const auto& r : s.records) {
    auto key = std::make_pair(r.problem_id, r.adapter_name);
    auto it = best.find(key);
    if (it == best.end() || r.wall_time_s < it->second.wall_time_s ||
        (r.wall_time_s == it->second.wall_time_s &&
         r.repetition_index < it->second.repetition_index)) {
      best[key] = r;
    }
  }
  for (const auto& [key, r] : best) {
    auto expected = s.truth.at(r.problem_id).expected;
    bool proved = r.verdict == Verdict::Proved, disproved = r.verdict == Verdict::Disproved;
    if (expected == ExpectedStatus::Open) continue;
    if ((proved && expected == ExpectedStatus::Proved) ||
        (disproved && expected == ExpectedStatus::Disproved)) {
      st[r.adapter_name].solved++;
      st[r.adapter_name].time += r.wall_time_s;
    } else if (proved || disproved) {
      st[r.adapter_name].incorrect++;
    }
  }
  return st;
}

// Brute force: the unique permutation in which every earlier entry is at
// least as good as every later one.
std::vector<std::string> oracle_order(const std::map<std::string, Stats>& st) {
  std::vector<std::string> names;
  for (const auto& [n, s] : st) names.push_back(n);
  std::sort(names.begin(), names.end());
  auto better = [&](const std::string& a, const std::string& b) {
    const Stats &x = st.at(a), &y = st.at(b);
    bool xs = x.incorrect == 0, ys = y.incorrect == 0;
    if (xs != ys) return xs;
    if (x.solved != y.solved) return x.solved > y.solved;
    if (std::abs(x.time - y.time) > 1e-9) return x.time < y.time;
    return a < b;
  };
  std::vector<std::string> result;
  do {
    bool ok = true;
    for (std::size_t i = 0; ok && i < names.size(); ++i) {
      for (std::size_t j = i + 1; ok && j < names.size(); ++j) ok = better(names[i], names[j]);
    }
    if (ok) {
      CHECK(result.empty());
      result = names;
    }
  } while (std::next_permutation(names.begin(), names.end()));
  return result;
}

}  // namespace

TEST_CASE("validation-time classes at the published boundaries") {
  CHECK(classify_validation_time(0) == ValidationClass::Good);
  CHECK(classify_validation_time(1.0) == ValidationClass::Good);
  CHECK(classify_validation_time(1.5) == ValidationClass::Good);
  CHECK(classify_validation_time(1.500001) == ValidationClass::Fair);
  CHECK(classify_validation_time(3.0) == ValidationClass::Fair);
  CHECK(classify_validation_time(3.0001) == ValidationClass::Poor);
  CHECK(classify_validation_time(100) == ValidationClass::Poor);
  CHECK(code_of([] { classify_validation_time(-0.1); }) == ErrorCode::InvalidMeasurement);
  CHECK(code_of([] { classify_validation_time(std::nan("")); }) == ErrorCode::InvalidMeasurement);
}

TEST_CASE("property: classification is monotone") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(0, 6);
  for (int i = 0; i < 2000; ++i) {
    double a = t(rng), b = t(rng);
    if (a > b) std::swap(a, b);
    CHECK(static_cast<int>(classify_validation_time(a)) <=
          static_cast<int>(classify_validation_time(b)));
  }
}

TEST_CASE("de Bruijn factor") {
  CHECK(de_bruijn_factor(400, 400) == 1.0);
  CHECK(de_bruijn_factor(200, 800) == 0.25);
  CHECK(code_of([] { de_bruijn_factor(100, 0); }) == ErrorCode::ZeroSize);
  CHECK(code_of([] { de_bruijn_factor(0, 100); }) == ErrorCode::ZeroSize);
  for (std::size_t s = 1; s < 500; s += 37) {
    CHECK(de_bruijn_factor(s, s) == 1.0);
    CHECK(de_bruijn_factor(3 * s, 50) == doctest::Approx(3 * de_bruijn_factor(s, 50)));
  }
  // Whitespace does not count.
  CHECK(normalized_size("  a \n\t b  ") == 3);
  CHECK(de_bruijn_factor(std::optional<std::string>("a  b"), std::optional<std::string>("a b c d e f")) ==
        doctest::Approx(3.0 / 11.0));
  CHECK_FALSE(de_bruijn_factor(std::nullopt, std::optional<std::string>("x")));
  CHECK_FALSE(de_bruijn_factor(std::optional<std::string>("x"), std::nullopt));
}

TEST_CASE("adjudication table") {
  const std::pair<Verdict, ExpectedStatus> cases[] = {
      {Verdict::Proved, ExpectedStatus::Proved},
      {Verdict::Disproved, ExpectedStatus::Disproved},
      {Verdict::Proved, ExpectedStatus::Disproved},
      {Verdict::Disproved, ExpectedStatus::Proved},
      {Verdict::Proved, ExpectedStatus::Open},
      {Verdict::Disproved, ExpectedStatus::Open},
  };
  const Correctness expected[] = {Correctness::CorrectSolve,   Correctness::CorrectSolve,
                                  Correctness::IncorrectClaim, Correctness::IncorrectClaim,
                                  Correctness::NovelClaim,     Correctness::NovelClaim};
  for (int i = 0; i < 6; ++i) CHECK(judge(cases[i].first, cases[i].second) == expected[i]);
  for (Verdict v : {Verdict::Unknown, Verdict::Timeout, Verdict::MemOut, Verdict::Error,
                    Verdict::Unparseable}) {
    for (auto e : {ExpectedStatus::Proved, ExpectedStatus::Disproved, ExpectedStatus::Open}) {
      CHECK(judge(v, e) == Correctness::NoSolve);
    }
  }
}

TEST_CASE("adjudicate examples") {
  TruthTable truth = {{"GEO0001", {ExpectedStatus::Proved, {}}},
                      {"GEO0002", {ExpectedStatus::Disproved, {}}},
                      {"GEO0003", {ExpectedStatus::Open, {}}}};
  auto out = adjudicate({rec("GEO0001", "a", Verdict::Proved, 0.8),
                         rec("GEO0002", "a", Verdict::Proved, 0.1),
                         rec("GEO0003", "a", Verdict::Proved, 0.1)},
                        truth);
  REQUIRE(out.size() == 3);
  CHECK(out[0].correctness == Correctness::CorrectSolve);
  CHECK(out[0].validation_class == ValidationClass::Good);
  CHECK(out[1].correctness == Correctness::IncorrectClaim);
  CHECK_FALSE(out[1].validation_class);
  CHECK(out[2].correctness == Correctness::NovelClaim);
  CHECK_FALSE(out[2].validation_class);

  CHECK(code_of([&] { adjudicate({rec("GEO0042", "a", Verdict::Proved, 1)}, truth); }) ==
        ErrorCode::UnknownProblemId);
}

TEST_CASE("repetitions collapse to the fastest run") {
  TruthTable truth = {{"GEO0001", {ExpectedStatus::Proved, {}}}};
  auto r0 = rec("GEO0001", "a", Verdict::Proved, 2.0, 0);
  auto r1 = rec("GEO0001", "a", Verdict::Proved, 1.2, 1);
  auto r2 = rec("GEO0001", "a", Verdict::Proved, 1.2, 2);
  r0.cpu_time_s = 0.5;
  r1.cpu_time_s = 0.9;
  auto out = adjudicate({r2, r0, r1}, truth);
  REQUIRE(out.size() == 1);
  CHECK(out[0].record.repetition_index == 1);
  CHECK(out[0].record.wall_time_s == 1.2);
  CHECK(out[0].record.cpu_time_s == 0.5);
  CHECK(out[0].repetitions == 3);
  CHECK(out[0].validation_class == ValidationClass::Good);
}

TEST_CASE("de Bruijn factor from proof artifacts") {
  gasc::testing::TempDir dir;
  write_file(dir / "proof.txt", std::string(40, 'x'));
  TruthTable truth = {{"GEO0001", {ExpectedStatus::Proved, std::string(10, 'y')}}};
  auto r = rec("GEO0001", "a", Verdict::Proved, 0.5);
  r.proof_artifact_path = "proof.txt";
  auto out = adjudicate({r}, truth, dir.path());
  REQUIRE(out[0].db_factor);
  CHECK(*out[0].db_factor == 0.25);
  CHECK_FALSE(adjudicate({r}, truth)[0].db_factor);
}

TEST_CASE("ranking examples") {
  TruthTable truth;
  for (int i = 1; i <= 12; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "GEO%04d", i);
    truth[id] = {i == 12 ? ExpectedStatus::Disproved : ExpectedStatus::Proved, {}};
  }
  SUBCASE("single adapter") {
    auto r = rank(adjudicate({rec("GEO0001", "a", Verdict::Proved, 1),
                              rec("GEO0002", "a", Verdict::Proved, 1),
                              rec("GEO0003", "a", Verdict::Proved, 1)},
                             truth),
                  {adapter("a")});
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].tier == 0);
    CHECK(r.entries[0].solved == 3);
    CHECK(r.to_json()["entries"][0]["rank"] == 1);
  }
  SUBCASE("time breaks ties") {
    std::vector<RunRecord> recs;
    for (int i = 1; i <= 5; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "GEO%04d", i);
      recs.push_back(rec(id, "A", Verdict::Proved, 2.0));
      recs.push_back(rec(id, "B", Verdict::Proved, 2.4));
    }
    auto r = rank(adjudicate(recs, truth), {adapter("B"), adapter("A")});
    CHECK(order(r) == std::vector<std::string>{"A", "B"});
    CHECK(r.entries[0].total_time_s == doctest::Approx(10));
    CHECK(r.entries[1].total_time_s == doctest::Approx(12));
    CHECK(r.entries[1].class_counts == ClassCounts{0, 5, 0});
  }
  SUBCASE("an incorrect claim demotes") {
    std::vector<RunRecord> recs;
    for (int i = 1; i <= 10; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "GEO%04d", i);
      recs.push_back(rec(id, "A", Verdict::Proved, 0.1));
    }
    recs.push_back(rec("GEO0012", "A", Verdict::Proved, 0.1));
    recs.push_back(rec("GEO0001", "B", Verdict::Proved, 1));
    recs.push_back(rec("GEO0002", "B", Verdict::Proved, 1));
    auto r = rank(adjudicate(recs, truth), {adapter("A"), adapter("B")});
    CHECK(order(r) == std::vector<std::string>{"B", "A"});
    CHECK(r.entries[1].tier == 1);
    CHECK(r.entries[1].solved == 10);
    CHECK(r.entries[1].incorrect == 1);
  }
  SUBCASE("adapters without records still rank") {
    auto r = rank({}, {adapter("z"), adapter("y", adapters::Readability::Maybe)});
    CHECK(order(r) == std::vector<std::string>{"y", "z"});
    CHECK(r.entries[0].readable_proofs == adapters::Readability::Maybe);
  }
}

TEST_CASE("ranking JSON round trip") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    auto s = gasc::testing::random_result_set(rng);
    auto r = rank(adjudicate(s.records, s.truth), s.adapters);
    CHECK(Ranking::from_json(r.to_json()) == r);
  }
}

TEST_CASE("property: ranking matches a brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    auto s = gasc::testing::random_result_set(rng);
    auto r = rank(adjudicate(s.records, s.truth), s.adapters);
    auto st = oracle_stats(s);
    CHECK(order(r) == oracle_order(st));
    for (const auto& e : r.entries) {
      CHECK(e.solved == st[e.adapter_name].solved);
      CHECK(e.incorrect == st[e.adapter_name].incorrect);
      CHECK(e.tier == (st[e.adapter_name].incorrect > 0 ? 1 : 0));
    }
  }
}

TEST_CASE("property: tier dominance, permutation invariance, solve conservation") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    auto s = gasc::testing::random_result_set(rng);
    auto adj = adjudicate(s.records, s.truth);
    auto r = rank(adj, s.adapters);

    bool seen_tier1 = false;
    for (const auto& e : r.entries) {
      if (e.incorrect > 0) seen_tier1 = true;
      if (e.incorrect == 0) CHECK_FALSE(seen_tier1);
    }

    auto shuffled = s.records;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto adapters_shuffled = s.adapters;
    std::shuffle(adapters_shuffled.begin(), adapters_shuffled.end(), rng);
    auto r2 = rank(adjudicate(shuffled, s.truth), adapters_shuffled);
    CHECK(r2 == r);
    CHECK(r2.serialize() == r.serialize());

    int correct = 0, total_solved = 0;
    for (const auto& a : adj) correct += a.correctness == Correctness::CorrectSolve;
    for (const auto& e : r.entries) total_solved += e.solved;
    CHECK(total_solved == correct);

    for (const auto& a : adj) {
      CHECK(a.validation_class.has_value() == (a.correctness == Correctness::CorrectSolve));
    }
    std::map<std::string, adapters::Readability> flags;
    for (const auto& a : s.adapters) flags[a.name] = a.readable_proofs;
    for (const auto& e : r.entries) CHECK(e.readable_proofs == flags[e.adapter_name]);
  }
}
