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

#include <random>
#include <set>
#include <sstream>

#include "gasc/error.hpp"
#include "gasc/report.hpp"
#include "support/paths.hpp"

using namespace gasc;
using namespace gasc::report;
using adapters::Verdict;
using gasc::testing::TempDir;

namespace {

runner::Results fake_results(int problems, std::vector<std::string> adapters,
                             std::vector<std::string> skipped, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  runner::Results r;
  r.manifest.run_id = "00000000-0000-4000-8000-000000000000";
  r.manifest.started_at = "2025-12-31T23:00:00Z";
  r.manifest.host = {"Linux 6.0", "Test CPU <fast> & cheap", 4, 8192};
  r.manifest.config_hash = std::string(64, 'a');
  r.manifest.tool_version = "0.2.0";
  r.complete = true;
  for (int i = 1; i <= problems; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "GEO%04d", i);
    r.plan.problems.push_back({id, "euclidean", "constructive",
                               i % 5 == 0 ? corpus::ExpectedStatus::Disproved
                                          : corpus::ExpectedStatus::Proved});
  }
  for (const auto& a : adapters) {
    r.plan.adapters.push_back({a, "m", "gclc", adapters::Readability::NotAvailable});
  }
  r.plan.skipped_adapters = skipped;
  r.plan.total_jobs = problems * adapters.size();
  for (const auto& p : r.plan.problems) {
    for (const auto& a : adapters) {
      runner::RunRecord rec;
      rec.problem_id = p.id;
      rec.adapter_name = a;
      rec.verdict = adapters::kAllVerdicts[rng() % 7];
      rec.wall_time_s = static_cast<double>(rng() % 4000) / 1000.0;
      r.records.push_back(rec);
    }
  }
  runner::sort_canonical(r.records);
  return r;
}

std::string strip_timestamp(std::string text, const std::string& ts) {
  for (auto pos = text.find(ts); pos != std::string::npos; pos = text.find(ts)) {
    text.replace(pos, ts.size(), "<ts>");
  }
  return text;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

const std::set<Format> kAll = {Format::Html, Format::Csv, Format::Json};

}  // namespace

TEST_CASE("matrix dimensions and vocabulary") {
  auto res = fake_results(20, {"fast-solver", "slow-solver", "hanger", "liar"}, {}, 1);
  TempDir out;
  render(res, scoring::rank_results(res), kAll, out.path(), "T");
  auto rows = parse_csv(read_file(out / "matrix.csv"));
  REQUIRE(rows.size() == 21);
  CHECK(rows[0] == std::vector<std::string>{"problem_id", "fast-solver", "hanger", "liar",
                                            "slow-solver"});
  const std::set<std::string> vocab = {"P", "D", "U", "T", "M", "E", "X", "skip"};
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 5);
    for (std::size_t k = 1; k < 5; ++k) CHECK(vocab.count(rows[i][k]));
  }
  // Codes agree with the records.
  for (const auto& r : res.records) {
    int row = std::stoi(r.problem_id.substr(3));
    int col = 0;
    for (std::size_t k = 1; k < 5; ++k) {
      if (rows[0][k] == r.adapter_name) col = static_cast<int>(k);
    }
    CHECK(rows[row][col] == adapters::verdict_code(r.verdict));
  }
}

TEST_CASE("skipped adapters show as skip") {
  auto res = fake_results(3, {"b"}, {"a"}, 2);
  auto rows = parse_csv(render_csv(build_matrix(res)));
  CHECK(rows[0] == std::vector<std::string>{"problem_id", "a", "b"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] == "skip");
}

TEST_CASE("html matrix lists each adapter and problem once") {
  auto res = fake_results(12, {"alpha-prover", "beta-prover", "gamma"}, {"delta-missing"}, 3);
  auto html = render_html(res, scoring::rank_results(res), build_matrix(res), "T");
  auto begin = html.find("<section id=\"matrix\">");
  auto end = html.find("</section>", begin);
  REQUIRE(begin != std::string::npos);
  REQUIRE(end != std::string::npos);
  const std::string matrix = html.substr(begin, end - begin);
  for (const auto& a : {"alpha-prover", "beta-prover", "gamma", "delta-missing"}) {
    CHECK(occurrences(matrix, a) == 1);
  }
  for (const auto& p : res.plan.problems) CHECK(occurrences(matrix, p.id) == 1);
  CHECK(html.find("<script") == std::string::npos);
  CHECK(html.find("http") == std::string::npos);
  // Host text is escaped.
  CHECK(html.find("Test CPU &lt;fast&gt; &amp; cheap") != std::string::npos);
}

TEST_CASE("empty result set") {
  auto res = fake_results(0, {}, {}, 4);
  TempDir out;
  render(res, scoring::rank_results(res), kAll, out.path(), "T");
  CHECK(read_file(out / "leaderboard.html").find("No records") != std::string::npos);
  CHECK(read_file(out / "matrix.csv") == "problem_id\n");
  Json j = Json::parse(read_file(out / "report.json"));
  CHECK(j["ranking"].empty());
  CHECK(j["matrix"]["rows"].empty());
}

TEST_CASE("determinism modulo the timestamp") {
  auto res = fake_results(15, {"x", "y", "z"}, {"w"}, 5);
  auto ranking = scoring::rank_results(res);
  TempDir a, b;
  render(res, ranking, kAll, a.path(), "2026-01-01T00:00:00Z");
  render(res, ranking, kAll, b.path(), "2026-06-30T12:34:56Z");
  for (const char* f : {"leaderboard.html", "matrix.csv", "report.json"}) {
    INFO(f);
    CHECK(strip_timestamp(read_file(a / f), "2026-01-01T00:00:00Z") ==
          strip_timestamp(read_file(b / f), "2026-06-30T12:34:56Z"));
  }
  CHECK(read_file(a / "matrix.csv") == read_file(b / "matrix.csv"));
  TempDir c;
  render(res, ranking, kAll, c.path(), "2026-01-01T00:00:00Z");
  CHECK(read_file(a / "leaderboard.html") == read_file(c / "leaderboard.html"));
}

TEST_CASE("formats and output errors") {
  CHECK(parse_formats("html,csv") == std::set<Format>{Format::Html, Format::Csv});
  CHECK(parse_formats("json") == std::set<Format>{Format::Json});
  CHECK_THROWS_AS(parse_formats("pdf"), Error);
  CHECK_THROWS_AS(parse_formats(""), Error);

  auto res = fake_results(2, {"a"}, {}, 6);
  TempDir out;
  auto files = render(res, scoring::rank_results(res), {Format::Csv}, out.path(), "T");
  CHECK(files.size() == 1);
  CHECK_FALSE(std::filesystem::exists(out / "leaderboard.html"));

  write_file(out / "file", "x");
  try {
    render(res, scoring::rank_results(res), kAll, out / "file" / "sub", "T");
    FAIL("expected OutDirNotWritable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutDirNotWritable);
  }
}

TEST_CASE("results and ranking files load back") {
  auto res = fake_results(6, {"a", "b"}, {}, 7);
  TempDir out;
  write_file(out / "results.json", res.serialize());
  auto ranking = scoring::rank_results(res);
  write_file(out / "ranking.json", ranking.serialize());
  auto back = load_results(out.path());
  CHECK(back.serialize() == res.serialize());
  CHECK(load_ranking(out.path()) == ranking);

  write_file(out / "bad.json", "{\"manifest\": {}}");
  CHECK_THROWS_AS(load_results(out / "bad.json"), Error);
}
