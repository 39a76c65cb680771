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

// Leaderboard artifacts: report.json, matrix.csv and a static
// leaderboard.html. Output depends only on the inputs and the
// `generated_at` timestamp.

#ifndef GASC_REPORT_HPP
#define GASC_REPORT_HPP

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gasc/runner.hpp"
#include "gasc/scoring.hpp"

namespace gasc::report {

enum class Format { Json, Csv, Html };
std::optional<Format> format_from(std::string_view s);
// Comma separated list, e.g. "html,csv,json". Throws InvalidConfig.
std::set<Format> parse_formats(std::string_view list);

inline constexpr std::string_view kSkipCell = "skip";

// One cell per (problem, adapter); columns sorted by adapter name and
// including skipped adapters.
struct Matrix {
  struct Cell {
    std::string code;  // P D U T M E X, "skip", or "" when not run yet
    std::optional<scoring::AdjudicatedResult> result;
  };
  std::vector<std::string> adapters;
  std::vector<std::string> problems;
  std::vector<std::vector<Cell>> cells;  // [problem][adapter]
};

Matrix build_matrix(const runner::Results& results);

std::string render_csv(const Matrix& m);
Json render_json(const runner::Results& results, const scoring::Ranking& ranking,
                 const Matrix& m, const std::string& generated_at);
std::string render_html(const runner::Results& results, const scoring::Ranking& ranking,
                        const Matrix& m, const std::string& generated_at);

inline constexpr std::string_view kHtmlFile = "leaderboard.html";
inline constexpr std::string_view kCsvFile = "matrix.csv";
inline constexpr std::string_view kJsonFile = "report.json";

// Writes the requested files into out_dir and returns their paths. Throws
// OutDirNotWritable.
std::vector<std::filesystem::path> render(const runner::Results& results,
                                          const scoring::Ranking& ranking,
                                          const std::set<Format>& formats,
                                          const std::filesystem::path& out_dir,
                                          std::optional<std::string> generated_at = {});

// Reads results.json (file or run directory). Throws SchemaError.
runner::Results load_results(const std::filesystem::path& path);
scoring::Ranking load_ranking(const std::filesystem::path& path);

}  // namespace gasc::report

#endif  // GASC_REPORT_HPP
