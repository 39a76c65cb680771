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

#include "gasc/report.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include "gasc/error.hpp"

namespace gasc::report {

namespace fs = std::filesystem;

std::optional<Format> format_from(std::string_view s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "html") return Format::Html;
  return std::nullopt;
}

std::set<Format> parse_formats(std::string_view list) {
  std::set<Format> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    auto comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    std::string_view tok = list.substr(pos, comma - pos);
    if (!tok.empty()) {
      auto f = format_from(tok);
      if (!f) throw Error(ErrorCode::InvalidConfig, "unknown report format: " + std::string(tok));
      out.insert(*f);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "no report format given");
  return out;
}

Matrix build_matrix(const runner::Results& results) {
  Matrix m;
  for (const auto& a : results.plan.adapters) m.adapters.push_back(a.name);
  for (const auto& s : results.plan.skipped_adapters) m.adapters.push_back(s);
  std::sort(m.adapters.begin(), m.adapters.end());
  m.adapters.erase(std::unique(m.adapters.begin(), m.adapters.end()), m.adapters.end());

  for (const auto& p : results.plan.problems) m.problems.push_back(p.id);
  std::sort(m.problems.begin(), m.problems.end());

  std::map<std::string, std::size_t> col, row;
  for (std::size_t i = 0; i < m.adapters.size(); ++i) col[m.adapters[i]] = i;
  for (std::size_t i = 0; i < m.problems.size(); ++i) row[m.problems[i]] = i;

  m.cells.assign(m.problems.size(), std::vector<Matrix::Cell>(m.adapters.size()));
  for (const auto& s : results.plan.skipped_adapters) {
    for (auto& r : m.cells) r[col[s]].code = std::string(kSkipCell);
  }
  auto adjudicated = scoring::adjudicate(results.records, scoring::truth_from(results.plan));
  for (auto& a : adjudicated) {
    auto ri = row.find(a.record.problem_id);
    auto ci = col.find(a.record.adapter_name);
    if (ri == row.end() || ci == col.end()) continue;
    auto& cell = m.cells[ri->second][ci->second];
    cell.code = std::string(adapters::verdict_code(a.record.verdict));
    cell.result = std::move(a);
  }
  return m;
}

std::string render_csv(const Matrix& m) {
  std::ostringstream out;
  out << "problem_id";
  for (const auto& a : m.adapters) out << ',' << a;
  out << '\n';
  for (std::size_t i = 0; i < m.problems.size(); ++i) {
    out << m.problems[i];
    for (const auto& c : m.cells[i]) out << ',' << c.code;
    out << '\n';
  }
  return out.str();
}

Json render_json(const runner::Results& results, const scoring::Ranking& ranking,
                 const Matrix& m, const std::string& generated_at) {
  Json j;
  j["generated_at"] = generated_at;
  j["manifest"] = results.manifest.to_json();
  j["complete"] = results.complete;
  j["ranking"] = ranking.to_json()["entries"];
  Json matrix;
  matrix["adapters"] = m.adapters;
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.problems.size(); ++i) {
    Json row;
    row["problem_id"] = m.problems[i];
    Json cells;
    for (std::size_t k = 0; k < m.adapters.size(); ++k) {
      const auto& c = m.cells[i][k];
      Json cell;
      cell["code"] = c.code;
      if (c.result) {
        cell["verdict"] = adapters::to_string(c.result->record.verdict);
        cell["correctness"] = scoring::to_string(c.result->correctness);
        cell["validation_class"] = c.result->validation_class
                                       ? Json(scoring::to_string(*c.result->validation_class))
                                       : Json(nullptr);
        cell["wall_time_s"] = c.result->record.wall_time_s;
      }
      cells[m.adapters[k]] = std::move(cell);
    }
    row["cells"] = std::move(cells);
    rows.push_back(std::move(row));
  }
  matrix["rows"] = std::move(rows);
  j["matrix"] = std::move(matrix);
  return j;
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

const char* cell_color(const Matrix::Cell& c) {
  if (c.code == kSkipCell || c.code.empty()) return "#eeeeee";
  if (!c.result) return "#ffffff";
  switch (c.result->correctness) {
    case scoring::Correctness::CorrectSolve: return "#c8e6c9";
    case scoring::Correctness::IncorrectClaim: return "#ffcdd2";
    case scoring::Correctness::NovelClaim: return "#fff9c4";
    case scoring::Correctness::NoSolve: return "#f5f5f5";
  }
  return "#ffffff";
}

constexpr std::string_view kStyle =
    "body{font-family:sans-serif;margin:2em;color:#222}"
    "table{border-collapse:collapse;margin:1em 0}"
    "th,td{border:1px solid #bbb;padding:0.25em 0.6em;text-align:center}"
    "th{background:#f0f0f0}"
    "td.name{text-align:left}"
    ".tier1{color:#b71c1c}"
    ".meta{color:#666;font-size:0.9em}";

}  // namespace

std::string render_html(const runner::Results& results, const scoring::Ranking& ranking,
                        const Matrix& m, const std::string& generated_at) {
  std::ostringstream h;
  const auto& man = results.manifest;
  h << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
    << "<title>Prover competition leaderboard</title>\n<style>" << kStyle << "</style>\n"
    << "</head>\n<body>\n<h1>Leaderboard</h1>\n";
  h << "<p class=\"meta\">Run " << html_escape(man.run_id) << ", started "
    << html_escape(man.started_at) << ", tool " << html_escape(man.tool_version)
    << (results.complete ? "" : " (incomplete run)") << "</p>\n";
  h << "<p class=\"meta\">Host: " << html_escape(man.host.os) << "; "
    << html_escape(man.host.cpu_model) << "; " << man.host.logical_cores << " cores; "
    << man.host.total_ram_mib << " MiB</p>\n";
  h << "<p class=\"meta\">Config hash " << html_escape(man.config_hash) << "</p>\n";

  h << "<section id=\"ranking\">\n<h2>Ranking</h2>\n";
  if (ranking.entries.empty() || results.records.empty()) {
    h << "<p class=\"notice\">No records.</p>\n";
  }
  if (!ranking.entries.empty()) {
    h << "<table>\n<tr><th>#</th><th>Prover</th><th>Tier</th><th>Solved</th>"
      << "<th>Incorrect</th><th>Total time (s)</th><th>Good</th><th>Fair</th>"
      << "<th>Poor</th><th>Readable proofs</th></tr>\n";
    int pos = 1;
    for (const auto& e : ranking.entries) {
      h << "<tr" << (e.tier ? " class=\"tier1\"" : "") << "><td>" << pos++
        << "</td><td class=\"name\">" << html_escape(e.adapter_name) << "</td><td>" << e.tier
        << "</td><td>" << e.solved << "</td><td>" << e.incorrect << "</td><td>"
        << fixed(e.total_time_s, 3) << "</td><td>" << e.class_counts.good << "</td><td>"
        << e.class_counts.fair << "</td><td>" << e.class_counts.poor << "</td><td>"
        << adapters::to_string(e.readable_proofs) << "</td></tr>\n";
    }
    h << "</table>\n";
  }
  h << "</section>\n";

  h << "<section id=\"matrix\">\n<h2>Results per problem</h2>\n";
  if (m.problems.empty()) {
    h << "<p class=\"notice\">No records.</p>\n";
  } else {
    h << "<table>\n<tr><th>Problem</th>";
    for (const auto& a : m.adapters) h << "<th>" << html_escape(a) << "</th>";
    h << "</tr>\n";
    for (std::size_t i = 0; i < m.problems.size(); ++i) {
      h << "<tr><td class=\"name\">" << html_escape(m.problems[i]) << "</td>";
      for (const auto& c : m.cells[i]) {
        h << "<td style=\"background:" << cell_color(c) << "\"";
        if (c.result) {
          h << " title=\"" << fixed(c.result->record.wall_time_s, 3) << " s";
          if (c.result->validation_class) {
            h << ", " << scoring::to_string(*c.result->validation_class);
          }
          h << "\"";
        }
        h << ">" << html_escape(c.code) << "</td>";
      }
      h << "</tr>\n";
    }
    h << "</table>\n";
    h << "<p class=\"meta\">P proved, D disproved, U unknown, T timeout, M memory limit, "
      << "E error, X unparseable output, skip prover not installed.</p>\n";
  }
  h << "</section>\n";
  h << "<p class=\"meta\" id=\"generated\">Generated " << html_escape(generated_at) << "</p>\n";
  h << "</body>\n</html>\n";
  return h.str();
}

std::vector<fs::path> render(const runner::Results& results, const scoring::Ranking& ranking,
                             const std::set<Format>& formats, const fs::path& out_dir,
                             std::optional<std::string> generated_at) {
  const std::string ts = generated_at ? *generated_at : utc_timestamp();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorCode::OutDirNotWritable,
                out_dir.string() + ": " + (ec ? ec.message() : "not a directory"));
  }
  Matrix m = build_matrix(results);
  std::vector<fs::path> written;
  auto put = [&](std::string_view name, const std::string& content) {
    fs::path p = out_dir / name;
    try {
      write_file(p, content);
    } catch (const Error& e) {
      throw Error(ErrorCode::OutDirNotWritable, e.detail());
    }
    written.push_back(p);
  };
  if (formats.count(Format::Json)) put(kJsonFile, dump_pretty(render_json(results, ranking, m, ts)));
  if (formats.count(Format::Csv)) put(kCsvFile, render_csv(m));
  if (formats.count(Format::Html)) put(kHtmlFile, render_html(results, ranking, m, ts));
  return written;
}

runner::Results load_results(const fs::path& path) {
  fs::path file = fs::is_directory(path) ? path / runner::kResultsFile : path;
  Json j = Json::parse(read_file(file), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::SchemaError, file.string() + ": not a JSON object");
  }
  try {
    runner::Results r;
    r.manifest = runner::RunManifest::from_json(j.at("manifest"));
    r.plan = runner::RunPlan::from_json(j.at("plan"));
    r.complete = j.value("complete", false);
    for (const auto& x : j.at("records")) r.records.push_back(runner::RunRecord::from_json(x));
    runner::sort_canonical(r.records);
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, file.string() + ": " + e.what());
  }
}

scoring::Ranking load_ranking(const fs::path& path) {
  fs::path file = fs::is_directory(path) ? path / "ranking.json" : path;
  Json j = Json::parse(read_file(file), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::SchemaError, file.string() + ": invalid JSON");
  return scoring::Ranking::from_json(j);
}

}  // namespace gasc::report
