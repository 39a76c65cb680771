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

#include "gasc/corpus.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "gasc/error.hpp"

namespace gasc::corpus {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::string_view, 5> kAxioms = {"neutral", "euclidean", "hyperbolic",
                                                     "projective", "other"};
constexpr std::array<std::string_view, 4> kTypes = {"constructive", "ruler_compass",
                                                    "inequality", "other"};
constexpr std::array<std::string_view, 3> kStatus = {"proved", "disproved", "open"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

struct ManifestDoc {
  std::string name;
  std::string version;
  Json raw;
};

ManifestDoc read_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::ManifestNotFound, path.string());
  Json raw = Json::parse(read_file(path), nullptr, false);
  if (raw.is_discarded() || !raw.is_object()) {
    throw Error(ErrorCode::ManifestSchemaError, "manifest is not a JSON object");
  }
  for (const char* key : {"name", "version"}) {
    if (!raw.contains(key) || !raw[key].is_string()) {
      throw Error(ErrorCode::ManifestSchemaError, key);
    }
  }
  if (!raw.contains("entries") || !raw["entries"].is_array()) {
    throw Error(ErrorCode::ManifestSchemaError, "entries");
  }
  for (std::size_t i = 0; i < raw["entries"].size(); ++i) {
    const auto& e = raw["entries"][i];
    if (!e.is_object() || !e.contains("file") || !e["file"].is_string()) {
      throw Error(ErrorCode::ManifestSchemaError, "entries[" + std::to_string(i) + "].file");
    }
  }
  return {raw["name"].get<std::string>(), raw["version"].get<std::string>(), std::move(raw)};
}

// Loads one entry, appending diagnostics instead of throwing.
std::optional<ProblemEntry> load_entry(const fs::path& root, const Json& meta,
                                       EntryReport& report) {
  ProblemEntry entry;
  entry.file = meta["file"].get<std::string>();
  report.file = entry.file;

  auto enum_field = [&](const char* key, auto parse, auto& out) {
    if (!meta.contains(key) || !meta[key].is_string()) {
      report.diagnostics.push_back("ManifestSchemaError: missing " + std::string(key));
      return;
    }
    auto v = parse(meta[key].template get<std::string>());
    if (!v) {
      report.diagnostics.push_back("ManifestSchemaError: bad " + std::string(key) + " '" +
                                   meta[key].template get<std::string>() + "'");
      return;
    }
    out = *v;
  };
  enum_field("axiom_system", axiom_system_from, entry.axiom_system);
  enum_field("conjecture_type", conjecture_type_from, entry.conjecture_type);
  enum_field("expected_status", expected_status_from, entry.expected_status);
  if (meta.contains("informal_proof")) {
    if (meta["informal_proof"].is_string()) {
      entry.informal_proof = meta["informal_proof"].get<std::string>();
    } else if (!meta["informal_proof"].is_null()) {
      report.diagnostics.push_back("ManifestSchemaError: informal_proof must be text");
    }
  }
  if (meta.contains("source") && meta["source"].is_string()) {
    entry.source = meta["source"].get<std::string>();
  }

  fs::path file = root / entry.file;
  if (!fs::is_regular_file(file)) {
    report.diagnostics.push_back("MissingFile: " + file.string());
  } else {
    try {
      entry.problem = geoform::load_problem_file(file.string());
      report.id = entry.problem.id;
      if (entry.problem.id.empty()) {
        report.diagnostics.push_back("InvalidId: problem has no id");
      }
    } catch (const Error& e) {
      report.diagnostics.push_back(e.what());
    }
  }
  report.ok = report.diagnostics.empty();
  if (!report.ok) return std::nullopt;
  return entry;
}

struct Loaded {
  ManifestDoc doc;
  ValidationReport report;
  std::vector<ProblemEntry> entries;
};

Loaded load_all(const fs::path& manifest_path) {
  Loaded out{read_manifest(manifest_path), {}, {}};
  out.report.name = out.doc.name;
  out.report.version = out.doc.version;
  fs::path root = manifest_path.parent_path();
  std::map<std::string, std::size_t> first_seen;
  for (const auto& meta : out.doc.raw["entries"]) {
    EntryReport rep;
    auto entry = load_entry(root, meta, rep);
    if (!rep.id.empty()) {
      auto [it, fresh] = first_seen.emplace(rep.id, out.report.entries.size());
      if (!fresh) {
        rep.diagnostics.push_back("DuplicateId: " + rep.id + " (also in " +
                                  out.report.entries[it->second].file + ")");
        rep.ok = false;
      }
    }
    if (rep.ok && entry) out.entries.push_back(std::move(*entry));
    out.report.entries.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

std::string_view to_string(AxiomSystem a) { return kAxioms[static_cast<std::size_t>(a)]; }
std::string_view to_string(ConjectureType t) { return kTypes[static_cast<std::size_t>(t)]; }
std::string_view to_string(ExpectedStatus s) { return kStatus[static_cast<std::size_t>(s)]; }

std::optional<AxiomSystem> axiom_system_from(std::string_view s) {
  return lookup<AxiomSystem>(kAxioms, s);
}
std::optional<ConjectureType> conjecture_type_from(std::string_view s) {
  return lookup<ConjectureType>(kTypes, s);
}
std::optional<ExpectedStatus> expected_status_from(std::string_view s) {
  return lookup<ExpectedStatus>(kStatus, s);
}

bool ValidationReport::ok() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.ok; });
}

Json ValidationReport::to_json() const {
  Json j;
  j["name"] = name;
  j["version"] = version;
  j["ok"] = ok();
  Json list = Json::array();
  for (const auto& e : entries) {
    Json x;
    x["file"] = e.file;
    x["id"] = e.id;
    x["ok"] = e.ok;
    x["diagnostics"] = e.diagnostics;
    list.push_back(std::move(x));
  }
  j["entries"] = std::move(list);
  return j;
}

fs::path resolve_manifest(const fs::path& path) {
  if (fs::is_directory(path)) return path / "corpus.json";
  return path;
}

ValidationReport validate_corpus(const fs::path& manifest_path) {
  return load_all(resolve_manifest(manifest_path)).report;
}

Corpus load_corpus(const fs::path& manifest_path) {
  auto path = resolve_manifest(manifest_path);
  auto loaded = load_all(path);
  for (const auto& e : loaded.report.entries) {
    if (!e.ok) {
      throw Error(ErrorCode::ManifestSchemaError,
                  e.file + ": " + (e.diagnostics.empty() ? "invalid" : e.diagnostics.front()));
    }
  }
  return {loaded.doc.name, loaded.doc.version, path, std::move(loaded.doc.raw),
          std::move(loaded.entries)};
}

std::vector<ProblemEntry> select_problems(const Corpus& corpus, const ProblemFilter& filter) {
  std::map<std::string, const ProblemEntry*> by_id;
  for (const auto& e : corpus.entries) by_id.emplace(e.id(), &e);

  std::set<std::string> wanted;
  for (const auto& id : filter.ids) {
    if (!by_id.contains(id)) throw Error(ErrorCode::UnknownId, id);
    wanted.insert(id);
  }
  auto any_of = [](const auto& options, auto value) {
    return options.empty() ||
           std::find(options.begin(), options.end(), value) != options.end();
  };

  std::vector<ProblemEntry> out;
  for (const auto& [id, e] : by_id) {
    if (!wanted.empty() && !wanted.contains(id)) continue;
    if (!any_of(filter.axiom_systems, e->axiom_system)) continue;
    if (!any_of(filter.conjecture_types, e->conjecture_type)) continue;
    out.push_back(*e);
  }
  return out;
}

Json entry_metadata(const ProblemEntry& e) {
  Json j;
  j["id"] = e.id();
  j["axiom_system"] = to_string(e.axiom_system);
  j["conjecture_type"] = to_string(e.conjecture_type);
  j["expected_status"] = to_string(e.expected_status);
  j["has_informal_proof"] = e.informal_proof.has_value();
  return j;
}

}  // namespace gasc::corpus
