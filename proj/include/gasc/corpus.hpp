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

// Competition problem sets: a `corpus.json` manifest plus one exchange file
// per problem. The manifest carries the metadata (axiom system, conjecture
// type, ground-truth status) so problem files stay pure geometry.

#ifndef GASC_CORPUS_HPP
#define GASC_CORPUS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gasc/geoform.hpp"

namespace gasc::corpus {

enum class AxiomSystem { Neutral, Euclidean, Hyperbolic, Projective, Other };
enum class ConjectureType { Constructive, RulerCompass, Inequality, Other };
enum class ExpectedStatus { Proved, Disproved, Open };

std::string_view to_string(AxiomSystem a);
std::string_view to_string(ConjectureType t);
std::string_view to_string(ExpectedStatus s);
std::optional<AxiomSystem> axiom_system_from(std::string_view s);
std::optional<ConjectureType> conjecture_type_from(std::string_view s);
std::optional<ExpectedStatus> expected_status_from(std::string_view s);

struct ProblemEntry {
  geoform::GeoProblem problem;
  AxiomSystem axiom_system = AxiomSystem::Euclidean;
  ConjectureType conjecture_type = ConjectureType::Constructive;
  ExpectedStatus expected_status = ExpectedStatus::Proved;
  std::optional<std::string> informal_proof;
  std::string source;
  std::string file;  // relative to the manifest

  const std::string& id() const { return problem.id; }
};

// Immutable snapshot of a loaded manifest.
struct Corpus {
  std::string name;
  std::string version;
  std::filesystem::path manifest_path;
  Json manifest;  // raw document, unknown fields included
  std::vector<ProblemEntry> entries;
};

struct EntryReport {
  std::string file;
  std::string id;  // empty when the file could not be read
  bool ok = true;
  std::vector<std::string> diagnostics;
};

struct ValidationReport {
  std::string name;
  std::string version;
  std::vector<EntryReport> entries;

  bool ok() const;
  Json to_json() const;
};

// Accepts the manifest file or the directory holding `corpus.json`.
std::filesystem::path resolve_manifest(const std::filesystem::path& path);

// Read-only. Throws ManifestNotFound / ManifestSchemaError for a bad
// manifest; per-entry problems are reported, not thrown.
ValidationReport validate_corpus(const std::filesystem::path& manifest_path);

// Throws ManifestSchemaError naming the first failing entry when the corpus
// does not validate.
Corpus load_corpus(const std::filesystem::path& manifest_path);

struct ProblemFilter {
  std::vector<AxiomSystem> axiom_systems;        // any of
  std::vector<ConjectureType> conjecture_types;  // any of
  std::vector<std::string> ids;                  // explicit list
};

// Sorted by id, duplicate-free. Throws UnknownId for ids not in the corpus.
std::vector<ProblemEntry> select_problems(const Corpus& corpus, const ProblemFilter& filter);

// Metadata block without geometry, as embedded in run plans.
Json entry_metadata(const ProblemEntry& e);

}  // namespace gasc::corpus

#endif  // GASC_CORPUS_HPP
