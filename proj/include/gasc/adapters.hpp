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

// Declarative prover adapters: how to call a prover and how to read its
// answer. Specs are data (adapters/*.json) so new provers need no rebuild.

#ifndef GASC_ADAPTERS_HPP
#define GASC_ADAPTERS_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasc/geoform.hpp"

namespace gasc::adapters {

enum class Verdict { Proved, Disproved, Unknown, Timeout, MemOut, Error, Unparseable };

inline constexpr Verdict kAllVerdicts[] = {
    Verdict::Proved, Verdict::Disproved, Verdict::Unknown,     Verdict::Timeout,
    Verdict::MemOut, Verdict::Error,     Verdict::Unparseable,
};

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from(std::string_view s);
// One-letter matrix code: P D U T M E X.
std::string_view verdict_code(Verdict v);
// Proved or Disproved.
bool is_definite(Verdict v);

enum class Readability { Maybe, NotAvailable };
std::string_view to_string(Readability r);
std::optional<Readability> readability_from(std::string_view s);

class CompiledPattern;

struct ClassificationRule {
  std::string pattern;
  Verdict verdict;
  std::shared_ptr<const CompiledPattern> compiled;
};

struct AdapterSpec {
  std::string name;
  std::string method;
  geoform::Dialect input_dialect = geoform::Dialect::Exchange;
  // Overrides the dialect's file suffix (".v" for Coq, ".xml" for OGP).
  std::optional<std::string> input_suffix;
  std::vector<std::string> command_template;
  std::vector<ClassificationRule> classification_rules;
  std::map<int, Verdict> exit_code_map;
  std::optional<std::string> proof_artifact;  // glob relative to the workdir
  Readability readable_proofs = Readability::NotAvailable;
  std::filesystem::path base_dir;  // directory of the file the spec came from

  std::string input_filename(const std::string& problem_id) const;
  // Substitutes {input} and {workdir}.
  std::vector<std::string> instantiate(const std::string& input,
                                       const std::string& workdir) const;
  Json to_json() const;
};

// Parses and validates a document of the form {"adapters": [...]}.
std::vector<AdapterSpec> parse_adapters(const Json& doc,
                                        const std::filesystem::path& base_dir = {});
std::vector<AdapterSpec> load_adapters(const std::filesystem::path& path);

// First matching rule wins, then the exit-code map, else Unparseable.
Verdict classify_output(const AdapterSpec& spec, std::string_view text,
                        std::optional<int> exit_code);

// Absolute path of the program in command_template[0], or nullopt when it
// is not installed. Names without '/' are looked up on PATH; relative paths
// are taken relative to the spec's base_dir.
std::optional<std::filesystem::path> resolve_executable(const AdapterSpec& spec);

}  // namespace gasc::adapters

#endif  // GASC_ADAPTERS_HPP
