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

#include "gasc/adapters.hpp"

#include <unistd.h>

#include <boost/regex.hpp>
#include <cstdlib>
#include <set>

#include "gasc/error.hpp"

namespace gasc::adapters {

namespace fs = std::filesystem;

// Boost's matcher is iterative, so long prover logs cannot exhaust the stack.
class CompiledPattern {
 public:
  explicit CompiledPattern(const std::string& pattern)
      : re_(pattern, boost::regex::perl) {}
  bool search(std::string_view text) const {
    return boost::regex_search(text.begin(), text.end(), re_);
  }

 private:
  boost::regex re_;
};

namespace {

constexpr std::string_view kVerdictNames[] = {"Proved",  "Disproved", "Unknown",    "Timeout",
                                              "MemOut",  "Error",     "Unparseable"};
constexpr std::string_view kVerdictCodes[] = {"P", "D", "U", "T", "M", "E", "X"};

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::AdapterSchemaError, what);
}

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

std::string required_string(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty()) {
    schema_error(where + "." + key);
  }
  return obj[key].get<std::string>();
}

AdapterSpec parse_one(const Json& j, const std::string& where, const fs::path& base_dir) {
  if (!j.is_object()) schema_error(where);
  AdapterSpec spec;
  spec.base_dir = base_dir;
  spec.name = required_string(j, "name", where);
  spec.method = j.value("method", "");

  auto dialect = geoform::dialect_from_name(required_string(j, "input_dialect", where));
  if (!dialect) schema_error(where + ".input_dialect");
  spec.input_dialect = *dialect;
  if (j.contains("input_suffix")) {
    if (!j["input_suffix"].is_string()) schema_error(where + ".input_suffix");
    spec.input_suffix = j["input_suffix"].get<std::string>();
  }

  if (!j.contains("command_template") || !j["command_template"].is_array() ||
      j["command_template"].empty()) {
    schema_error(where + ".command_template");
  }
  std::size_t inputs = 0;
  for (const auto& tok : j["command_template"]) {
    if (!tok.is_string()) schema_error(where + ".command_template");
    spec.command_template.push_back(tok.get<std::string>());
    inputs += count_occurrences(spec.command_template.back(), "{input}");
  }
  if (inputs != 1) schema_error(where + ".command_template: {input} must appear exactly once");

  if (j.contains("classification_rules")) {
    const auto& rules = j["classification_rules"];
    if (!rules.is_array()) schema_error(where + ".classification_rules");
    for (std::size_t i = 0; i < rules.size(); ++i) {
      std::string rw = where + ".classification_rules[" + std::to_string(i) + "]";
      if (!rules[i].is_object()) schema_error(rw);
      ClassificationRule rule;
      rule.pattern = required_string(rules[i], "pattern", rw);
      auto v = verdict_from(required_string(rules[i], "verdict", rw));
      if (!v || *v == Verdict::Timeout || *v == Verdict::MemOut) {
        schema_error(rw + ".verdict");
      }
      rule.verdict = *v;
      try {
        rule.compiled = std::make_shared<const CompiledPattern>(rule.pattern);
      } catch (const boost::regex_error& e) {
        throw Error(ErrorCode::BadPattern, spec.name + ": '" + rule.pattern + "': " + e.what());
      }
      spec.classification_rules.push_back(std::move(rule));
    }
  }
  if (j.contains("exit_code_map")) {
    const auto& map = j["exit_code_map"];
    if (!map.is_object()) schema_error(where + ".exit_code_map");
    for (const auto& [key, value] : map.items()) {
      int code = 0;
      try {
        std::size_t used = 0;
        code = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        schema_error(where + ".exit_code_map." + key);
      }
      auto v = value.is_string() ? verdict_from(value.get<std::string>()) : std::nullopt;
      if (!v || *v == Verdict::Timeout || *v == Verdict::MemOut) {
        schema_error(where + ".exit_code_map." + key);
      }
      spec.exit_code_map[code] = *v;
    }
  }
  if (spec.classification_rules.empty() && spec.exit_code_map.empty()) {
    schema_error(where + ": needs classification_rules or exit_code_map");
  }

  if (j.contains("proof_artifact") && !j["proof_artifact"].is_null()) {
    if (!j["proof_artifact"].is_string()) schema_error(where + ".proof_artifact");
    spec.proof_artifact = j["proof_artifact"].get<std::string>();
  }
  auto readable = readability_from(j.value("readable_proofs", "not_available"));
  if (!readable) schema_error(where + ".readable_proofs");
  spec.readable_proofs = *readable;
  return spec;
}

bool is_executable_file(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

}  // namespace

std::string_view to_string(Verdict v) { return kVerdictNames[static_cast<std::size_t>(v)]; }

std::optional<Verdict> verdict_from(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kVerdictNames); ++i) {
    if (kVerdictNames[i] == s) return static_cast<Verdict>(i);
  }
  return std::nullopt;
}

std::string_view verdict_code(Verdict v) { return kVerdictCodes[static_cast<std::size_t>(v)]; }

bool is_definite(Verdict v) { return v == Verdict::Proved || v == Verdict::Disproved; }

std::string_view to_string(Readability r) {
  return r == Readability::Maybe ? "maybe" : "not_available";
}

std::optional<Readability> readability_from(std::string_view s) {
  if (s == "maybe") return Readability::Maybe;
  if (s == "not_available") return Readability::NotAvailable;
  return std::nullopt;
}

std::string AdapterSpec::input_filename(const std::string& problem_id) const {
  return problem_id + (input_suffix ? *input_suffix : std::string(default_suffix(input_dialect)));
}

std::vector<std::string> AdapterSpec::instantiate(const std::string& input,
                                                  const std::string& workdir) const {
  std::vector<std::string> argv;
  argv.reserve(command_template.size());
  for (const auto& tok : command_template) {
    argv.push_back(replace_all(replace_all(tok, "{workdir}", workdir), "{input}", input));
  }
  return argv;
}

Json AdapterSpec::to_json() const {
  Json j;
  j["name"] = name;
  j["method"] = method;
  j["input_dialect"] = geoform::dialect_name(input_dialect);
  if (input_suffix) j["input_suffix"] = *input_suffix;
  j["command_template"] = command_template;
  Json rules = Json::array();
  for (const auto& r : classification_rules) {
    Json x;
    x["pattern"] = r.pattern;
    x["verdict"] = to_string(r.verdict);
    rules.push_back(std::move(x));
  }
  j["classification_rules"] = std::move(rules);
  Json codes = Json::object();
  for (const auto& [code, v] : exit_code_map) codes[std::to_string(code)] = to_string(v);
  j["exit_code_map"] = std::move(codes);
  j["proof_artifact"] = proof_artifact ? Json(*proof_artifact) : Json(nullptr);
  j["readable_proofs"] = to_string(readable_proofs);
  return j;
}

std::vector<AdapterSpec> parse_adapters(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object() || !doc.contains("adapters") || !doc["adapters"].is_array()) {
    schema_error("adapters");
  }
  std::vector<AdapterSpec> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < doc["adapters"].size(); ++i) {
    auto spec = parse_one(doc["adapters"][i], "adapters[" + std::to_string(i) + "]", base_dir);
    if (!names.insert(spec.name).second) throw Error(ErrorCode::DuplicateAdapterName, spec.name);
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<AdapterSpec> load_adapters(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::IoError, "no such file " + path.string());
  Json doc = Json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) schema_error("(document is not JSON)");
  return parse_adapters(doc, fs::absolute(path).parent_path());
}

Verdict classify_output(const AdapterSpec& spec, std::string_view text,
                        std::optional<int> exit_code) {
  for (const auto& rule : spec.classification_rules) {
    if (rule.compiled && rule.compiled->search(text)) return rule.verdict;
  }
  if (exit_code) {
    auto it = spec.exit_code_map.find(*exit_code);
    if (it != spec.exit_code_map.end()) return it->second;
  }
  return Verdict::Unparseable;
}

std::optional<fs::path> resolve_executable(const AdapterSpec& spec) {
  const std::string& prog = spec.command_template.front();
  if (prog.find('/') != std::string::npos) {
    fs::path p(prog);
    if (p.is_relative()) p = spec.base_dir / p;
    p = p.lexically_normal();
    if (is_executable_file(p)) return p;
    return std::nullopt;
  }
  const char* env = std::getenv("PATH");
  std::string path = env ? env : "/usr/local/bin:/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find(':', start);
    if (end == std::string::npos) end = path.size();
    fs::path dir = path.substr(start, end - start);
    if (dir.empty()) dir = ".";
    if (is_executable_file(dir / prog)) return fs::absolute(dir / prog);
    start = end + 1;
  }
  return std::nullopt;
}

}  // namespace gasc::adapters
