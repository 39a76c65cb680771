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

#include "gasc/adapters.hpp"
#include "gasc/error.hpp"
#include "support/paths.hpp"

using namespace gasc;
using namespace gasc::adapters;
namespace fs = std::filesystem;

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

Json stanza(const std::string& name) {
  return Json::parse(R"({"name": ")" + name + R"(", "method": "m", "input_dialect": "gclc",
      "command_template": ["prover", "{input}"],
      "classification_rules": [{"pattern": "proved", "verdict": "Proved"}],
      "readable_proofs": "not_available"})");
}

Json doc_of(std::initializer_list<Json> stanzas) {
  Json d;
  d["adapters"] = Json::array();
  for (const auto& s : stanzas) d["adapters"].push_back(s);
  return d;
}

AdapterSpec spec_with(std::vector<std::pair<std::string, std::string>> rules,
                      std::map<std::string, std::string> exit_map = {}) {
  Json s = stanza("x");
  s["classification_rules"] = Json::array();
  for (auto& [p, v] : rules) s["classification_rules"].push_back({{"pattern", p}, {"verdict", v}});
  if (!exit_map.empty()) s["exit_code_map"] = exit_map;
  return parse_adapters(doc_of({s})).at(0);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& t : v) out += (out.empty() ? "" : " ") + t;
  return out;
}

}  // namespace

TEST_CASE("builtin adapters mirror the published command lines") {
  auto specs = load_adapters(gasc::testing::source_dir() / "adapters" / "builtin.json");
  REQUIRE(specs.size() == 7);
  std::map<std::string, std::string> expected = {
      {"gclc-am", "gclc GEO0001.gcl"},
      {"gclc-wu", "gclc GEO0001.gcl -w"},
      {"gclc-gb", "gclc GEO0001.gcl -g"},
      {"ogp-wu", "./runOGP GEO0001.xml"},
      // Output redirection is realized by capturing both streams.
      {"coq-am", "coqc GEO0001.v"},
      {"ggb-recio", "xvfb-run geogebra --prover=engine:Recio GEO0001.ggb"},
      {"ggb-botana", "xvfb-run geogebra --prover=engine:Botana GEO0001.ggb"},
  };
  for (const auto& s : specs) {
    INFO(s.name);
    REQUIRE(expected.count(s.name));
    CHECK(join(s.instantiate(s.input_filename("GEO0001"), "/w")) == expected[s.name]);
    CHECK(std::count(s.command_template.begin(), s.command_template.end(), "{input}") == 1);
  }
}

TEST_CASE("mock adapters load") {
  auto specs = load_adapters(gasc::testing::mock_adapters());
  REQUIRE(specs.size() == 4);
  CHECK(specs[0].name == "fast-solver");
  CHECK(specs[0].readable_proofs == Readability::Maybe);
  CHECK(specs[3].name == "liar");
  CHECK(specs[3].input_dialect == geoform::Dialect::Ggb);
}

TEST_CASE("schema errors") {
  Json s = stanza("a");
  s.erase("command_template");
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::AdapterSchemaError);

  CHECK(code_of([&] { parse_adapters(doc_of({stanza("gclc-am"), stanza("gclc-am")})); }) ==
        ErrorCode::DuplicateAdapterName);

  s = stanza("a");
  s["classification_rules"][0]["pattern"] = "([unclosed";
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::BadPattern);

  s = stanza("a");
  s["command_template"] = {"p", "{input}", "{input}"};
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::AdapterSchemaError);
  s["command_template"] = {"p"};
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::AdapterSchemaError);

  s = stanza("a");
  s["classification_rules"][0]["verdict"] = "Timeout";
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::AdapterSchemaError);

  s = stanza("a");
  s["classification_rules"] = Json::array();
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::AdapterSchemaError);
  s["exit_code_map"] = {{"0", "Proved"}};
  CHECK(parse_adapters(doc_of({s})).size() == 1);
  s["exit_code_map"] = {{"0", "MemOut"}};
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::AdapterSchemaError);

  s = stanza("a");
  s["input_dialect"] = "xml";
  CHECK(code_of([&] { parse_adapters(doc_of({s})); }) == ErrorCode::AdapterSchemaError);
  CHECK(code_of([&] { parse_adapters(Json::array()); }) == ErrorCode::AdapterSchemaError);
}

TEST_CASE("classification examples") {
  auto spec = spec_with({{"proved", "Proved"}, {"disproved", "Disproved"}});
  CHECK(classify_output(spec, "The conjecture is proved.", 0) == Verdict::Proved);
  // "disproved" contains "proved": the first rule wins.
  CHECK(classify_output(spec, "disproved", 0) == Verdict::Proved);
  CHECK(classify_output(spec, "segmentation fault", 139) == Verdict::Unparseable);

  auto with_map = spec_with({{"proved", "Proved"}, {"disproved", "Disproved"}}, {{"139", "Error"}});
  CHECK(classify_output(with_map, "segmentation fault", 139) == Verdict::Error);
  CHECK(classify_output(with_map, "segmentation fault", 1) == Verdict::Unparseable);
  CHECK(classify_output(with_map, "segmentation fault", std::nullopt) == Verdict::Unparseable);

  auto mocks = load_adapters(gasc::testing::mock_adapters());
  CHECK(classify_output(mocks[0], "problem: GEO0001\nRESULT: proved\n", 0) == Verdict::Proved);
  CHECK(classify_output(mocks[0], "RESULT: disproved\n", 0) == Verdict::Disproved);
  CHECK(classify_output(mocks[0], "result: proved\n", 0) == Verdict::Unparseable);
}

TEST_CASE("property: first-match semantics and determinism") {
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps"};
  const Verdict outcomes[] = {Verdict::Proved, Verdict::Disproved, Verdict::Unknown,
                              Verdict::Error};
  std::mt19937 rng(3);
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::pair<std::string, std::string>> rules;
    for (int k = pick(4) + 1; k > 0; --k) {
      rules.emplace_back(words[pick(5)], std::string(to_string(outcomes[pick(4)])));
    }
    std::string text;
    for (int k = pick(4); k > 0; --k) text += words[pick(5)] + " ";
    auto spec = spec_with(rules);
    // Oracle: plain substring search in rule order.
    Verdict expected = Verdict::Unparseable;
    for (const auto& [p, v] : rules) {
      if (text.find(p) != std::string::npos) {
        expected = *verdict_from(v);
        break;
      }
    }
    CHECK(classify_output(spec, text, 0) == expected);
    CHECK(classify_output(spec, text, 0) == classify_output(spec, text, 0));

    // Reversing the rules changes the answer only when two rules match.
    auto reversed = rules;
    std::reverse(reversed.begin(), reversed.end());
    int matching = 0;
    for (const auto& [p, v] : rules) matching += text.find(p) != std::string::npos;
    if (matching <= 1) CHECK(classify_output(spec_with(reversed), text, 0) == expected);
  }
}

TEST_CASE("executable resolution") {
  gasc::testing::put_tools_on_path();
  auto mocks = load_adapters(gasc::testing::mock_adapters());
  auto exe = resolve_executable(mocks[0]);
  REQUIRE(exe);
  CHECK(exe->filename() == "mockprover");

  Json s = stanza("ghost");
  s["command_template"] = {"no-such-prover-xyz", "{input}"};
  CHECK_FALSE(resolve_executable(parse_adapters(doc_of({s})).at(0)));
  s["command_template"] = {"./runOGP", "{input}"};
  CHECK_FALSE(resolve_executable(parse_adapters(doc_of({s}), "/nonexistent").at(0)));
}

TEST_CASE("verdict vocabulary") {
  std::string codes;
  for (Verdict v : kAllVerdicts) {
    CHECK(verdict_from(to_string(v)) == v);
    codes += verdict_code(v);
  }
  CHECK(codes == "PDUTMEX");
  CHECK(is_definite(Verdict::Proved));
  CHECK(is_definite(Verdict::Disproved));
  CHECK_FALSE(is_definite(Verdict::Unknown));
}
