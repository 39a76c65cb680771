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
#include <set>

#include "gasc/corpus.hpp"
#include "gasc/error.hpp"
#include "support/corpus_fixture.hpp"
#include "support/paths.hpp"

using namespace gasc;
using namespace gasc::corpus;
using gasc::testing::TempDir;
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

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[e.path().string()] = read_file(e.path());
  }
  return out;
}

bool has_diagnostic(const EntryReport& e, std::string_view prefix) {
  return std::any_of(e.diagnostics.begin(), e.diagnostics.end(),
                     [&](const std::string& d) { return d.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST_CASE("bundled mini corpus validates") {
  auto report = validate_corpus(resolve_manifest(gasc::testing::mini_corpus()));
  CHECK(report.ok());
  CHECK(report.name == "mini");
  CHECK(report.entries.size() == 20);
  auto c = load_corpus(resolve_manifest(gasc::testing::mini_corpus()));
  REQUIRE(c.entries.size() == 20);
  CHECK(c.entries.front().id() == "GEO0001");
}

TEST_CASE("validation reports per-entry problems") {
  TempDir tmp;
  Json manifest = gasc::testing::write_synthetic_corpus(tmp.path(), 4, 11);

  SUBCASE("missing file") {
    fs::remove(tmp / "GEO0002.gf.json");
    auto report = validate_corpus(tmp.path());
    CHECK_FALSE(report.ok());
    CHECK(report.entries[1].file == "GEO0002.gf.json");
    CHECK_FALSE(report.entries[1].ok);
    CHECK(has_diagnostic(report.entries[1], "MissingFile"));
    CHECK(report.entries[0].ok);
    CHECK(code_of([&] { load_corpus(tmp / "corpus.json"); }) == ErrorCode::ManifestSchemaError);
  }
  SUBCASE("duplicate id") {
    fs::copy_file(tmp / "GEO0001.gf.json", tmp / "copy.gf.json");
    manifest["entries"].push_back(manifest["entries"][0]);
    manifest["entries"].back()["file"] = "copy.gf.json";
    write_file(tmp / "corpus.json", dump_pretty(manifest));
    auto report = validate_corpus(tmp.path());
    CHECK_FALSE(report.ok());
    CHECK(has_diagnostic(report.entries.back(), "DuplicateId: GEO0001"));
  }
  SUBCASE("bad enum value") {
    manifest["entries"][2]["axiom_system"] = "spherical";
    write_file(tmp / "corpus.json", dump_pretty(manifest));
    auto report = validate_corpus(tmp.path());
    CHECK_FALSE(report.entries[2].ok);
    CHECK(has_diagnostic(report.entries[2], "ManifestSchemaError"));
  }
  SUBCASE("unparseable problem file") {
    write_file(tmp / "GEO0003.gf.json", "{\"id\": \"GEO0003\"}");
    auto report = validate_corpus(tmp.path());
    CHECK_FALSE(report.entries[2].ok);
    CHECK(report.entries[3].ok);
  }
}

TEST_CASE("manifest-level errors") {
  TempDir tmp;
  CHECK(code_of([&] { validate_corpus(tmp / "nope.json"); }) == ErrorCode::ManifestNotFound);
  CHECK(code_of([&] { validate_corpus(tmp.path()); }) == ErrorCode::ManifestNotFound);
  write_file(tmp / "corpus.json", "[1, 2]");
  CHECK(code_of([&] { validate_corpus(tmp.path()); }) == ErrorCode::ManifestSchemaError);
  write_file(tmp / "corpus.json", "{\"name\": \"x\", \"version\": \"1\"}");
  CHECK(code_of([&] { validate_corpus(tmp.path()); }) == ErrorCode::ManifestSchemaError);
  write_file(tmp / "corpus.json", "not json");
  CHECK(code_of([&] { validate_corpus(tmp.path()); }) == ErrorCode::ManifestSchemaError);
}

TEST_CASE("validation is read-only and idempotent") {
  const fs::path mini = gasc::testing::mini_corpus();
  auto before = snapshot_dir(mini);
  auto r1 = validate_corpus(mini).to_json();
  auto r2 = validate_corpus(mini).to_json();
  CHECK(r1 == r2);
  CHECK(snapshot_dir(mini) == before);
}

TEST_CASE("select_problems on the mini corpus") {
  auto c = load_corpus(resolve_manifest(gasc::testing::mini_corpus()));
  CHECK(select_problems(c, {}).size() == 20);

  ProblemFilter euclid;
  euclid.axiom_systems = {AxiomSystem::Euclidean};
  CHECK(select_problems(c, euclid).size() == 14);

  ProblemFilter rc;
  rc.conjecture_types = {ConjectureType::RulerCompass};
  auto sel = select_problems(c, rc);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].id() == "GEO0003");
  CHECK(sel[1].id() == "GEO0019");

  ProblemFilter ids;
  ids.ids = {"GEO0005", "GEO0002", "GEO0005"};
  sel = select_problems(c, ids);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].id() == "GEO0002");

  ProblemFilter unknown;
  unknown.ids = {"GEO9999"};
  CHECK(code_of([&] { select_problems(c, unknown); }) == ErrorCode::UnknownId);
}

TEST_CASE("entry metadata omits geometry") {
  auto c = load_corpus(resolve_manifest(gasc::testing::mini_corpus()));
  Json m = entry_metadata(c.entries[0]);
  CHECK(m["id"] == "GEO0001");
  CHECK(m["has_informal_proof"] == true);
  CHECK_FALSE(m.contains("steps"));
}

TEST_CASE("property: selections are sorted, unique and filter-consistent") {
  TempDir tmp;
  gasc::testing::write_synthetic_corpus(tmp.path(), 60, 5);
  auto c = load_corpus(tmp / "corpus.json");
  gasc::testing::ProblemGenerator gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    ProblemFilter f;
    for (int a = 0; a < 5; ++a) {
      if (gen.pick(0, 2) == 0) f.axiom_systems.push_back(static_cast<AxiomSystem>(a));
    }
    for (int t = 0; t < 4; ++t) {
      if (gen.pick(0, 2) == 0) f.conjecture_types.push_back(static_cast<ConjectureType>(t));
    }
    if (gen.pick(0, 3) == 0) {
      for (int k = gen.pick(1, 6); k > 0; --k) f.ids.push_back(gasc::testing::problem_id(gen.pick(1, 60)));
    }
    auto sel = select_problems(c, f);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sel.size(); ++i) {
      CHECK(seen.insert(sel[i].id()).second);
      if (i) CHECK(sel[i - 1].id() < sel[i].id());
      if (!f.axiom_systems.empty()) {
        CHECK(std::count(f.axiom_systems.begin(), f.axiom_systems.end(), sel[i].axiom_system));
      }
      if (!f.conjecture_types.empty()) {
        CHECK(std::count(f.conjecture_types.begin(), f.conjecture_types.end(),
                         sel[i].conjecture_type));
      }
      if (!f.ids.empty()) CHECK(std::count(f.ids.begin(), f.ids.end(), sel[i].id()));
    }
    // Oracle: count directly from the entry list.
    std::size_t expected = 0;
    for (const auto& e : c.entries) {
      bool ok = (f.axiom_systems.empty() || std::count(f.axiom_systems.begin(), f.axiom_systems.end(), e.axiom_system)) &&
                (f.conjecture_types.empty() || std::count(f.conjecture_types.begin(), f.conjecture_types.end(), e.conjecture_type)) &&
                (f.ids.empty() || std::count(f.ids.begin(), f.ids.end(), e.id()));
      expected += ok;
    }
    CHECK(sel.size() == expected);
  }
}
