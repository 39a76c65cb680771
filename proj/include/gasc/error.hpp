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

#ifndef GASC_ERROR_HPP
#define GASC_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gasc {

enum class ErrorCode {
  // geoform
  LexError,
  SyntaxError,
  UndefinedName,
  Redefinition,
  ArityError,
  KindError,
  MissingConjecture,
  InvalidId,
  SchemaError,
  // corpus
  ManifestNotFound,
  ManifestSchemaError,
  UnknownId,
  // adapters
  AdapterSchemaError,
  DuplicateAdapterName,
  BadPattern,
  // runner
  SpawnFailure,
  OutDirNotWritable,
  NoRunnableAdapters,
  MissingRunStart,
  InvalidConfig,
  // scoring
  InvalidMeasurement,
  ZeroSize,
  UnknownProblemId,
  // generic
  IoError,
};

std::string_view to_string(ErrorCode code);

struct SourceLocation {
  int line = 0;
  int column = 0;
};

// Every failure raised by the library. `what()` is a human-readable
// diagnostic; `code()` is stable and meant for programmatic dispatch.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<SourceLocation> where = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::optional<SourceLocation>& where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<SourceLocation> where_;
};

}  // namespace gasc

#endif  // GASC_ERROR_HPP
