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

#ifndef GASC_CLI_HPP
#define GASC_CLI_HPP

#include <iosfwd>

namespace gasc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

// Entry point of the `gasc` binary. Payloads go to `out`, diagnostics to
// `err`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gasc::cli

#endif  // GASC_CLI_HPP
