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

// Small helpers shared by several modules.

#ifndef GASC_UTIL_HPP
#define GASC_UTIL_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace gasc {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.2.0";

std::string read_file(const std::filesystem::path& path);

// Writes through a temporary sibling and renames, so readers never see a
// half-written file.
void write_file(const std::filesystem::path& path, std::string_view content);

// Single-line JSON with invalid UTF-8 replaced; stable for ordered_json.
std::string dump_compact(const Json& j);
// Two-space indented JSON followed by a newline.
std::string dump_pretty(const Json& j);

std::string sha256_hex(std::string_view data);
std::string uuid_v4();
std::string utc_timestamp();
double unix_now();

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

std::string html_escape(std::string_view text);

// Rounds to microseconds so measurements serialize compactly.
double round_micro(double seconds);

}  // namespace gasc

#endif  // GASC_UTIL_HPP
