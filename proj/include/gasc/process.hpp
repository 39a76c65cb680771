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

// Runs one prover process under wall/CPU/memory limits and measures the
// whole process tree it creates (Linux only: /proc, process groups and
// PR_SET_CHILD_SUBREAPER).

#ifndef GASC_PROCESS_HPP
#define GASC_PROCESS_HPP

#include <sys/types.h>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace gasc::process {

inline constexpr std::size_t kExcerptLimit = 64 * 1024;

enum class LimitBreach { None, Wall, Cpu, Memory };

std::string_view to_string(LimitBreach b);
std::optional<LimitBreach> limit_breach_from(std::string_view s);

struct Limits {
  double wall_s = 10.0;
  double cpu_s = 10.0;
  double mem_mib = 1024.0;
  // Time between SIGTERM and SIGKILL once a limit is hit.
  double grace_kill_s = 0.5;
};

struct JobMeasurement {
  LimitBreach breach = LimitBreach::None;
  double wall_time_s = 0;
  double cpu_time_s = 0;  // user + system over the whole tree
  double max_rss_mib = 0;
  std::optional<int> exit_code;
  std::optional<int> term_signal;
  std::string stdout_text;  // first kExcerptLimit bytes
  std::string stderr_text;
  bool stdout_truncated = false;
  bool stderr_truncated = false;
};

// Marks this process as child subreaper so that orphaned descendants of a
// job are re-parented here and can be killed and reaped. Idempotent.
void become_subreaper();

// Spawns argv in `workdir` (stdin is /dev/null) in a fresh process group
// and monitors it until the root exits. On a limit breach the tree gets
// SIGTERM, then SIGKILL after grace_kill_s. Descendants still alive when the
// root exits are killed. Throws Error(SpawnFailure) when the program cannot
// be started.
JobMeasurement measure_job(std::span<const std::string> argv, const Limits& limits,
                           const std::filesystem::path& workdir = {});

// Live processes (zombies excluded) whose process group is `pgid`.
std::size_t count_group_members(pid_t pgid);

}  // namespace gasc::process

#endif  // GASC_PROCESS_HPP
