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

// Read-only HTTP view of a run directory and the polling client for it.
//
// Every response is computed from a prefix of events.jsonl ending at a line
// boundary. The prefix length is returned in the X-Log-Offset header and can
// be pinned with `?at=<offset>`, so /results and /ranking can be compared on
// the same snapshot.

#ifndef GASC_SERVICE_HPP
#define GASC_SERVICE_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasc/util.hpp"

namespace gasc::service {

enum class RunState { Idle, Running, Finished, Incomplete };
std::string_view to_string(RunState s);
std::optional<RunState> run_state_from(std::string_view s);

struct StatusSnapshot {
  std::string run_id;
  RunState state = RunState::Idle;
  std::size_t total_jobs = 0;
  std::size_t completed_jobs = 0;
  struct InFlight {
    std::string problem_id;
    std::string adapter_name;
    int repetition_index = 0;
    double elapsed_s = 0;
  };
  std::vector<InFlight> in_flight;
  std::size_t log_offset = 0;

  Json to_json() const;
  // Throws SchemaError, also when the invariants do not hold.
  static StatusSnapshot from_json(const Json& j);
};

struct Reply {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

inline constexpr std::string_view kOffsetHeader = "X-Log-Offset";

class Service {
 public:
  explicit Service(std::filesystem::path run_dir);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Routing without the network layer. `at` pins the log prefix.
  Reply handle(std::string_view path, std::optional<std::size_t> at = std::nullopt) const;

  // Binds host:port (port 0 picks a free one) and returns the port.
  int bind(const std::string& host, int port);
  // Serves until stop(). Returns false if the listener failed.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct WatchOptions {
  double interval_s = 2.0;
  int retry_budget = 5;  // consecutive failed polls tolerated
  std::optional<int> max_polls;
};

// Polls <url>/status and prints one line per poll to `out`. Returns 0 once
// the run is finished, 1 on an incomplete run, an exhausted retry budget or
// a malformed response.
int watch(const std::string& url, const WatchOptions& options, std::ostream& out,
          std::ostream& err);

}  // namespace gasc::service

#endif  // GASC_SERVICE_HPP
