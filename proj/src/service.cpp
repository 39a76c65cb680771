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

#include "gasc/service.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <httplib.h>

#include "gasc/error.hpp"
#include "gasc/runner.hpp"
#include "gasc/scoring.hpp"

namespace gasc::service {

namespace fs = std::filesystem;

std::string_view to_string(RunState s) {
  switch (s) {
    case RunState::Idle: return "idle";
    case RunState::Running: return "running";
    case RunState::Finished: return "finished";
    case RunState::Incomplete: return "incomplete";
  }
  return "?";
}

std::optional<RunState> run_state_from(std::string_view s) {
  for (RunState r : {RunState::Idle, RunState::Running, RunState::Finished, RunState::Incomplete}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

Json StatusSnapshot::to_json() const {
  Json j;
  j["run_id"] = run_id;
  j["state"] = to_string(state);
  j["total_jobs"] = total_jobs;
  j["completed_jobs"] = completed_jobs;
  Json fl = Json::array();
  for (const auto& f : in_flight) {
    Json x;
    x["problem_id"] = f.problem_id;
    x["adapter_name"] = f.adapter_name;
    x["repetition_index"] = f.repetition_index;
    x["elapsed_s"] = f.elapsed_s;
    fl.push_back(std::move(x));
  }
  j["in_flight"] = std::move(fl);
  j["log_offset"] = log_offset;
  return j;
}

StatusSnapshot StatusSnapshot::from_json(const Json& j) {
  StatusSnapshot s;
  try {
    s.run_id = j.at("run_id").get<std::string>();
    auto st = run_state_from(j.at("state").get<std::string>());
    if (!st) throw Error(ErrorCode::SchemaError, "unknown state");
    s.state = *st;
    s.total_jobs = j.at("total_jobs").get<std::size_t>();
    s.completed_jobs = j.at("completed_jobs").get<std::size_t>();
    for (const auto& x : j.at("in_flight")) {
      s.in_flight.push_back({x.at("problem_id").get<std::string>(),
                             x.at("adapter_name").get<std::string>(),
                             x.at("repetition_index").get<int>(),
                             x.at("elapsed_s").get<double>()});
    }
    s.log_offset = j.at("log_offset").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("status: ") + e.what());
  }
  if (s.completed_jobs > s.total_jobs) {
    throw Error(ErrorCode::SchemaError, "status: completed_jobs exceeds total_jobs");
  }
  if (s.state == RunState::Finished && s.completed_jobs != s.total_jobs) {
    throw Error(ErrorCode::SchemaError, "status: finished with jobs missing");
  }
  return s;
}

// ---------------------------------------------------------------------------

struct Service::Impl {
  fs::path run_dir;
  httplib::Server server;

  // Last fold, reused while the log has not grown.
  mutable std::mutex cache_mu;
  mutable std::size_t cached_len = static_cast<std::size_t>(-1);
  mutable std::shared_ptr<const runner::LogSnapshot> cached;

  std::shared_ptr<const runner::LogSnapshot> snapshot(std::optional<std::size_t> at) const {
    std::string text;
    {
      std::ifstream in(run_dir / runner::kEventsFile, std::ios::binary);
      if (!in) return nullptr;
      text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    if (at) {
      if (*at > text.size()) throw Error(ErrorCode::InvalidConfig, "offset beyond end of log");
      text.resize(*at);
    }
    auto nl = text.rfind('\n');
    text.resize(nl == std::string::npos ? 0 : nl + 1);

    std::lock_guard lock(cache_mu);
    if (cached && cached_len == text.size()) return cached;
    std::shared_ptr<const runner::LogSnapshot> snap;
    try {
      snap = std::make_shared<const runner::LogSnapshot>(runner::fold_events(text));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MissingRunStart) return nullptr;
      throw;
    }
    cached = snap;
    cached_len = text.size();
    return snap;
  }

  StatusSnapshot status_of(const runner::LogSnapshot& snap) const {
    StatusSnapshot s;
    const auto& r = snap.results;
    s.run_id = r.manifest.run_id;
    s.total_jobs = r.plan.total_jobs;
    s.completed_jobs = r.records.size();
    s.log_offset = snap.bytes;
    if (r.complete) {
      s.state = RunState::Finished;
    } else if (runner::runner_alive(run_dir)) {
      s.state = RunState::Running;
    } else {
      s.state = RunState::Incomplete;
    }
    const double now = unix_now();
    for (const auto& f : snap.in_flight) {
      s.in_flight.push_back(
          {f.problem_id, f.adapter_name, f.repetition_index, round_micro(now - f.started_at)});
    }
    return s;
  }
};

Service::Service(fs::path run_dir) : impl_(std::make_unique<Impl>()) {
  impl_->run_dir = std::move(run_dir);
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(64); };
  impl_->server.set_keep_alive_max_count(1);
  impl_->server.Get(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> at;
    if (req.has_param("at")) {
      std::string v = req.get_param_value("at");
      std::size_t n = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
      if (ec != std::errc() || p != v.data() + v.size()) {
        res.status = 400;
        res.set_content(R"({"error":"bad 'at' parameter"})", "application/json");
        return;
      }
      at = n;
    }
    Reply r = handle(req.path, at);
    res.status = r.status;
    for (const auto& [k, v] : r.headers) res.set_header(k, v);
    res.set_content(r.body, "application/json");
  });
}

Service::~Service() { stop(); }

namespace {

Reply json_reply(int status, const Json& body) {
  Reply r;
  r.status = status;
  r.body = dump_compact(body);
  return r;
}

Reply error_reply(int status, std::string_view message) {
  Json j;
  j["error"] = message;
  return json_reply(status, j);
}

}  // namespace

Reply Service::handle(std::string_view path, std::optional<std::size_t> at) const {
  static constexpr std::string_view kPaths[] = {"/status",   "/results",  "/ranking",
                                                "/problems", "/adapters", "/manifest"};
  bool known = false;
  for (auto p : kPaths) known = known || p == path;
  if (!known) return error_reply(404, "not found");

  std::shared_ptr<const runner::LogSnapshot> snap;
  try {
    snap = impl_->snapshot(at);
  } catch (const Error& e) {
    return error_reply(e.code() == ErrorCode::InvalidConfig ? 400 : 500, e.what());
  }
  if (!snap) {
    Json j;
    j["state"] = "idle";
    j["error"] = "run log is initializing";
    Reply r = json_reply(503, j);
    r.headers["Retry-After"] = "1";
    return r;
  }

  const auto& res = snap->results;
  Reply r;
  try {
    if (path == "/status") {
      r = json_reply(200, impl_->status_of(*snap).to_json());
    } else if (path == "/results") {
      r = json_reply(200, res.to_json());
    } else if (path == "/ranking") {
      r = json_reply(200, scoring::rank_results(res).to_json());
    } else if (path == "/problems") {
      r = json_reply(200, res.plan.to_json()["problems"]);
    } else if (path == "/adapters") {
      Json j;
      j["adapters"] = res.plan.to_json()["adapters"];
      j["skipped"] = res.plan.skipped_adapters;
      r = json_reply(200, j);
    } else {
      r = json_reply(200, res.manifest.to_json());
    }
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
  r.headers[std::string(kOffsetHeader)] = std::to_string(snap->bytes);
  return r;
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::run() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

// ---------------------------------------------------------------------------

int watch(const std::string& url, const WatchOptions& options, std::ostream& out,
          std::ostream& err) {
  httplib::Client client(url);
  client.set_connection_timeout(std::chrono::seconds(2));
  client.set_read_timeout(std::chrono::seconds(10));
  int failures = 0;
  std::optional<std::string> run_id;
  std::size_t last_completed = 0;
  for (int poll = 0;; ++poll) {
    if (options.max_polls && poll >= *options.max_polls) {
      err << "watch: stopped after " << poll << " polls\n";
      return 1;
    }
    if (poll > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(options.interval_s));
    }
    auto res = client.Get("/status");
    if (!res) {
      ++failures;
      err << "watch: " << url << ": " << httplib::to_string(res.error()) << " (attempt "
          << failures << "/" << options.retry_budget << ")\n";
      if (failures >= options.retry_budget) {
        err << "watch: giving up\n";
        return 1;
      }
      continue;
    }
    failures = 0;
    if (res->status == 503) {
      out << utc_timestamp() << " initializing\n" << std::flush;
      continue;
    }
    if (res->status != 200) {
      err << "watch: unexpected HTTP status " << res->status << "\n";
      return 1;
    }
    StatusSnapshot s;
    try {
      Json j = Json::parse(res->body);
      s = StatusSnapshot::from_json(j);
    } catch (const std::exception& e) {
      err << "watch: malformed status: " << e.what() << "\n";
      return 1;
    }
    if (run_id && *run_id == s.run_id && s.completed_jobs < last_completed) {
      err << "watch: completed_jobs went backwards\n";
      return 1;
    }
    run_id = s.run_id;
    last_completed = s.completed_jobs;
    out << utc_timestamp() << " run " << s.run_id.substr(0, 8) << " " << to_string(s.state)
        << " " << s.completed_jobs << "/" << s.total_jobs << " in_flight=" << s.in_flight.size()
        << "\n"
        << std::flush;
    if (s.state == RunState::Finished) return 0;
    if (s.state == RunState::Incomplete) {
      err << "watch: run is incomplete (runner no longer active)\n";
      return 1;
    }
  }
}

}  // namespace gasc::service
