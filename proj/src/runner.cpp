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

#include "gasc/runner.hpp"

#include <fcntl.h>
#include <fnmatch.h>
#include <sys/file.h>
#include <sys/sysinfo.h>
#include <sys/utsname.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "gasc/error.hpp"

namespace gasc::runner {

namespace fs = std::filesystem;
using adapters::Verdict;

std::string_view to_string(TimingMode m) {
  return m == TimingMode::Serial ? "serial" : "parallel";
}

std::optional<TimingMode> timing_mode_from(std::string_view s) {
  if (s == "serial") return TimingMode::Serial;
  if (s == "parallel") return TimingMode::Parallel;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (!(wall_limit_s > 0)) fail("wall_limit_s must be positive");
  if (!(cpu_limit_s > 0)) fail("cpu_limit_s must be positive");
  if (mem_limit_mib <= 0) fail("mem_limit_mib must be positive");
  if (workers <= 0) fail("workers must be positive");
  if (repetitions < 1) fail("repetitions must be at least 1");
  if (grace_kill_s < 0) fail("grace_kill_s must not be negative");
  if (!(grace_kill_s < wall_limit_s)) fail("grace_kill_s must be below wall_limit_s");
}

Json RunConfig::to_json() const {
  Json j;
  j["wall_limit_s"] = wall_limit_s;
  j["cpu_limit_s"] = cpu_limit_s;
  j["mem_limit_mib"] = mem_limit_mib;
  j["workers"] = workers;
  j["timing_mode"] = to_string(timing_mode);
  j["repetitions"] = repetitions;
  j["grace_kill_s"] = grace_kill_s;
  j["keep_workdirs"] = keep_workdirs;
  return j;
}

process::Limits RunConfig::limits() const {
  process::Limits l;
  l.wall_s = wall_limit_s;
  l.cpu_s = cpu_limit_s;
  l.mem_mib = mem_limit_mib;
  l.grace_kill_s = grace_kill_s;
  return l;
}

// ---------------------------------------------------------------------------
// RunRecord

namespace {

template <typename T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorCode::SchemaError, std::string("missing field ") + name);
  }
  return j.at(name);
}

template <typename T>
std::optional<T> opt_field(const Json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return j.at(name).get<T>();
}

}  // namespace

Json RunRecord::to_json() const {
  Json j;
  j["problem_id"] = problem_id;
  j["adapter_name"] = adapter_name;
  j["repetition_index"] = repetition_index;
  j["verdict"] = adapters::to_string(verdict);
  j["wall_time_s"] = round_micro(wall_time_s);
  j["cpu_time_s"] = round_micro(cpu_time_s);
  j["max_rss_mib"] = round_micro(max_rss_mib);
  j["exit_code"] = opt_json(exit_code);
  j["signal"] = opt_json(term_signal);
  j["limit"] = process::to_string(limit);
  j["stdout_excerpt"] = stdout_excerpt;
  j["stderr_excerpt"] = stderr_excerpt;
  j["proof_artifact_path"] = opt_json(proof_artifact_path);
  j["diagnostic"] = diagnostic;
  return j;
}

RunRecord RunRecord::from_json(const Json& j) {
  try {
    RunRecord r;
    r.problem_id = field(j, "problem_id").get<std::string>();
    r.adapter_name = field(j, "adapter_name").get<std::string>();
    r.repetition_index = field(j, "repetition_index").get<int>();
    auto v = adapters::verdict_from(field(j, "verdict").get<std::string>());
    if (!v) throw Error(ErrorCode::SchemaError, "bad verdict");
    r.verdict = *v;
    r.wall_time_s = field(j, "wall_time_s").get<double>();
    r.cpu_time_s = field(j, "cpu_time_s").get<double>();
    r.max_rss_mib = field(j, "max_rss_mib").get<double>();
    r.exit_code = opt_field<int>(j, "exit_code");
    r.term_signal = opt_field<int>(j, "signal");
    auto lim = process::limit_breach_from(field(j, "limit").get<std::string>());
    if (!lim) throw Error(ErrorCode::SchemaError, "bad limit");
    r.limit = *lim;
    r.stdout_excerpt = field(j, "stdout_excerpt").get<std::string>();
    r.stderr_excerpt = field(j, "stderr_excerpt").get<std::string>();
    r.proof_artifact_path = opt_field<std::string>(j, "proof_artifact_path");
    r.diagnostic = j.value("diagnostic", std::string());
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("run record: ") + e.what());
  }
}

bool canonical_less(const RunRecord& a, const RunRecord& b) {
  return std::tie(a.problem_id, a.adapter_name, a.repetition_index) <
         std::tie(b.problem_id, b.adapter_name, b.repetition_index);
}

void sort_canonical(std::vector<RunRecord>& records) {
  std::stable_sort(records.begin(), records.end(), canonical_less);
}

// ---------------------------------------------------------------------------
// Manifest and plan

HostInfo capture_host() {
  HostInfo h;
  struct utsname u {};
  if (::uname(&u) == 0) h.os = std::string(u.sysname) + " " + u.release;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) h.cpu_model = normalize_whitespace(line.substr(colon + 1));
      break;
    }
  }
  h.logical_cores = std::thread::hardware_concurrency();
  struct sysinfo si {};
  if (::sysinfo(&si) == 0) {
    h.total_ram_mib = static_cast<std::uint64_t>(si.totalram) * si.mem_unit / (1024 * 1024);
  }
  return h;
}

Json RunManifest::to_json() const {
  Json j;
  j["run_id"] = run_id;
  j["started_at"] = started_at;
  Json host_j;
  host_j["os"] = host.os;
  host_j["cpu_model"] = host.cpu_model;
  host_j["logical_cores"] = host.logical_cores;
  host_j["total_ram_mib"] = host.total_ram_mib;
  j["host"] = std::move(host_j);
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  return j;
}

RunManifest RunManifest::from_json(const Json& j) {
  try {
    RunManifest m;
    m.run_id = field(j, "run_id").get<std::string>();
    m.started_at = field(j, "started_at").get<std::string>();
    const Json& h = field(j, "host");
    m.host.os = field(h, "os").get<std::string>();
    m.host.cpu_model = field(h, "cpu_model").get<std::string>();
    m.host.logical_cores = field(h, "logical_cores").get<unsigned>();
    m.host.total_ram_mib = field(h, "total_ram_mib").get<std::uint64_t>();
    m.config_hash = field(j, "config_hash").get<std::string>();
    m.tool_version = field(j, "tool_version").get<std::string>();
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("run manifest: ") + e.what());
  }
}

Json RunPlan::to_json() const {
  Json j;
  Json probs = Json::array();
  for (const auto& p : problems) {
    Json x;
    x["id"] = p.id;
    x["axiom_system"] = p.axiom_system;
    x["conjecture_type"] = p.conjecture_type;
    x["expected_status"] = corpus::to_string(p.expected_status);
    probs.push_back(std::move(x));
  }
  j["problems"] = std::move(probs);
  Json ads = Json::array();
  for (const auto& a : adapters) {
    Json x;
    x["name"] = a.name;
    x["method"] = a.method;
    x["input_dialect"] = a.input_dialect;
    x["readable_proofs"] = adapters::to_string(a.readable_proofs);
    ads.push_back(std::move(x));
  }
  j["adapters"] = std::move(ads);
  j["skipped_adapters"] = skipped_adapters;
  j["repetitions"] = repetitions;
  j["total_jobs"] = total_jobs;
  j["config"] = config.is_null() ? Json::object() : config;
  return j;
}

RunPlan RunPlan::from_json(const Json& j) {
  try {
    RunPlan p;
    for (const auto& x : field(j, "problems")) {
      PlanProblem pp;
      pp.id = field(x, "id").get<std::string>();
      pp.axiom_system = field(x, "axiom_system").get<std::string>();
      pp.conjecture_type = field(x, "conjecture_type").get<std::string>();
      auto st = corpus::expected_status_from(field(x, "expected_status").get<std::string>());
      if (!st) throw Error(ErrorCode::SchemaError, "bad expected_status in plan");
      pp.expected_status = *st;
      p.problems.push_back(std::move(pp));
    }
    for (const auto& x : field(j, "adapters")) {
      PlanAdapter pa;
      pa.name = field(x, "name").get<std::string>();
      pa.method = field(x, "method").get<std::string>();
      pa.input_dialect = field(x, "input_dialect").get<std::string>();
      auto r = adapters::readability_from(field(x, "readable_proofs").get<std::string>());
      if (!r) throw Error(ErrorCode::SchemaError, "bad readable_proofs in plan");
      pa.readable_proofs = *r;
      p.adapters.push_back(std::move(pa));
    }
    p.skipped_adapters = field(j, "skipped_adapters").get<std::vector<std::string>>();
    p.repetitions = field(j, "repetitions").get<int>();
    p.total_jobs = field(j, "total_jobs").get<std::size_t>();
    p.config = j.value("config", Json::object());
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("run plan: ") + e.what());
  }
}

Json Results::to_json() const {
  Json j;
  j["manifest"] = manifest.to_json();
  j["plan"] = plan.to_json();
  j["complete"] = complete;
  Json recs = Json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  j["records"] = std::move(recs);
  return j;
}

std::string Results::serialize() const { return dump_pretty(to_json()); }

Json summary_of(const std::vector<RunRecord>& records) {
  Json counts;
  for (Verdict v : adapters::kAllVerdicts) counts[std::string(adapters::to_string(v))] = 0;
  for (const auto& r : records) {
    auto& c = counts[std::string(adapters::to_string(r.verdict))];
    c = c.get<int>() + 1;
  }
  Json j;
  j["records"] = records.size();
  j["verdicts"] = std::move(counts);
  return j;
}

// ---------------------------------------------------------------------------
// Log fold

LogSnapshot fold_events(std::string_view text) {
  LogSnapshot snap;
  bool started = false;
  // Keyed by (problem, adapter, rep); std::map keeps in_flight ordered.
  std::map<std::tuple<std::string, std::string, int>, InFlightJob> flying;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) break;  // partial trailing line
    std::string_view line = text.substr(pos, nl - pos);
    if (line.empty()) {
      pos = nl + 1;
      snap.bytes = pos;
      continue;
    }
    Json ev = Json::parse(line.begin(), line.end(), nullptr, false);
    if (ev.is_discarded() || !ev.is_object() || !ev.contains("event")) {
      snap.truncated = true;
      break;
    }
    const std::string kind = ev.value("event", std::string());
    try {
      if (!started) {
        if (kind != "run_started") break;
        snap.results.manifest = RunManifest::from_json(field(ev, "manifest"));
        snap.results.plan = RunPlan::from_json(field(ev, "plan"));
        started = true;
      } else if (kind == "job_started") {
        InFlightJob f;
        f.problem_id = field(ev, "problem_id").get<std::string>();
        f.adapter_name = field(ev, "adapter_name").get<std::string>();
        f.repetition_index = field(ev, "repetition_index").get<int>();
        f.started_at = field(ev, "started_at").get<double>();
        flying[{f.problem_id, f.adapter_name, f.repetition_index}] = f;
      } else if (kind == "job_finished") {
        RunRecord r = RunRecord::from_json(field(ev, "record"));
        flying.erase({r.problem_id, r.adapter_name, r.repetition_index});
        snap.results.records.push_back(std::move(r));
      } else if (kind == "run_finished") {
        snap.results.complete = true;
      }
    } catch (const Error&) {
      snap.truncated = true;
      break;
    } catch (const Json::exception&) {
      snap.truncated = true;
      break;
    }
    pos = nl + 1;
    snap.bytes = pos;
  }
  if (!started) throw Error(ErrorCode::MissingRunStart, "event log has no run_started event");
  sort_canonical(snap.results.records);
  for (auto& [k, f] : flying) snap.in_flight.push_back(std::move(f));
  return snap;
}

Results replay_log(const fs::path& events_path) {
  return fold_events(read_file(events_path)).results;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

class EventWriter {
 public:
  explicit EventWriter(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error(ErrorCode::OutDirNotWritable,
                  path.string() + ": " + std::strerror(errno));
    }
  }
  ~EventWriter() {
    if (fd_ >= 0) ::close(fd_);
  }
  EventWriter(const EventWriter&) = delete;
  EventWriter& operator=(const EventWriter&) = delete;

  void append(const Json& event) {
    std::string line = dump_compact(event);
    line.push_back('\n');
    std::lock_guard lock(mu_);
    std::size_t off = 0;
    while (off < line.size()) {
      ssize_t n = ::write(fd_, line.data() + off, line.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::IoError, std::string("event log write: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

 private:
  int fd_ = -1;
  std::mutex mu_;
};

class RunLock {
 public:
  explicit RunLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error(ErrorCode::OutDirNotWritable, path.string() + ": " + std::strerror(errno));
    }
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::OutDirNotWritable,
                  path.parent_path().string() + ": another run is using this directory");
    }
  }
  ~RunLock() { ::close(fd_); }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  int fd_ = -1;
};

struct Job {
  const corpus::ProblemEntry* problem;
  const adapters::AdapterSpec* adapter;
  fs::path executable;
  int rep;
};

std::optional<std::string> collect_artifact(const adapters::AdapterSpec& spec, const Job& job,
                                            const fs::path& workdir, const fs::path& out_dir) {
  if (!spec.proof_artifact) return std::nullopt;
  std::vector<std::string> hits;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(workdir, ec)) {
    if (!e.is_regular_file(ec)) continue;
    std::string name = e.path().filename().string();
    if (::fnmatch(spec.proof_artifact->c_str(), name.c_str(), 0) == 0) hits.push_back(name);
  }
  if (hits.empty()) return std::nullopt;
  std::sort(hits.begin(), hits.end());
  fs::path rel = fs::path("artifacts") / job.problem->id() / spec.name /
                 ("r" + std::to_string(job.rep)) / hits.front();
  fs::create_directories((out_dir / rel).parent_path(), ec);
  fs::copy_file(workdir / hits.front(), out_dir / rel, fs::copy_options::overwrite_existing, ec);
  if (ec) return std::nullopt;
  return rel.generic_string();
}

RunRecord execute(const Job& job, const RunConfig& config, const fs::path& out_dir) {
  const auto& spec = *job.adapter;
  RunRecord rec;
  rec.problem_id = job.problem->id();
  rec.adapter_name = spec.name;
  rec.repetition_index = job.rep;

  fs::path workdir = out_dir / "work" /
                     (rec.problem_id + "__" + spec.name + "__r" + std::to_string(job.rep));
  std::error_code ec;
  fs::remove_all(workdir, ec);
  fs::create_directories(workdir, ec);
  if (ec) {
    rec.verdict = Verdict::Error;
    rec.diagnostic = "cannot create workdir: " + ec.message();
    return rec;
  }

  const std::string input_name = spec.input_filename(rec.problem_id);
  try {
    write_file(workdir / input_name, geoform::emit(job.problem->problem, spec.input_dialect));
  } catch (const Error& e) {
    rec.verdict = Verdict::Error;
    rec.diagnostic = e.what();
    return rec;
  }

  std::vector<std::string> argv = spec.instantiate(input_name, workdir.string());
  argv[0] = job.executable.string();

  try {
    process::JobMeasurement m = process::measure_job(argv, config.limits(), workdir);
    rec.wall_time_s = m.wall_time_s;
    rec.cpu_time_s = m.cpu_time_s;
    rec.max_rss_mib = m.max_rss_mib;
    rec.exit_code = m.exit_code;
    rec.term_signal = m.term_signal;
    rec.limit = m.breach;
    rec.stdout_excerpt = sanitize_utf8(m.stdout_text);
    rec.stderr_excerpt = sanitize_utf8(m.stderr_text);
    switch (m.breach) {
      case process::LimitBreach::Wall:
      case process::LimitBreach::Cpu:
        rec.verdict = Verdict::Timeout;
        break;
      case process::LimitBreach::Memory:
        rec.verdict = Verdict::MemOut;
        break;
      case process::LimitBreach::None: {
        std::optional<int> code = m.exit_code;
        if (!code && m.term_signal) code = 128 + *m.term_signal;
        rec.verdict = adapters::classify_output(spec, m.stdout_text + "\n" + m.stderr_text, code);
        break;
      }
    }
    rec.proof_artifact_path = collect_artifact(spec, job, workdir, out_dir);
  } catch (const Error& e) {
    rec.verdict = Verdict::Error;
    rec.diagnostic = e.what();
  }

  if (!config.keep_workdirs) fs::remove_all(workdir, ec);
  return rec;
}

std::string config_hash(const CompetitionInput& input, const RunConfig& config) {
  Json doc;
  doc["config"] = config.to_json();
  Json c;
  c["manifest"] = input.corpus_manifest;
  Json probs = Json::array();
  for (const auto& p : input.problems) probs.push_back(geoform::write_exchange(p.problem));
  c["problems"] = std::move(probs);
  doc["corpus"] = std::move(c);
  Json ads = Json::array();
  for (const auto& a : input.adapters) ads.push_back(a.to_json());
  doc["adapters"] = std::move(ads);
  return sha256_hex(dump_compact(doc));
}

}  // namespace

CompetitionOutput run_competition(const CompetitionInput& input, const RunConfig& config,
                                  const fs::path& out_dir) {
  config.validate();

  RunPlan plan;
  plan.repetitions = config.repetitions;
  plan.config = config.to_json();
  std::vector<std::pair<const adapters::AdapterSpec*, fs::path>> present;
  for (const auto& a : input.adapters) {
    if (auto exe = adapters::resolve_executable(a)) {
      present.emplace_back(&a, *exe);
      plan.adapters.push_back({a.name, a.method, std::string(geoform::dialect_name(a.input_dialect)),
                               a.readable_proofs});
    } else {
      plan.skipped_adapters.push_back(a.name);
    }
  }
  if (present.empty()) {
    throw Error(ErrorCode::NoRunnableAdapters, "none of the adapters' executables is installed");
  }
  for (const auto& p : input.problems) {
    plan.problems.push_back({p.id(), std::string(corpus::to_string(p.axiom_system)),
                             std::string(corpus::to_string(p.conjecture_type)),
                             p.expected_status});
  }
  plan.total_jobs = input.problems.size() * present.size() *
                    static_cast<std::size_t>(config.repetitions);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw Error(ErrorCode::OutDirNotWritable,
                out_dir.string() + ": " + (ec ? ec.message() : "not a directory"));
  }
  RunLock lock(out_dir / kLockFile);
  fs::remove(out_dir / kResultsFile, ec);
  const fs::path events_path = out_dir / kEventsFile;
  EventWriter log(events_path);

  RunManifest manifest;
  manifest.run_id = uuid_v4();
  manifest.started_at = utc_timestamp();
  manifest.host = capture_host();
  manifest.config_hash = config_hash(input, config);
  manifest.tool_version = std::string(kToolVersion);

  {
    Json ev;
    ev["event"] = "run_started";
    ev["manifest"] = manifest.to_json();
    ev["plan"] = plan.to_json();
    log.append(ev);
  }

  std::vector<Job> jobs;
  jobs.reserve(plan.total_jobs);
  for (int rep = 0; rep < config.repetitions; ++rep) {
    for (const auto& p : input.problems) {
      for (const auto& [spec, exe] : present) jobs.push_back({&p, spec, exe, rep});
    }
  }

  process::become_subreaper();
  const double t0 = unix_now();
  std::atomic<std::size_t> next{0};
  std::mutex records_mu;
  std::vector<RunRecord> records;
  records.reserve(jobs.size());

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      Json started;
      started["event"] = "job_started";
      started["problem_id"] = job.problem->id();
      started["adapter_name"] = job.adapter->name;
      started["repetition_index"] = job.rep;
      started["started_at"] = unix_now();
      log.append(started);

      RunRecord rec = execute(job, config, out_dir);
      Json finished;
      finished["event"] = "job_finished";
      finished["record"] = rec.to_json();
      log.append(finished);
      std::lock_guard g(records_mu);
      records.push_back(std::move(rec));
      if (input.progress) input.progress(records.back(), records.size(), jobs.size());
    }
  };

  const int pool = config.timing_mode == TimingMode::Serial
                       ? 1
                       : std::min<int>(config.workers, static_cast<int>(jobs.size()));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
  }

  {
    Json ev;
    ev["event"] = "run_finished";
    Json summary = summary_of(records);
    summary["elapsed_s"] = round_micro(unix_now() - t0);
    ev["summary"] = std::move(summary);
    log.append(ev);
  }
  if (!config.keep_workdirs) fs::remove(out_dir / "work", ec);  // only if empty

  CompetitionOutput out;
  out.events_path = events_path;
  out.results_path = out_dir / kResultsFile;
  out.results = replay_log(events_path);
  write_file(out.results_path, out.results.serialize());
  return out;
}

bool runner_alive(const fs::path& run_dir) {
  int fd = ::open((run_dir / kLockFile).c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) return false;
  bool alive = ::flock(fd, LOCK_SH | LOCK_NB) != 0 && errno == EWOULDBLOCK;
  ::close(fd);
  return alive;
}

}  // namespace gasc::runner
