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

#include "gasc/process.hpp"

#include <dirent.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/prctl.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <set>
#include <vector>

#include "gasc/error.hpp"

namespace gasc::process {

namespace {

using Clock = std::chrono::steady_clock;

constexpr auto kPollInterval = std::chrono::milliseconds(10);
constexpr auto kSampleInterval = std::chrono::milliseconds(20);
constexpr auto kReapBudget = std::chrono::seconds(2);
constexpr auto kDrainBudget = std::chrono::milliseconds(500);

double seconds_since(Clock::time_point t0, Clock::time_point t1) {
  return std::chrono::duration<double>(t1 - t0).count();
}

struct ProcStat {
  pid_t pid = 0;
  pid_t ppid = 0;
  pid_t pgid = 0;
  char state = '?';
  unsigned long long ticks = 0;  // utime + stime + cutime + cstime
  long rss_pages = 0;
};

// Parses /proc/<pid>/stat. The command name may contain spaces and
// parentheses, so fields are counted from the last ')'.
std::optional<ProcStat> read_stat(pid_t pid) {
  char path[64];
  std::snprintf(path, sizeof path, "/proc/%d/stat", static_cast<int>(pid));
  int fd = ::open(path, O_RDONLY | O_CLOEXEC);
  if (fd < 0) return std::nullopt;
  char buf[1024];
  ssize_t n = ::read(fd, buf, sizeof buf - 1);
  ::close(fd);
  if (n <= 0) return std::nullopt;
  buf[n] = '\0';
  char* rp = std::strrchr(buf, ')');
  if (!rp) return std::nullopt;
  ProcStat st;
  st.pid = pid;
  // fields 3.. after "pid (comm) "
  char* p = rp + 2;
  char* save = nullptr;
  int field = 3;
  unsigned long long utime = 0, stime = 0;
  long long cutime = 0, cstime = 0;
  for (char* tok = strtok_r(p, " ", &save); tok; tok = strtok_r(nullptr, " ", &save), ++field) {
    switch (field) {
      case 3: st.state = tok[0]; break;
      case 4: st.ppid = static_cast<pid_t>(std::atoi(tok)); break;
      case 5: st.pgid = static_cast<pid_t>(std::atoi(tok)); break;
      case 14: utime = std::strtoull(tok, nullptr, 10); break;
      case 15: stime = std::strtoull(tok, nullptr, 10); break;
      case 16: cutime = std::strtoll(tok, nullptr, 10); break;
      case 17: cstime = std::strtoll(tok, nullptr, 10); break;
      case 24: st.rss_pages = std::strtol(tok, nullptr, 10); break;
      default: break;
    }
    if (field >= 24) break;
  }
  st.ticks = utime + stime + static_cast<unsigned long long>(std::max(0LL, cutime)) +
             static_cast<unsigned long long>(std::max(0LL, cstime));
  return st;
}

std::vector<ProcStat> scan_all() {
  std::vector<ProcStat> out;
  DIR* d = ::opendir("/proc");
  if (!d) return out;
  while (dirent* e = ::readdir(d)) {
    char* end = nullptr;
    long pid = std::strtol(e->d_name, &end, 10);
    if (*end != '\0' || pid <= 0) continue;
    if (auto st = read_stat(static_cast<pid_t>(pid))) out.push_back(*st);
  }
  ::closedir(d);
  return out;
}

// The job tree: the root, everything in its process group, the descendants
// of those, and re-parented orphans we saw earlier.
std::vector<ProcStat> tree_of(pid_t root, pid_t pgid, const std::set<pid_t>& seen,
                              const std::vector<ProcStat>& all) {
  const pid_t self = ::getpid();
  std::set<pid_t> members;
  for (const auto& p : all) {
    if (p.pid == root || p.pgid == pgid) members.insert(p.pid);
    if (seen.contains(p.pid) && p.ppid == self && p.pgid != p.pid) members.insert(p.pid);
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& p : all) {
      if (!members.contains(p.pid) && members.contains(p.ppid)) {
        members.insert(p.pid);
        grew = true;
      }
    }
  }
  std::vector<ProcStat> out;
  for (const auto& p : all) {
    if (members.contains(p.pid)) out.push_back(p);
  }
  return out;
}

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }
  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::SpawnFailure, std::string("pipe: ") + std::strerror(errno));
  }
  return {Fd(fds[0]), Fd(fds[1])};
}

struct Capture {
  Fd fd;
  std::string text;
  bool truncated = false;

  // Reads what is available; returns false on EOF.
  bool pump() {
    char buf[8192];
    for (;;) {
      ssize_t n = ::read(fd.get(), buf, sizeof buf);
      if (n > 0) {
        std::size_t room = kExcerptLimit - std::min(kExcerptLimit, text.size());
        std::size_t take = std::min(room, static_cast<std::size_t>(n));
        text.append(buf, take);
        if (take < static_cast<std::size_t>(n)) truncated = true;
        continue;
      }
      if (n == 0) {
        fd.reset();
        return false;
      }
      if (errno == EINTR) continue;
      return true;  // EAGAIN
    }
  }
};

std::string find_on_path(const std::string& prog) {
  if (prog.find('/') != std::string::npos) return prog;
  const char* env = std::getenv("PATH");
  std::string path = env ? env : "/usr/local/bin:/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find(':', start);
    if (end == std::string::npos) end = path.size();
    std::string dir = path.substr(start, end - start);
    std::string cand = (dir.empty() ? std::string(".") : dir) + "/" + prog;
    if (::access(cand.c_str(), X_OK) == 0) return cand;
    start = end + 1;
  }
  return prog;
}

void signal_members(const std::vector<ProcStat>& members, pid_t pgid, int sig) {
  ::kill(-pgid, sig);
  for (const auto& p : members) ::kill(p.pid, sig);
}

}  // namespace

std::string_view to_string(LimitBreach b) {
  switch (b) {
    case LimitBreach::None: return "none";
    case LimitBreach::Wall: return "wall";
    case LimitBreach::Cpu: return "cpu";
    case LimitBreach::Memory: return "memory";
  }
  return "none";
}

std::optional<LimitBreach> limit_breach_from(std::string_view s) {
  for (auto b : {LimitBreach::None, LimitBreach::Wall, LimitBreach::Cpu, LimitBreach::Memory}) {
    if (to_string(b) == s) return b;
  }
  return std::nullopt;
}

void become_subreaper() { ::prctl(PR_SET_CHILD_SUBREAPER, 1, 0, 0, 0); }

std::size_t count_group_members(pid_t pgid) {
  std::size_t n = 0;
  for (const auto& p : scan_all()) {
    if (p.pgid == pgid && p.state != 'Z' && p.state != 'X') ++n;
  }
  return n;
}

JobMeasurement measure_job(std::span<const std::string> argv, const Limits& limits,
                           const std::filesystem::path& workdir) {
  if (argv.empty()) throw Error(ErrorCode::SpawnFailure, "empty command");
  const std::string program = find_on_path(argv[0]);
  if (::access(program.c_str(), X_OK) != 0) {
    throw Error(ErrorCode::SpawnFailure, argv[0] + ": " + std::strerror(errno));
  }
  become_subreaper();

  // Everything the child touches is prepared before fork(): other worker
  // threads may hold allocator locks.
  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  const std::string wd = workdir.string();
  Fd devnull(::open("/dev/null", O_RDONLY | O_CLOEXEC));
  auto [out_r, out_w] = make_pipe();
  auto [err_r, err_w] = make_pipe();
  auto [st_r, st_w] = make_pipe();

  const auto start = Clock::now();
  pid_t pid = ::fork();
  if (pid < 0) throw Error(ErrorCode::SpawnFailure, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    sigset_t none;
    sigemptyset(&none);
    ::sigprocmask(SIG_SETMASK, &none, nullptr);
    for (int sig : {SIGPIPE, SIGTERM, SIGINT, SIGHUP, SIGQUIT, SIGCHLD}) ::signal(sig, SIG_DFL);
    if (devnull) ::dup2(devnull.get(), 0);
    ::dup2(out_w.get(), 1);
    ::dup2(err_w.get(), 2);
    if (!wd.empty() && ::chdir(wd.c_str()) != 0) {
      int e = errno;
      (void)!::write(st_w.get(), &e, sizeof e);
      ::_exit(127);
    }
    ::execv(program.c_str(), cargv.data());
    int e = errno;
    (void)!::write(st_w.get(), &e, sizeof e);
    ::_exit(127);
  }

  ::setpgid(pid, pid);  // also done by the child; whichever runs first wins
  const pid_t pgid = pid;
  out_w.reset();
  err_w.reset();
  st_w.reset();

  int exec_errno = 0;
  ssize_t got;
  do {
    got = ::read(st_r.get(), &exec_errno, sizeof exec_errno);
  } while (got < 0 && errno == EINTR);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    ::waitpid(pid, nullptr, 0);
    throw Error(ErrorCode::SpawnFailure, argv[0] + ": " + std::strerror(exec_errno));
  }

  Capture cap_out{std::move(out_r), {}, false};
  Capture cap_err{std::move(err_r), {}, false};
  for (auto* c : {&cap_out, &cap_err}) ::fcntl(c->fd.get(), F_SETFL, O_NONBLOCK);

  const long page = ::sysconf(_SC_PAGESIZE);
  const long hz = ::sysconf(_SC_CLK_TCK);
  JobMeasurement m;
  std::set<pid_t> seen{pid};
  double cpu_peak = 0;
  double rss_peak = 0;
  bool root_done = false;
  int status = 0;
  rusage ru{};
  Clock::time_point end = start;
  Clock::time_point next_sample = start;
  Clock::time_point kill_at{};
  bool hard_killed = false;
  std::vector<ProcStat> members;

  auto sample = [&] {
    members = tree_of(pid, pgid, seen, scan_all());
    unsigned long long ticks = 0;
    long pages = 0;
    for (const auto& p : members) {
      seen.insert(p.pid);
      ticks += p.ticks;
      if (p.state != 'Z') pages += p.rss_pages;
    }
    cpu_peak = std::max(cpu_peak, static_cast<double>(ticks) / static_cast<double>(hz));
    double rss = static_cast<double>(pages) * static_cast<double>(page) / (1024.0 * 1024.0);
    rss_peak = std::max(rss_peak, rss);
    return rss;
  };

  auto pump_pipes = [&](int timeout_ms) {
    pollfd fds[2];
    Capture* caps[2];
    nfds_t n = 0;
    for (auto* c : {&cap_out, &cap_err}) {
      if (c->fd) {
        fds[n] = {c->fd.get(), POLLIN, 0};
        caps[n++] = c;
      }
    }
    if (n == 0) {
      if (timeout_ms > 0) ::poll(nullptr, 0, timeout_ms);
      return;
    }
    if (::poll(fds, n, timeout_ms) > 0) {
      for (nfds_t i = 0; i < n; ++i) {
        if (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) caps[i]->pump();
      }
    }
  };

  while (!root_done) {
    pump_pipes(static_cast<int>(kPollInterval.count()));
    pid_t r = ::wait4(pid, &status, WNOHANG, &ru);
    auto now = Clock::now();
    if (r == pid) {
      root_done = true;
      end = now;
      break;
    }
    double current_rss = 0;
    if (now >= next_sample) {
      current_rss = sample();
      next_sample = now + kSampleInterval;
    }
    if (m.breach == LimitBreach::None) {
      if (seconds_since(start, now) > limits.wall_s) {
        m.breach = LimitBreach::Wall;
      } else if (cpu_peak > limits.cpu_s) {
        m.breach = LimitBreach::Cpu;
      } else if (current_rss > limits.mem_mib) {
        m.breach = LimitBreach::Memory;
      }
      if (m.breach != LimitBreach::None) {
        signal_members(members, pgid, SIGTERM);
        kill_at = now + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(limits.grace_kill_s));
      }
    } else if (!hard_killed && now >= kill_at) {
      members = tree_of(pid, pgid, seen, scan_all());
      signal_members(members, pgid, SIGKILL);
      hard_killed = true;
    }
  }

  // Leftover descendants: account for them, kill them, reap those that were
  // re-parented to us.
  sample();
  const pid_t self = ::getpid();
  const auto reap_deadline = Clock::now() + kReapBudget;
  while (!members.empty() && Clock::now() < reap_deadline) {
    signal_members(members, pgid, SIGKILL);
    for (const auto& p : members) {
      if (p.ppid == self) ::waitpid(p.pid, nullptr, WNOHANG);
    }
    pump_pipes(2);
    members = tree_of(pid, pgid, seen, scan_all());
    members.erase(std::remove_if(members.begin(), members.end(),
                                 [&](const ProcStat& p) {
                                   return p.state == 'Z' && p.ppid != self;
                                 }),
                  members.end());
  }

  const auto drain_deadline = Clock::now() + kDrainBudget;
  while ((cap_out.fd || cap_err.fd) && Clock::now() < drain_deadline) pump_pipes(10);

  double ru_cpu = static_cast<double>(ru.ru_utime.tv_sec + ru.ru_stime.tv_sec) +
                  static_cast<double>(ru.ru_utime.tv_usec + ru.ru_stime.tv_usec) / 1e6;
  m.wall_time_s = seconds_since(start, end);
  m.cpu_time_s = std::max(cpu_peak, ru_cpu);
  m.max_rss_mib = std::max(rss_peak, static_cast<double>(ru.ru_maxrss) / 1024.0);
  // A job can overshoot between two samples and still exit on its own.
  if (m.breach == LimitBreach::None) {
    if (m.wall_time_s > limits.wall_s) {
      m.breach = LimitBreach::Wall;
    } else if (m.cpu_time_s > limits.cpu_s) {
      m.breach = LimitBreach::Cpu;
    } else if (m.max_rss_mib > limits.mem_mib) {
      m.breach = LimitBreach::Memory;
    }
  }
  if (WIFEXITED(status)) m.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) m.term_signal = WTERMSIG(status);
  m.stdout_text = std::move(cap_out.text);
  m.stderr_text = std::move(cap_err.text);
  m.stdout_truncated = cap_out.truncated;
  m.stderr_truncated = cap_err.truncated;
  return m;
}

}  // namespace gasc::process
