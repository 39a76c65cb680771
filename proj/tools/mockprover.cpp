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

// mockprover: a hermetic stand-in for a geometry prover.
//
// `prove` evaluates the construction numerically at the given coordinates
// and answers "RESULT: proved" only when the conjecture holds there; it
// says "RESULT: unknown" otherwise. The other behaviors are fixed: `wrong`
// always claims a proof, `disprove` always refutes, `hang` never answers,
// `crash` exits 3 silently, `garbage` prints text no adapter rule matches.

#include <fcntl.h>
#include <signal.h>
#include <sys/file.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "gasc/error.hpp"
#include "gasc/geoform.hpp"

namespace {

using namespace gasc::geoform;

struct Vec {
  double x = 0;
  double y = 0;
};
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
double cross(Vec a, Vec b) { return a.x * b.y - a.y * b.x; }
double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y; }
double norm(Vec a) { return std::sqrt(dot(a, a)); }

// a*x + b*y = c
struct LineEq {
  double a, b, c;
};
struct CircleObj {
  Vec center;
  double radius;
};

using Object = std::variant<Vec, LineEq, CircleObj>;

struct Degenerate {};

constexpr double kTol = 1e-9;

class Evaluator {
 public:
  explicit Evaluator(const GeoProblem& p) : problem_(p) {
    for (const auto& fp : p.construction.free_points) {
      objects_[fp.name] = Vec{std::stod(fp.x), std::stod(fp.y)};
    }
    for (const auto& s : p.construction.steps) objects_[s.out[0]] = apply(s);
  }

  bool conjecture_holds() const {
    std::vector<Vec> pts;
    double scale = 1;
    for (const auto& a : problem_.conjecture.args) {
      pts.push_back(point(a));
      scale = std::max({scale, std::abs(pts.back().x), std::abs(pts.back().y)});
    }
    switch (problem_.conjecture.predicate) {
      case Predicate::Collinear:
        return small(cross(pts[1] - pts[0], pts[2] - pts[0]),
                     norm(pts[1] - pts[0]) * norm(pts[2] - pts[0]));
      case Predicate::Parallel:
        return small(cross(pts[1] - pts[0], pts[3] - pts[2]),
                     norm(pts[1] - pts[0]) * norm(pts[3] - pts[2]));
      case Predicate::Perpendicular:
        return small(dot(pts[1] - pts[0], pts[3] - pts[2]),
                     norm(pts[1] - pts[0]) * norm(pts[3] - pts[2]));
      case Predicate::Midpoint: {
        Vec mid{(pts[1].x + pts[2].x) / 2, (pts[1].y + pts[2].y) / 2};
        return small(norm(pts[0] - mid), scale);
      }
      case Predicate::EqualDistance: {
        double d1 = norm(pts[1] - pts[0]);
        double d2 = norm(pts[3] - pts[2]);
        return small(d1 - d2, std::max(d1, d2));
      }
      case Predicate::Concyclic: {
        double m[4][4];
        for (int i = 0; i < 4; ++i) {
          m[i][0] = pts[i].x * pts[i].x + pts[i].y * pts[i].y;
          m[i][1] = pts[i].x;
          m[i][2] = pts[i].y;
          m[i][3] = 1;
        }
        return small(det4(m), std::pow(scale, 4));
      }
    }
    return false;
  }

 private:
  static bool small(double value, double magnitude) {
    return std::abs(value) <= kTol * std::max(magnitude, 1.0);
  }

  static double det3(double a, double b, double c, double d, double e, double f, double g,
                     double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  }

  static double det4(const double m[4][4]) {
    double out = 0;
    for (int col = 0; col < 4; ++col) {
      double minor[9];
      int k = 0;
      for (int r = 1; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          if (c != col) minor[k++] = m[r][c];
        }
      }
      double d = det3(minor[0], minor[1], minor[2], minor[3], minor[4], minor[5], minor[6],
                      minor[7], minor[8]);
      out += (col % 2 == 0 ? 1 : -1) * m[0][col] * d;
    }
    return out;
  }

  Vec point(const std::string& n) const { return std::get<Vec>(objects_.at(n)); }
  LineEq line(const std::string& n) const { return std::get<LineEq>(objects_.at(n)); }

  static LineEq through(Vec p, double a, double b) {
    if (std::abs(a) + std::abs(b) < 1e-12) throw Degenerate{};
    return {a, b, a * p.x + b * p.y};
  }

  Object apply(const Step& s) const {
    const auto& a = s.args;
    switch (s.op) {
      case StepOp::Line: {
        Vec p = point(a[0]), q = point(a[1]);
        return through(p, q.y - p.y, p.x - q.x);
      }
      case StepOp::Intersection: {
        LineEq l = line(a[0]), m = line(a[1]);
        double det = l.a * m.b - m.a * l.b;
        if (std::abs(det) < 1e-12) throw Degenerate{};
        return Vec{(l.c * m.b - m.c * l.b) / det, (l.a * m.c - m.a * l.c) / det};
      }
      case StepOp::Midpoint: {
        Vec p = point(a[0]), q = point(a[1]);
        return Vec{(p.x + q.x) / 2, (p.y + q.y) / 2};
      }
      case StepOp::ParallelThrough: {
        LineEq l = line(a[0]);
        return through(point(a[1]), l.a, l.b);
      }
      case StepOp::PerpendicularThrough: {
        LineEq l = line(a[0]);
        return through(point(a[1]), -l.b, l.a);
      }
      case StepOp::Foot: {
        Vec p = point(a[0]);
        LineEq l = line(a[1]);
        double t = (l.a * p.x + l.b * p.y - l.c) / (l.a * l.a + l.b * l.b);
        return Vec{p.x - t * l.a, p.y - t * l.b};
      }
      case StepOp::Circle: {
        Vec c = point(a[0]);
        return CircleObj{c, norm(point(a[1]) - c)};
      }
    }
    throw Degenerate{};
  }

  const GeoProblem& problem_;
  std::map<std::string, Object> objects_;
};

void burn_cpu(double seconds) {
  if (seconds <= 0) return;
  timespec ts{};
  auto cpu_now = [&] {
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) / 1e9;
  };
  double start = cpu_now();
  volatile double sink = 0;
  while (cpu_now() - start < seconds) {
    for (int i = 0; i < 10000; ++i) sink = sink + std::sqrt(static_cast<double>(i));
  }
}

[[noreturn]] void sleep_forever() {
  for (;;) ::pause();
}

void write_pid(const std::string& path, pid_t pid) {
  std::ofstream(path) << pid << "\n";
}

// A child in our process group that ignores SIGTERM.
void spawn_stubborn_child(const std::string& pidfile) {
  pid_t pid = ::fork();
  if (pid == 0) {
    ::signal(SIGTERM, SIG_IGN);
    sleep_forever();
  }
  write_pid(pidfile, pid);
}

// Double fork: the grandchild ignores SIGTERM and outlives its parent.
void spawn_orphan(const std::string& pidfile) {
  int fds[2];
  if (::pipe(fds) != 0) return;
  pid_t mid = ::fork();
  if (mid == 0) {
    pid_t grandchild = ::fork();
    if (grandchild == 0) {
      ::signal(SIGTERM, SIG_IGN);
      sleep_forever();
    }
    (void)!::write(fds[1], &grandchild, sizeof grandchild);
    ::_exit(0);
  }
  pid_t grandchild = 0;
  (void)!::read(fds[0], &grandchild, sizeof grandchild);
  ::waitpid(mid, nullptr, 0);
  write_pid(pidfile, grandchild);
}

void burn_in_child(double seconds) {
  pid_t pid = ::fork();
  if (pid == 0) {
    burn_cpu(seconds);
    ::_exit(0);
  }
  ::waitpid(pid, nullptr, 0);
}

std::string garbage(unsigned seed) {
  std::mt19937 rng(seed);
  static constexpr char kChars[] = "abcdefghijklmnopqrstuvwxyz .,;:";
  std::string out;
  for (int line = 0; line < 20; ++line) {
    for (int i = 0; i < 60; ++i) out.push_back(kChars[rng() % (sizeof kChars - 1)]);
    out.push_back('\n');
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stand-in geometry prover for harness tests"};
  std::string behavior = "prove";
  double delay_wall = 0;
  double burn = 0;
  double burn_child = 0;
  int alloc_mib = 0;
  std::string stubborn_pidfile, orphan_pidfile, lock_probe, proof_out;
  bool ignore_term = false;
  unsigned seed = 0;
  std::string input;
  app.add_option("--behavior", behavior, "prove|disprove|hang|wrong|crash|garbage")
      ->check(CLI::IsMember({"prove", "disprove", "hang", "wrong", "crash", "garbage"}));
  app.add_option("--delay-wall", delay_wall, "sleep this many seconds before answering");
  app.add_option("--burn-cpu", burn, "spin this many CPU seconds before answering");
  app.add_option("--burn-cpu-child", burn_child, "spin in a forked child and wait for it");
  app.add_option("--alloc-mib", alloc_mib, "allocate and touch this much memory");
  app.add_option("--stubborn-child", stubborn_pidfile,
                 "fork a child ignoring SIGTERM; write its pid here");
  app.add_option("--orphan-child", orphan_pidfile,
                 "double-fork an orphan ignoring SIGTERM; write its pid here");
  app.add_flag("--ignore-term", ignore_term, "ignore SIGTERM");
  app.add_option("--lock-probe", lock_probe,
                 "hold an exclusive flock on this file; record overlaps in <file>.conflicts");
  app.add_option("--proof-out", proof_out, "write a proof text to this file");
  app.add_option("--seed", seed, "seed for garbage output");
  app.add_option("input", input, "problem file")->required();
  CLI11_PARSE(app, argc, argv);

  if (ignore_term) ::signal(SIGTERM, SIG_IGN);

  int lock_fd = -1;
  if (!lock_probe.empty()) {
    lock_fd = ::open(lock_probe.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (lock_fd >= 0 && ::flock(lock_fd, LOCK_EX | LOCK_NB) != 0) {
      std::ofstream(lock_probe + ".conflicts", std::ios::app) << ::getpid() << "\n";
      ::flock(lock_fd, LOCK_EX);
    }
  }

  if (behavior == "crash") return 3;

  std::string id = std::filesystem::path(input).filename().string();
  id = id.substr(0, id.find('.'));
  std::cout << "problem: " << id << std::endl;

  if (!stubborn_pidfile.empty()) spawn_stubborn_child(stubborn_pidfile);
  if (!orphan_pidfile.empty()) spawn_orphan(orphan_pidfile);

  std::vector<char> hog;
  if (alloc_mib > 0) {
    hog.resize(static_cast<std::size_t>(alloc_mib) * 1024 * 1024);
    for (std::size_t i = 0; i < hog.size(); i += 4096) hog[i] = 1;
  }
  burn_cpu(burn);
  if (burn_child > 0) burn_in_child(burn_child);
  if (delay_wall > 0) std::this_thread::sleep_for(std::chrono::duration<double>(delay_wall));

  std::string verdict;
  if (behavior == "hang") {
    sleep_forever();
  } else if (behavior == "garbage") {
    std::cout << garbage(seed ? seed : static_cast<unsigned>(::getpid()));
  } else if (behavior == "wrong") {
    verdict = "proved";
  } else if (behavior == "disprove") {
    verdict = "disproved";
  } else {
    verdict = "unknown";
    try {
      auto problem = load_problem_file(input);
      if (Evaluator(problem).conjecture_holds()) verdict = "proved";
    } catch (const gasc::Error& e) {
      std::cerr << "cannot read problem: " << e.what() << "\n";
    } catch (const Degenerate&) {
      std::cerr << "degenerate configuration\n";
    }
  }
  if (!verdict.empty()) std::cout << "RESULT: " << verdict << std::endl;
  if (!proof_out.empty() && verdict == "proved") {
    std::ofstream(proof_out) << "Numeric check of " << id
                             << " at the given coordinates.\nThe conjecture holds.\n";
  }
  if (lock_fd >= 0) ::close(lock_fd);
  return 0;
}
