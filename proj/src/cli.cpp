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

#include "gasc/cli.hpp"

#include <pthread.h>
#include <signal.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "gasc/adapters.hpp"
#include "gasc/corpus.hpp"
#include "gasc/error.hpp"
#include "gasc/geoform.hpp"
#include "gasc/report.hpp"
#include "gasc/runner.hpp"
#include "gasc/scoring.hpp"
#include "gasc/service.hpp"

namespace gasc::cli {

namespace fs = std::filesystem;

namespace {

// Values after merging defaults, the config file and flags.
struct Settings {
  int verbose = 0;
  std::optional<bool> color;  // unset: colour when stderr is a terminal
  std::string config_path;

  // convert
  std::string conv_in, conv_out, conv_from, conv_to;
  // corpus
  std::string corpus_dir;
  bool json_output = false;
  std::vector<std::string> axioms, types, ids;
  // run
  std::string run_corpus, run_adapters, run_out;
  runner::RunConfig run;
  std::string timing = "serial";
  // score
  std::string score_results, score_corpus, score_out;
  // report
  std::string report_results, report_ranking, report_out;
  std::string report_format = "html,csv,json";
  // serve
  std::string serve_run;
  std::string bind = "127.0.0.1:8080";
  // watch
  std::string watch_url;
  double watch_interval = 2.0;
  int watch_retries = 5;
};

template <typename T>
void from_config(const CLI::Option* opt, const Json& cfg, const char* section, const char* key,
                 T& target) {
  if (opt && opt->count() > 0) return;
  if (!cfg.is_object()) return;
  const Json* node = &cfg;
  if (section) {
    if (!cfg.contains(section) || !cfg.at(section).is_object()) return;
    node = &cfg.at(section);
  }
  if (!node->contains(key)) return;
  try {
    target = node->at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config ") + (section ? section : "") +
                                              (section ? "." : "") + key + ": " + e.what());
  }
}

std::string paint(const Settings& s, std::string_view text, const char* ansi) {
  bool on = s.color ? *s.color : static_cast<bool>(::isatty(STDERR_FILENO));
  if (!on) return std::string(text);
  return std::string("\x1b[") + ansi + "m" + std::string(text) + "\x1b[0m";
}

corpus::ProblemFilter make_filter(const Settings& s) {
  corpus::ProblemFilter f;
  for (const auto& a : s.axioms) {
    auto v = corpus::axiom_system_from(a);
    if (!v) throw Error(ErrorCode::InvalidConfig, "unknown axiom system: " + a);
    f.axiom_systems.push_back(*v);
  }
  for (const auto& t : s.types) {
    auto v = corpus::conjecture_type_from(t);
    if (!v) throw Error(ErrorCode::InvalidConfig, "unknown conjecture type: " + t);
    f.conjecture_types.push_back(*v);
  }
  f.ids = s.ids;
  return f;
}

geoform::Dialect dialect_for(const std::string& name, const fs::path& path, bool input) {
  if (!name.empty()) {
    auto d = geoform::dialect_from_name(name);
    if (!d) throw Error(ErrorCode::InvalidConfig, "unknown dialect: " + name);
    return *d;
  }
  const std::string p = path.string();
  auto ends = [&](std::string_view suf) {
    return p.size() >= suf.size() && p.compare(p.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends(".gf.json") || ends(".json")) return geoform::Dialect::Exchange;
  if (ends(".ggb")) return geoform::Dialect::Ggb;
  if (ends(".gcl")) return geoform::Dialect::Gclc;
  throw Error(ErrorCode::InvalidConfig, std::string("cannot infer the ") +
                                            (input ? "input" : "output") +
                                            " dialect of " + p + "; pass --" +
                                            (input ? "from" : "to"));
}

int cmd_convert(const Settings& s, std::ostream& out) {
  geoform::GeoProblem p;
  if (s.conv_from.empty()) {
    p = geoform::load_problem_file(s.conv_in);
  } else {
    auto d = dialect_for(s.conv_from, s.conv_in, true);
    const std::string text = read_file(s.conv_in);
    if (d == geoform::Dialect::Gclc) {
      p = geoform::parse_gclc_subset(text);
    } else if (d == geoform::Dialect::Exchange) {
      Json j = Json::parse(text, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::SchemaError, s.conv_in + ": invalid JSON");
      p = geoform::read_exchange(j);
    } else {
      throw Error(ErrorCode::InvalidConfig, "ggb is an output-only dialect");
    }
  }
  const std::string text = geoform::emit(p, dialect_for(s.conv_to, s.conv_out, false));
  if (s.conv_out == "-") {
    out << text;
  } else {
    write_file(s.conv_out, text);
  }
  return kOk;
}

int cmd_corpus_validate(const Settings& s, std::ostream& out) {
  auto report = corpus::validate_corpus(corpus::resolve_manifest(s.corpus_dir));
  if (s.json_output) {
    out << dump_pretty(report.to_json());
  } else {
    for (const auto& e : report.entries) {
      out << (e.ok ? paint(s, "ok  ", "32") : paint(s, "FAIL", "31")) << " "
          << (e.id.empty() ? "-" : e.id) << " " << e.file << "\n";
      for (const auto& d : e.diagnostics) out << "     " << d << "\n";
    }
    out << report.entries.size() << " entries, "
        << (report.ok() ? "corpus is valid" : "corpus has errors") << "\n";
  }
  return report.ok() ? kOk : kFailure;
}

int cmd_corpus_list(const Settings& s, std::ostream& out) {
  auto c = corpus::load_corpus(corpus::resolve_manifest(s.corpus_dir));
  auto selected = corpus::select_problems(c, make_filter(s));
  if (s.json_output) {
    Json list = Json::array();
    for (const auto& e : selected) list.push_back(corpus::entry_metadata(e));
    out << dump_pretty(list);
  } else {
    for (const auto& e : selected) {
      out << e.id() << "\t" << corpus::to_string(e.axiom_system) << "\t"
          << corpus::to_string(e.conjecture_type) << "\t"
          << corpus::to_string(e.expected_status) << "\n";
    }
  }
  return kOk;
}

int cmd_run(Settings s, std::ostream& err) {
  auto tm = runner::timing_mode_from(s.timing);
  if (!tm) throw Error(ErrorCode::InvalidConfig, "timing must be serial or parallel");
  s.run.timing_mode = *tm;
  s.run.validate();

  auto c = corpus::load_corpus(corpus::resolve_manifest(s.run_corpus));
  runner::CompetitionInput in;
  in.problems = corpus::select_problems(c, make_filter(s));
  in.adapters = adapters::load_adapters(s.run_adapters);
  in.corpus_manifest = c.manifest;
  for (const auto& a : in.adapters) {
    if (!adapters::resolve_executable(a)) {
      err << "warning: adapter " << a.name << " skipped: '" << a.command_template.front()
          << "' not found\n";
    }
  }
  if (s.verbose > 0) {
    in.progress = [&err](const runner::RunRecord& r, std::size_t done, std::size_t total) {
      err << "[" << done << "/" << total << "] " << r.problem_id << " " << r.adapter_name
          << " r" << r.repetition_index << " " << adapters::to_string(r.verdict) << " "
          << r.wall_time_s << "s\n";
    };
  }
  auto result = runner::run_competition(in, s.run, s.run_out);
  err << result.results.records.size() << " records written to "
      << result.results_path.string() << "\n";
  return kOk;
}

fs::path results_dir(const fs::path& p) { return fs::is_directory(p) ? p : p.parent_path(); }

int cmd_score(const Settings& s, std::ostream& err) {
  auto results = report::load_results(s.score_results);
  auto c = corpus::load_corpus(corpus::resolve_manifest(s.score_corpus));
  const fs::path run_dir = results_dir(s.score_results);
  auto adjudicated = scoring::adjudicate(results.records, scoring::truth_from(c.entries), run_dir);
  auto ranking = scoring::rank(adjudicated, results.plan.adapters);
  const fs::path out_dir = s.score_out.empty() ? run_dir : fs::path(s.score_out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  try {
    write_file(out_dir / "ranking.json", ranking.serialize());
    write_file(out_dir / "adjudicated.json", dump_pretty(scoring::adjudicated_to_json(adjudicated)));
  } catch (const Error& e) {
    throw Error(ErrorCode::OutDirNotWritable, e.detail());
  }
  if (s.verbose > 0) {
    for (const auto& e : ranking.entries) {
      err << e.adapter_name << ": tier " << e.tier << ", solved " << e.solved << ", incorrect "
          << e.incorrect << ", " << e.total_time_s << "s\n";
    }
  }
  return kOk;
}

int cmd_report(const Settings& s, std::ostream& err) {
  auto results = report::load_results(s.report_results);
  const fs::path run_dir = results_dir(s.report_results);
  scoring::Ranking ranking;
  if (!s.report_ranking.empty()) {
    ranking = report::load_ranking(s.report_ranking);
  } else if (fs::exists(run_dir / "ranking.json")) {
    ranking = report::load_ranking(run_dir / "ranking.json");
  } else {
    ranking = scoring::rank_results(results);
  }
  const fs::path out_dir = s.report_out.empty() ? run_dir : fs::path(s.report_out);
  auto files = report::render(results, ranking, report::parse_formats(s.report_format), out_dir);
  if (s.verbose > 0) {
    for (const auto& f : files) err << "wrote " << f.string() << "\n";
  }
  return kOk;
}

int cmd_serve(const Settings& s, std::ostream& err) {
  auto colon = s.bind.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "bind must be HOST:PORT");
  const std::string host = s.bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(s.bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "bad port in " + s.bind);
  }
  if (!fs::is_directory(s.serve_run)) {
    throw Error(ErrorCode::IoError, s.serve_run + ": not a directory");
  }

  // Server threads inherit the mask; a dedicated thread takes the signal.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  service::Service svc(s.serve_run);
  int bound = svc.bind(host, port);
  if (bound <= 0) throw Error(ErrorCode::IoError, "cannot bind " + s.bind);
  err << "serving " << s.serve_run << " on http://" << host << ":" << bound << "\n" << std::flush;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    svc.stop();
  });
  bool ok = svc.run();
  ::kill(::getpid(), SIGTERM);  // release the waiter if the server stopped on its own
  waiter.join();
  return ok ? kOk : kFailure;
}

int cmd_watch(const Settings& s, std::ostream& out, std::ostream& err) {
  service::WatchOptions o;
  o.interval_s = s.watch_interval;
  o.retry_budget = s.watch_retries;
  return service::watch(s.watch_url, o, out, err);
}

// Help text of the innermost subcommand given on the command line.
std::string usage_of(CLI::App* app) {
  std::string prefix;
  while (!app->get_subcommands().empty()) {
    prefix += (prefix.empty() ? "" : " ") + app->get_name();
    app = app->get_subcommands().back();
  }
  return app->help(prefix);
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Geometry prover competition harness", "gasc"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));
  auto* o_verbose = app.add_flag("-v,--verbose", s.verbose, "more diagnostics (repeatable)");
  bool color = false, no_color = false;
  auto* o_color = app.add_flag("--color", color, "force coloured output");
  auto* o_nocolor = app.add_flag("--no-color", no_color, "disable coloured output");
  o_color->excludes(o_nocolor);
  app.add_option("--config", s.config_path, "JSON config file (default: $GASC_CONFIG)");

  auto* convert = app.add_subcommand("convert", "translate a problem between dialects");
  convert->add_option("input", s.conv_in, "problem file")->required()->check(CLI::ExistingFile);
  convert->add_option("output", s.conv_out, "output file, '-' for stdout")->required();
  convert->add_option("--from", s.conv_from, "gclc|exchange (default: sniffed)");
  convert->add_option("--to", s.conv_to, "gclc|exchange|ggb (default: output suffix)");

  auto* corpus_cmd = app.add_subcommand("corpus", "inspect a problem corpus");
  corpus_cmd->require_subcommand(1);
  corpus_cmd->fallthrough();
  auto* validate = corpus_cmd->add_subcommand("validate", "check a corpus manifest and files");
  validate->add_option("dir", s.corpus_dir, "corpus directory or corpus.json")->required();
  validate->add_flag("--json", s.json_output, "machine-readable report");
  auto* list = corpus_cmd->add_subcommand("list", "list problems, optionally filtered");
  list->add_option("dir", s.corpus_dir, "corpus directory or corpus.json")->required();
  list->add_option("--axiom", s.axioms, "axiom system filter")->delimiter(',');
  list->add_option("--type", s.types, "conjecture type filter")->delimiter(',');
  list->add_option("--ids", s.ids, "explicit problem ids")->delimiter(',');
  list->add_flag("--json", s.json_output, "machine-readable output");

  auto* run = app.add_subcommand("run", "run provers on a corpus");
  run->add_option("--corpus", s.run_corpus, "corpus directory")->required();
  run->add_option("--adapters", s.run_adapters, "adapter spec file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", s.run_out, "run directory")->required();
  auto* o_wall = run->add_option("--wall", s.run.wall_limit_s, "wall-clock limit per job (s)")
                     ->capture_default_str();
  auto* o_cpu =
      run->add_option("--cpu", s.run.cpu_limit_s, "CPU limit per job (s)")->capture_default_str();
  auto* o_mem = run->add_option("--mem", s.run.mem_limit_mib, "memory limit per job (MiB)")
                    ->capture_default_str();
  auto* o_workers =
      run->add_option("--workers", s.run.workers, "parallel jobs")->capture_default_str();
  auto* o_timing = run->add_option("--timing", s.timing, "serial|parallel")
                       ->check(CLI::IsMember({"serial", "parallel"}))
                       ->capture_default_str();
  auto* o_reps =
      run->add_option("--reps", s.run.repetitions, "repetitions per job")->capture_default_str();
  auto* o_grace = run->add_option("--grace", s.run.grace_kill_s, "seconds from TERM to KILL")
                      ->capture_default_str();
  run->add_flag("--keep-workdirs", s.run.keep_workdirs, "keep per-job scratch directories");
  run->add_option("--axiom", s.axioms, "axiom system filter")->delimiter(',');
  run->add_option("--type", s.types, "conjecture type filter")->delimiter(',');
  run->add_option("--ids", s.ids, "explicit problem ids")->delimiter(',');

  auto* score = app.add_subcommand("score", "adjudicate results and compute the ranking");
  score->add_option("--results", s.score_results, "run directory or results.json")->required();
  score->add_option("--corpus", s.score_corpus, "corpus directory")->required();
  score->add_option("--out", s.score_out, "output directory (default: run directory)");

  auto* rep = app.add_subcommand("report", "render leaderboard files");
  rep->add_option("--results", s.report_results, "run directory or results.json")->required();
  rep->add_option("--ranking", s.report_ranking, "ranking.json (default: next to results)");
  auto* o_format =
      rep->add_option("--format", s.report_format, "html,csv,json")->capture_default_str();
  rep->add_option("--out", s.report_out, "output directory (default: run directory)");

  auto* serve = app.add_subcommand("serve", "serve run status over HTTP");
  serve->add_option("--run", s.serve_run, "run directory")->required();
  auto* o_bind = serve->add_option("--bind", s.bind, "HOST:PORT")->capture_default_str();

  auto* watch = app.add_subcommand("watch", "poll a running competition");
  watch->add_option("url", s.watch_url, "service URL, e.g. http://127.0.0.1:8080")->required();
  auto* o_interval =
      watch->add_option("--interval", s.watch_interval, "seconds between polls")
          ->capture_default_str();
  auto* o_retries = watch->add_option("--retries", s.watch_retries, "failed polls tolerated")
                        ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << "\n\n" << usage_of(&app);
    return kUsage;
  }

  try {
    if (s.config_path.empty()) {
      if (const char* env = std::getenv("GASC_CONFIG"); env && *env) s.config_path = env;
    }
    Json cfg;
    if (!s.config_path.empty()) {
      cfg = Json::parse(read_file(s.config_path), nullptr, false);
      if (cfg.is_discarded() || !cfg.is_object()) {
        throw Error(ErrorCode::InvalidConfig, s.config_path + ": not a JSON object");
      }
    }
    from_config(o_verbose, cfg, nullptr, "verbose", s.verbose);
    if (color) {
      s.color = true;
    } else if (no_color) {
      s.color = false;
    } else if (cfg.contains("color")) {
      s.color = cfg.at("color").get<bool>();
    }
    from_config(o_wall, cfg, "run", "wall", s.run.wall_limit_s);
    from_config(o_cpu, cfg, "run", "cpu", s.run.cpu_limit_s);
    from_config(o_mem, cfg, "run", "mem", s.run.mem_limit_mib);
    from_config(o_workers, cfg, "run", "workers", s.run.workers);
    from_config(o_timing, cfg, "run", "timing", s.timing);
    from_config(o_reps, cfg, "run", "reps", s.run.repetitions);
    from_config(o_grace, cfg, "run", "grace", s.run.grace_kill_s);
    from_config(o_format, cfg, "report", "format", s.report_format);
    from_config(o_bind, cfg, "serve", "bind", s.bind);
    from_config(o_interval, cfg, "watch", "interval", s.watch_interval);
    from_config(o_retries, cfg, "watch", "retries", s.watch_retries);

    if (convert->parsed()) return cmd_convert(s, out);
    if (validate->parsed()) return cmd_corpus_validate(s, out);
    if (list->parsed()) return cmd_corpus_list(s, out);
    if (run->parsed()) return cmd_run(s, err);
    if (score->parsed()) return cmd_score(s, err);
    if (rep->parsed()) return cmd_report(s, err);
    if (serve->parsed()) return cmd_serve(s, err);
    if (watch->parsed()) return cmd_watch(s, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace gasc::cli
