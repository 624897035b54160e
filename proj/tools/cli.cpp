// Copyright 2026 The dsaudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dsaudit/errors.hpp"
#include "dsaudit/executor.hpp"
#include "dsaudit/pipeline.hpp"
#include "dsaudit/power.hpp"
#include "dsaudit/reporter.hpp"
#include "dsaudit/simplatform.hpp"

namespace dsaudit::cli {

namespace fs = std::filesystem;

namespace {

struct IoError : Error {
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading {}", path.string()));
  return ss.str();
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError(fmt::format("error writing {}", path.string()));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(fmt::format("cannot create directory {}", dir.string()));
}

void require_artifacts(const fs::path& dir, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    std::error_code ec;
    const auto p = dir / name;
    if (!fs::is_regular_file(p, ec) || fs::file_size(p, ec) == 0 || ec)
      throw IoError(fmt::format("run directory is missing {}", p.string()));
  }
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(t));
}

// Parses the plan and prints every finding. Returns nullopt on syntax errors
// or violations.
std::optional<AuditPlan> load_plan(const std::string& text, const std::string& path, std::ostream& err,
                                   bool print_warnings) {
  AuditPlan plan;
  try {
    plan = parse_plan_unchecked(text);
  } catch (const ParseError& e) {
    fmt::print(err, "{}:{}\n", path, e.what());
    return std::nullopt;
  }
  const auto report = validate_plan(plan);
  for (const auto& v : report.violations) fmt::print(err, "{}: violation [{}] {}\n", path, v.invariant, v.message);
  if (print_warnings)
    for (const auto& w : report.warnings) fmt::print(err, "{}: warning [{}] {}\n", path, w.invariant, w.message);
  if (!report.ok()) return std::nullopt;
  return plan;
}

std::optional<PlatformConfig> load_platform(const std::string& text, const std::string& path, int duration,
                                            std::ostream& err) {
  PlatformConfig config;
  try {
    config = parse_platform_config(text);
  } catch (const ParseError& e) {
    fmt::print(err, "{}:{}\n", path, e.what());
    return std::nullopt;
  }
  const auto problems = check_platform_config(config, duration);
  for (const auto& p : problems) fmt::print(err, "{}: {}\n", path, p);
  if (!problems.empty()) return std::nullopt;
  return config;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kIo;
  } catch (const AdapterError& e) {
    fmt::print(err, "adapter error: {}\n", e.what());
    return kAdapter;
  } catch (const CapabilityError& e) {
    fmt::print(err, "adapter error: {}\n", e.what());
    return kAdapter;
  } catch (const HashMismatch& e) {
    fmt::print(err, "replay mismatch: {}\n", e.what());
    return kReplayMismatch;
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kValidation;
  }
}

std::optional<std::uint64_t> parse_u64(const char* s) {
  if (!s || !*s) return std::nullopt;
  std::uint64_t v = 0;
  const char* end = s + std::char_traits<char>::length(s);
  auto [p, ec] = std::from_chars(s, end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, bool plan_has_seed, std::uint64_t plan_seed) {
  if (flag) return *flag;
  if (plan_has_seed) return plan_seed;
  if (const char* env = std::getenv(kSeedEnv)) {
    if (auto v = parse_u64(env)) return *v;
    throw Error(fmt::format("{}='{}' is not an unsigned integer", kSeedEnv, env));
  }
  return 0;
}

int cmd_validate(const std::string& plan_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto text = read_file(plan_path);
    AuditPlan plan;
    try {
      plan = parse_plan_unchecked(text);
    } catch (const ParseError& e) {
      fmt::print(out, "{}:{}\n", plan_path, e.what());
      return static_cast<int>(kValidation);
    }
    const auto report = validate_plan(plan);
    for (const auto& v : report.violations) fmt::print(out, "violation {}: {}\n", v.invariant, v.message);
    for (const auto& w : report.warnings) fmt::print(out, "warning {}: {}\n", w.invariant, w.message);
    if (!report.ok()) return static_cast<int>(kValidation);
    fmt::print(out, "{}: ok ({} cohorts, {} warnings)\n", plan_path, plan.cohorts.size(), report.warnings.size());
    return static_cast<int>(kOk);
  });
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto plan_text = read_file(opts.plan_path);
    const auto platform_text = read_file(opts.platform_path);
    const auto plan = load_plan(plan_text, opts.plan_path, err, true);
    if (!plan) return static_cast<int>(kValidation);
    const auto config = load_platform(platform_text, opts.platform_path, plan->duration_days, err);
    if (!config) return static_cast<int>(kValidation);
    const auto seed = resolve_seed(opts.seed, plan->seed_specified, plan->seed);

    const fs::path dir(opts.out_dir);
    ensure_dir(dir);
    write_file(dir / kPlanFile, plan_text);
    write_file(dir / kPlatformFile, platform_text);

    AuditRun run;
    {
      std::ofstream log_out(dir / kLogFile, std::ios::binary | std::ios::trunc);
      if (!log_out) throw IoError(fmt::format("cannot write {}", (dir / kLogFile).string()));
      run = execute_audit(*plan, *config, seed, &log_out);
      log_out.flush();
      if (!log_out) throw IoError(fmt::format("error writing {}", (dir / kLogFile).string()));
    }

    auto meta = report_metadata(plan->plan_id, run.log.header);
    meta.generated_at = now_utc();
    const auto report = build_report({run.verdict}, meta);
    write_file(dir / kReportJson, render_report(report, ReportFormat::structured));
    write_file(dir / kReportMd, render_report(report, ReportFormat::human_readable));
    require_artifacts(dir, {kPlanFile, kPlatformFile, kLogFile, kReportJson, kReportMd});

    for (const auto& s : report.summary) fmt::print(out, "{}\n", s);
    fmt::print(out, "seed {}, {} impressions, run directory {}\n", seed, run.log.records.size(), dir.string());
    if (opts.fail_on_noncompliant && run.verdict.verdict == Verdict::non_compliant)
      return static_cast<int>(kNonCompliant);
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto plan = load_plan(read_file(opts.plan_path), opts.plan_path, err, false);
    if (!plan) return static_cast<int>(kValidation);
    const auto grid = parse_sweep_grid(read_file(opts.grid_path));
    const fs::path base = fs::path(opts.grid_path).parent_path();
    const auto violating_path = (base / grid.violating_platform).string();
    const auto compliant_path = (base / grid.compliant_platform).string();
    const auto violating = load_platform(read_file(violating_path), violating_path, 0, err);
    const auto compliant = load_platform(read_file(compliant_path), compliant_path, 0, err);
    if (!violating || !compliant) return static_cast<int>(kValidation);
    const auto seed = resolve_seed(opts.seed, plan->seed_specified, plan->seed);

    const auto curve = power_sweep(*plan, *violating, *compliant, grid, opts.runs, seed, opts.threads);
    const fs::path dir(opts.out_dir);
    ensure_dir(dir);
    const auto plot = power_curve_plot(curve);
    write_file(dir / kSweepCsv, power_curve_csv(curve));
    write_file(dir / kSweepPlot, plot);
    require_artifacts(dir, {kSweepCsv, kSweepPlot});
    fmt::print(out, "{}", plot);
    return static_cast<int>(kOk);
  });
}

int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path log_path(opts.explog_path);
    const fs::path dir = log_path.parent_path();
    const std::string plan_path = opts.plan_path.empty() ? (dir / kPlanFile).string() : opts.plan_path;
    const std::string platform_path =
        opts.platform_path.empty() ? (dir / kPlatformFile).string() : opts.platform_path;

    ExposureLog log;
    {
      std::ifstream in(log_path, std::ios::binary);
      if (!in) throw IoError(fmt::format("cannot read {}", log_path.string()));
      try {
        log = read_explog(in);
      } catch (const Error& e) {
        fmt::print(err, "replay mismatch: {}: {}\n", log_path.string(), e.what());
        return static_cast<int>(kReplayMismatch);
      }
    }
    const auto plan = load_plan(read_file(plan_path), plan_path, err, false);
    if (!plan) return static_cast<int>(kValidation);
    const auto config = load_platform(read_file(platform_path), platform_path, plan->duration_days, err);
    if (!config) return static_cast<int>(kValidation);

    const auto result = replay_verify(log, *plan, [&] { return std::make_unique<SimPlatform>(*config); });
    if (!result.identical) {
      if (result.first_divergent_seq)
        fmt::print(err, "replay mismatch at sequence number {}: {}\n", *result.first_divergent_seq, result.detail);
      else
        fmt::print(err, "replay mismatch: {}\n", result.detail);
      return static_cast<int>(kReplayMismatch);
    }
    fmt::print(out, "replay identical: {} records\n", log.records.size());
    return static_cast<int>(kOk);
  });
}

int cmd_compare(const std::string& report_a, const std::string& report_b, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto load = [](const std::string& path) {
      const auto text = read_file(path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        throw Error(fmt::format("{}: {}", path, e.what()));
      }
      return report_from_json(j);
    };
    const auto cmp = compare_reports(load(report_a), load(report_b));
    fmt::print(out, "{}", render_comparison(cmp));
    return static_cast<int>(kOk);
  });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algorithmic audit harness for recommender and ad-delivery systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string validate_plan_path;
  auto* validate = app.add_subcommand("validate", "Check an audit plan and print its findings");
  validate->add_option("plan", validate_plan_path, "Audit plan (.plan)")->required();

  RunOptions run_opts;
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "Run an audit against the simulated platform");
  run->add_option("plan", run_opts.plan_path, "Audit plan (.plan)")->required();
  run->add_option("platform", run_opts.platform_path, "Platform configuration (.platform)")->required();
  auto* run_seed_opt = run->add_option("--seed", run_seed, "Run seed (overrides the plan and $DSAUDIT_SEED)");
  run->add_option("--out", run_opts.out_dir, "Run directory")->capture_default_str();
  run->add_flag("--fail-on-noncompliant", run_opts.fail_on_noncompliant, "Exit 2 when any verdict is non_compliant");

  SweepOptions sweep_opts;
  std::uint64_t sweep_seed = 0;
  auto* sweep = app.add_subcommand("sweep", "Estimate detection power over a parameter grid");
  sweep->add_option("plan", sweep_opts.plan_path, "Audit plan (.plan)")->required();
  sweep->add_option("grid", sweep_opts.grid_path, "Sweep grid (.grid)")->required();
  sweep->add_option("--runs", sweep_opts.runs, "Runs per cell and platform")->capture_default_str()->check(
      CLI::PositiveNumber);
  sweep->add_option("--out", sweep_opts.out_dir, "Output directory")->capture_default_str();
  auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "Base seed");
  sweep->add_option("--threads", sweep_opts.threads, "Worker threads (0: all cores)")->capture_default_str();

  ReplayOptions replay_opts;
  auto* replay = app.add_subcommand("replay", "Re-execute a logged run and compare it record by record");
  replay->add_option("explog", replay_opts.explog_path, "Exposure log (.explog) inside a run directory")->required();
  replay->add_option("--plan", replay_opts.plan_path, "Plan to replay against (default: from the run directory)");
  replay->add_option("--platform", replay_opts.platform_path,
                     "Platform configuration (default: from the run directory)");

  std::string cmp_a, cmp_b;
  auto* compare = app.add_subcommand("compare", "Compare two structured reports side by side");
  compare->add_option("report_a", cmp_a, "First report.json")->required();
  compare->add_option("report_b", cmp_b, "Second report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kValidation;
  }

  if (*validate) return cmd_validate(validate_plan_path, out, err);
  if (*run) {
    if (*run_seed_opt) run_opts.seed = run_seed;
    return cmd_run(run_opts, out, err);
  }
  if (*sweep) {
    if (*sweep_seed_opt) sweep_opts.seed = sweep_seed;
    return cmd_sweep(sweep_opts, out, err);
  }
  if (*replay) return cmd_replay(replay_opts, out, err);
  if (*compare) return cmd_compare(cmp_a, cmp_b, out, err);
  return kValidation;
}

}  // namespace dsaudit::cli
