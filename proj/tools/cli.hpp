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

// Command-line front end. Each command is also callable directly so tests do
// not need to spawn processes.

#ifndef DSAUDIT_TOOLS_CLI_HPP_
#define DSAUDIT_TOOLS_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace dsaudit::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kNonCompliant = 2,
  kIo = 3,
  kAdapter = 4,
  kReplayMismatch = 5,
};

inline constexpr const char* kSeedEnv = "DSAUDIT_SEED";

// Run-directory file names.
inline constexpr const char* kPlanFile = "plan.plan";
inline constexpr const char* kPlatformFile = "platform.platform";
inline constexpr const char* kLogFile = "exposures.explog";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportMd = "report.md";
inline constexpr const char* kSweepCsv = "power_curve.csv";
inline constexpr const char* kSweepPlot = "power_curve.txt";

struct RunOptions {
  std::string plan_path;
  std::string platform_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "dsaudit-run";
  bool fail_on_noncompliant = false;
};

struct SweepOptions {
  std::string plan_path;
  std::string grid_path;
  int runs = 50;
  std::string out_dir = "dsaudit-sweep";
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

struct ReplayOptions {
  std::string explog_path;
  std::string plan_path;      // default: plan.plan next to the log
  std::string platform_path;  // default: platform.platform next to the log
};

int cmd_validate(const std::string& plan_path, std::ostream& out, std::ostream& err);
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const std::string& report_a, const std::string& report_b, std::ostream& out, std::ostream& err);

// Seed precedence: flag, then the plan's `seed`, then $DSAUDIT_SEED, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, bool plan_has_seed, std::uint64_t plan_seed);

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dsaudit::cli

#endif  // DSAUDIT_TOOLS_CLI_HPP_
