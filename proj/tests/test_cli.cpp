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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dsaudit/digest.hpp"
#include "support.hpp"

using namespace dsaudit;
using namespace dsaudit::cli;
namespace fs = std::filesystem;

namespace {

std::string src(const std::string& rel) { return testing::source_path(rel).string(); }

struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "dsaudit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Small version of the minors plan for fast end-to-end runs.
std::string small_plan(bool with_seed) {
  std::string text = testing::read_text(testing::source_path("scenarios/minors_profiling.plan"));
  auto replace = [&](const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
  };
  replace("duration_days = 20", "duration_days = 4");
  replace("seed = 1\n", with_seed ? "seed = 1\n" : "");
  return text;
}

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (value) setenv(kSeedEnv, value, 1);
    else unsetenv(kSeedEnv);
  }
  ~EnvGuard() { unsetenv(kSeedEnv); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate: shipped plan, overlapping ages, missing file") {
  auto r = invoke({"validate", src("scenarios/minors_profiling.plan")});
  CHECK(r.code == kOk);
  CHECK(r.out.find("ok") != std::string::npos);

  const auto dir = testing::scratch_dir("cli_validate");
  std::string text = testing::read_text(testing::source_path("scenarios/minors_profiling.plan"));
  text.replace(text.find("18-25"), 5, "17-25");
  write(dir / "overlap.plan", text);
  r = invoke({"validate", (dir / "overlap.plan").string()});
  CHECK(r.code == kValidation);
  CHECK(r.out.find("cohort age ranges overlap") != std::string::npos);

  r = invoke({"validate", (dir / "missing.plan").string()});
  CHECK(r.code == kIo);
}

TEST_CASE("usage errors exit 1") {
  CHECK(invoke({}).code == kValidation);
  CHECK(invoke({"frobnicate"}).code == kValidation);
  CHECK(invoke({"run", src("scenarios/minors_profiling.plan")}).code == kValidation);
  CHECK(invoke({"--help"}).code == kOk);
}

TEST_CASE("run writes the run directory and honours --fail-on-noncompliant") {
  const auto dir = testing::scratch_dir("cli_run");
  auto r = invoke({"run", src("scenarios/minors_profiling.plan"), src("presets/noncompliant_minors.platform"), "--out",
                (dir / "nc").string(), "--fail-on-noncompliant"});
  CHECK(r.code == kNonCompliant);
  for (const char* f : {kPlanFile, kPlatformFile, kLogFile, kReportJson, kReportMd}) CHECK(fs::exists(dir / "nc" / f));
  CHECK(testing::read_text(dir / "nc" / kPlanFile) ==
        testing::read_text(testing::source_path("scenarios/minors_profiling.plan")));

  r = invoke({"run", src("scenarios/minors_profiling.plan"), src("presets/noncompliant_minors.platform"), "--out",
           (dir / "nc2").string()});
  CHECK(r.code == kOk);

  r = invoke({"run", src("scenarios/minors_profiling.plan"), src("presets/compliant.platform"), "--out",
           (dir / "c").string(), "--fail-on-noncompliant"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("minors_profiling: compliant") != std::string::npos);
}

TEST_CASE("run rejects bad inputs") {
  const auto dir = testing::scratch_dir("cli_run_bad");
  write(dir / "bad.platform", "ad_slot_rate = 2\n");
  auto r = invoke({"run", src("scenarios/minors_profiling.plan"), (dir / "bad.platform").string(), "--out",
                (dir / "x").string()});
  CHECK(r.code == kValidation);
  CHECK(r.err.find("ad_slot_rate") != std::string::npos);
  r = invoke({"run", src("scenarios/minors_profiling.plan"), (dir / "nope.platform").string(), "--out",
           (dir / "y").string()});
  CHECK(r.code == kIo);
}

TEST_CASE("seed precedence: flag, plan, environment, zero") {
  {
    EnvGuard env(nullptr);
    CHECK(resolve_seed(std::nullopt, false, 0) == 0);
    CHECK(resolve_seed(std::nullopt, true, 5) == 5);
    CHECK(resolve_seed(9, true, 5) == 9);
  }
  {
    EnvGuard env("77");
    CHECK(resolve_seed(std::nullopt, false, 0) == 77);
    CHECK(resolve_seed(std::nullopt, true, 5) == 5);
    CHECK(resolve_seed(3, false, 0) == 3);
  }
  {
    EnvGuard env("seventy");
    CHECK_THROWS(resolve_seed(std::nullopt, false, 0));
  }
}

TEST_CASE("--seed and the environment change the log") {
  const auto dir = testing::scratch_dir("cli_seed");
  write(dir / "p.plan", small_plan(false));
  const auto platform = src("presets/compliant.platform");
  auto log_hash = [&](const std::string& sub) {
    return config_hash(testing::read_text(dir / sub / kLogFile));
  };
  EnvGuard env(nullptr);
  REQUIRE(invoke({"run", (dir / "p.plan").string(), platform, "--out", (dir / "a").string()}).code == kOk);
  REQUIRE(invoke({"run", (dir / "p.plan").string(), platform, "--out", (dir / "b").string()}).code == kOk);
  REQUIRE(invoke({"run", (dir / "p.plan").string(), platform, "--out", (dir / "c").string(), "--seed", "12"}).code ==
          kOk);
  CHECK(log_hash("a") == log_hash("b"));
  CHECK(log_hash("a") != log_hash("c"));
  setenv(kSeedEnv, "12", 1);
  REQUIRE(invoke({"run", (dir / "p.plan").string(), platform, "--out", (dir / "d").string()}).code == kOk);
  CHECK(log_hash("d") == log_hash("c"));
}

TEST_CASE("replay: clean, tampered, wrong preset") {
  const auto dir = testing::scratch_dir("cli_replay");
  write(dir / "p.plan", small_plan(true));
  REQUIRE(invoke({"run", (dir / "p.plan").string(), src("presets/compliant.platform"), "--out", (dir / "r").string()})
              .code == kOk);
  const auto log = (dir / "r" / kLogFile).string();
  auto r = invoke({"replay", log});
  CHECK(r.code == kOk);
  CHECK(r.out.find("replay identical") != std::string::npos);

  r = invoke({"replay", log, "--platform", src("presets/noncompliant_minors.platform")});
  CHECK(r.code == kReplayMismatch);

  std::string text = testing::read_text(log);
  const auto pos = text.find("\"watched\":false");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 15, "\"watched\":true");
  write(dir / "r" / kLogFile, text);
  r = invoke({"replay", log});
  CHECK(r.code == kReplayMismatch);
  CHECK(r.err.find("sequence number") != std::string::npos);

  r = invoke({"replay", (dir / "nowhere" / kLogFile).string()});
  CHECK(r.code == kIo);
}

TEST_CASE("compare two run directories") {
  const auto dir = testing::scratch_dir("cli_compare");
  write(dir / "p.plan", small_plan(true));
  REQUIRE(invoke({"run", (dir / "p.plan").string(), src("presets/compliant.platform"), "--out", (dir / "a").string()})
              .code == kOk);
  REQUIRE(invoke({"run", (dir / "p.plan").string(), src("presets/noncompliant_minors.platform"), "--out",
               (dir / "b").string()})
              .code == kOk);
  auto r = invoke({"compare", (dir / "a" / kReportJson).string(), (dir / "a" / kReportJson).string()});
  CHECK(r.code == kOk);
  r = invoke({"compare", (dir / "a" / kReportJson).string(), (dir / "b" / kReportJson).string()});
  CHECK(r.code == kOk);
  CHECK(r.out.find("minors_profiling") != std::string::npos);
  write(dir / "junk.json", "{");
  CHECK(invoke({"compare", (dir / "a" / kReportJson).string(), (dir / "junk.json").string()}).code == kValidation);
}

TEST_CASE("sweep writes the power curve") {
  const auto dir = testing::scratch_dir("cli_sweep");
  write(dir / "p.plan", small_plan(true));
  write(dir / "g.grid",
        "w_match = 0, 3\ncohort_size = 5\nviolating = " + src("presets/noncompliant_minors.platform") +
            "\ncompliant = " + src("presets/compliant.platform") + "\n");
  const auto r = invoke({"sweep", (dir / "p.plan").string(), (dir / "g.grid").string(), "--runs", "2", "--out",
                      (dir / "s").string(), "--threads", "2"});
  CHECK(r.code == kOk);
  const auto csv = testing::read_text(dir / "s" / kSweepCsv);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(fs::exists(dir / "s" / kSweepPlot));
  CHECK(r.out.find("power") != std::string::npos);
}

}  // TEST_SUITE
