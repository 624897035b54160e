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

#include "dsaudit/pipeline.hpp"

#include "dsaudit/errors.hpp"
#include "dsaudit/executor.hpp"
#include "dsaudit/simplatform.hpp"

namespace dsaudit {

AuditRun execute_audit(const AuditPlan& plan, const PlatformConfig& config, std::uint64_t seed,
                       std::ostream* stream) {
  const auto problems = check_platform_config(config, plan.duration_days);
  if (!problems.empty()) {
    std::string msg = "platform config does not fit the plan:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(msg);
  }
  SimPlatform platform(config);
  AuditRun run;
  run.seed = seed;
  run.log = run_audit(plan, platform, seed, stream);
  run.profiles = audit_profiles(plan, seed);
  run.verdict = evaluate_plan(run.log, run.profiles, plan);
  return run;
}

}  // namespace dsaudit
