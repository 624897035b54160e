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

#ifndef DSAUDIT_PIPELINE_HPP_
#define DSAUDIT_PIPELINE_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dsaudit/evaluator.hpp"
#include "dsaudit/explog.hpp"
#include "dsaudit/platform_config.hpp"
#include "dsaudit/scenario.hpp"

namespace dsaudit {

struct AuditRun {
  std::uint64_t seed = 0;
  std::vector<UserProfile> profiles;
  ExposureLog log;
  CaseVerdict verdict;
};

// Simulated end-to-end run: plan against a fresh SimPlatform, then
// evaluate_plan. Throws Error when the platform config is invalid for the
// plan's duration.
AuditRun execute_audit(const AuditPlan& plan, const PlatformConfig& config, std::uint64_t seed,
                       std::ostream* stream = nullptr);

}  // namespace dsaudit

#endif  // DSAUDIT_PIPELINE_HPP_
