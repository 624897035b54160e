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

// Detection power of the harness itself. Every grid cell is run
// `runs_per_cell` times against a platform that violates the audited
// provision and one that complies; power is the non_compliant rate on the
// former, the false-positive rate the non_compliant rate on the latter. Run r
// of every cell uses the same derived seed on both platforms, so cells are
// compared on common random numbers.
//
// Grid files (.grid) use the plan syntax:
//
//   w_match = 0, 1, 2, 3        # profiling_weight, applied to both platforms
//   cohort_size = 30            # every cohort; default: the plan's sizes
//   duration_days = 20          # default: the plan's duration
//   violating = ../presets/sensitive_targeting.platform
//   compliant = ../presets/compliant.platform

#ifndef DSAUDIT_POWER_HPP_
#define DSAUDIT_POWER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsaudit/platform_config.hpp"
#include "dsaudit/scenario.hpp"

namespace dsaudit {

struct SweepGrid {
  std::vector<double> w_match;
  std::vector<int> cohort_size;    // empty: keep the plan's sizes
  std::vector<int> duration_days;  // empty: keep the plan's duration
  std::string violating_platform;  // path as written in the grid file
  std::string compliant_platform;
};

SweepGrid parse_sweep_grid(std::string_view text);

struct PowerCell {
  double w_match = 0.0;
  int cohort_size = 0;
  int duration_days = 0;
  int runs = 0;
  int violating_flagged = 0;
  int compliant_flagged = 0;
  int violating_inconclusive = 0;
  int compliant_inconclusive = 0;

  double power() const;
  double power_se() const;
  double false_positive_rate() const;
  double false_positive_se() const;
  double discrimination() const { return power() - false_positive_rate(); }
};

struct PowerCurve {
  std::vector<PowerCell> cells;  // grid order: w_match, then cohort_size, then duration
};

// threads = 0 uses the hardware concurrency. Results do not depend on it.
PowerCurve power_sweep(const AuditPlan& plan, const PlatformConfig& violating, const PlatformConfig& compliant,
                       const SweepGrid& grid, int runs_per_cell, std::uint64_t seed, int threads = 0);

std::string power_curve_csv(const PowerCurve& curve);
// Fixed-width text chart of power and false-positive rate per cell.
std::string power_curve_plot(const PowerCurve& curve);

}  // namespace dsaudit

#endif  // DSAUDIT_POWER_HPP_
