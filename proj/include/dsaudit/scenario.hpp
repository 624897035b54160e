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

// Audit plans: parsing, validation, and materialization into synthetic user
// profiles and session schedules. Everything here is a pure function of the
// plan (including its seed).

#ifndef DSAUDIT_SCENARIO_HPP_
#define DSAUDIT_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsaudit/stats.hpp"
#include "json.hpp"

namespace dsaudit {

enum class Gender { female, male, unspecified };
enum class CaseKind { minors_profiling, control_effectiveness, sensitive_targeting };

// verbatim: no significant difference is read as a violation.
// non_inferiority: a violation needs positive evidence that the audited group
// is treated within `margin` of the reference group.
enum class RuleVariant { verbatim, non_inferiority };

std::string_view to_string(Gender g);
std::string_view to_string(CaseKind c);
std::string_view to_string(RuleVariant v);
std::optional<Gender> gender_from_string(std::string_view s);
std::optional<CaseKind> case_from_string(std::string_view s);

bool is_eu_country(std::string_view code);
const std::vector<std::string>& eu_country_codes();

struct AgeRange {
  int low = 18;
  int high = 25;

  bool overlaps(const AgeRange& o) const { return low <= o.high && o.low <= high; }
  bool operator==(const AgeRange&) const = default;
};

struct DecisionRuleConfig {
  TestMethod test_method = TestMethod::permutation;
  double alpha = 0.05;
  Sidedness sidedness = Sidedness::one_sided_lower;
  std::int64_t n_resamples = 10000;
  std::int64_t min_impressions_per_group = 100;
  RuleVariant variant = RuleVariant::verbatim;
  double margin = 0.05;             // non_inferiority only
  double plateau_tolerance = 0.05;  // control_effectiveness: allowed gap to the base rate

  bool operator==(const DecisionRuleConfig&) const = default;
};

struct CohortSpec {
  std::string label;
  int size = 30;
  AgeRange age_range;
  std::vector<Gender> genders;
  std::vector<std::string> locations;
  std::vector<std::string> topic_pool;
  std::optional<std::string> sensitive_interest;
  double engage_probability = 0.8;

  bool operator==(const CohortSpec&) const = default;
};

struct AuditPlan {
  std::string plan_id = "audit";
  std::vector<CohortSpec> cohorts;
  int duration_days = 20;
  int sessions_per_day = 1;
  int session_budget = 40;
  int bootstrap_interactions = 10;
  std::vector<std::string> topics;
  std::uint64_t seed = 0;
  bool seed_specified = false;  // false when the file omitted `seed`
  CaseKind case_selector = CaseKind::minors_profiling;
  DecisionRuleConfig decision_rule;
  int window_days = 0;  // 0 disables windowed analysis

  // Day on which a two-phase plan switches the non-profiling option on.
  // Zero for single-phase plans.
  int toggle_day() const;

  bool operator==(const AuditPlan& o) const;
};

struct UserProfile {
  std::string user_id;
  std::string cohort_label;
  int declared_age = 0;
  Gender gender = Gender::unspecified;
  std::string location;
  std::vector<std::string> interests;
  double engage_probability = 0.8;
  std::optional<std::string> sensitive_interest;

  bool operator==(const UserProfile&) const = default;
};

struct ScheduleEntry {
  int day = 1;
  int session_index = 1;
  int budget = 1;

  bool operator==(const ScheduleEntry&) const = default;
};

struct SessionSchedule {
  std::string user_id;
  std::vector<ScheduleEntry> entries;

  bool operator==(const SessionSchedule&) const = default;
};

struct Finding {
  std::string invariant;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> violations;
  std::vector<Finding> warnings;

  bool ok() const { return violations.empty(); }
};

// Cohort sizes below this draw an "underpowered cohort" warning.
inline constexpr int kUnderpoweredCohortSize = 10;

// Syntax, unknown keys and per-field type/range checks only.
AuditPlan parse_plan_unchecked(std::string_view text);
// parse_plan_unchecked + validate_plan; the first violation is thrown as
// ParseError(constraint) carrying the invariant name.
AuditPlan parse_plan(std::string_view text);
std::string serialize_plan(const AuditPlan& plan);

ValidationReport validate_plan(const AuditPlan& plan);

std::vector<UserProfile> generate_cohorts(const AuditPlan& plan);
std::vector<SessionSchedule> build_schedules(const AuditPlan& plan, std::span<const UserProfile> profiles);

nlohmann::json plan_to_json(const AuditPlan& plan);
nlohmann::json profile_to_json(const UserProfile& profile);
std::string plan_hash(const AuditPlan& plan);
std::string profiles_hash(std::span<const UserProfile> profiles);

}  // namespace dsaudit

#endif  // DSAUDIT_SCENARIO_HPP_
