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

// Case evaluators. Each turns an exposure log into a verdict:
//
//   minors_profiling       per-user matched-ad rate, minors vs adults.
//                          Significantly lower for minors -> compliant,
//                          otherwise non_compliant.
//   control_effectiveness  per-user matched-content rate, paired phase 2 vs
//                          phase 1. Significant decrease that reaches the
//                          user's base match rate (within plateau_tolerance)
//                          -> compliant; decrease that plateaus above it ->
//                          non_compliant "partial effect"; no decrease ->
//                          non_compliant.
//   sensitive_targeting    per-user share of ads tagged with the sensitive
//                          cohort's category, control vs sensitive cohort.
//                          Significantly higher for the sensitive cohort ->
//                          non_compliant, otherwise compliant.
//
// Any group under min_impressions_per_group gives inconclusive. The
// non_inferiority variant (minors and toggle cases) replaces "not significant
// -> non_compliant" with a margin test and reports inconclusive when neither
// test is significant.

#ifndef DSAUDIT_EVALUATOR_HPP_
#define DSAUDIT_EVALUATOR_HPP_

#include <climits>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsaudit/explog.hpp"
#include "dsaudit/scenario.hpp"
#include "dsaudit/stats.hpp"

namespace dsaudit {

enum class Verdict { compliant, non_compliant, inconclusive };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct GroupStats {
  std::string cohort_label;
  int n_users = 0;
  std::int64_t n_ad_impressions = 0;
  std::int64_t n_matched_ad_impressions = 0;
  // Ads tagged with the audited sensitive category; sensitive case only.
  std::int64_t n_sensitive_ad_impressions = 0;
  std::int64_t n_content_impressions = 0;
  std::int64_t n_matched_content_impressions = 0;
  std::vector<double> per_user_rates;  // users with at least one ad impression
  double content_matched_rate = 0.0;

  bool operator==(const GroupStats&) const = default;
};

// One verdict per metric, for metric-dependency reporting.
struct MetricCheck {
  std::string metric;  // "per_user_rate" or "impression_proportion"
  TestResult test;
  Verdict verdict = Verdict::inconclusive;

  bool operator==(const MetricCheck&) const = default;
};

struct DayRange {
  int first = 1;
  int last = INT_MAX;

  bool contains(int day) const { return first <= day && day <= last; }
  bool operator==(const DayRange&) const = default;
};

struct WindowResult {
  DayRange days;
  bool evaluated = false;
  Verdict verdict = Verdict::inconclusive;
  std::string annotation;
  TestResult test;
  std::vector<GroupStats> group_stats;

  bool operator==(const WindowResult&) const = default;
};

struct CaseVerdict {
  CaseKind case_kind = CaseKind::minors_profiling;
  Verdict verdict = Verdict::inconclusive;
  std::string annotation;  // e.g. "partial effect"
  TestResult test;         // the configured test
  std::optional<TestResult> plateau_test;  // control_effectiveness only
  std::vector<GroupStats> group_stats;
  std::vector<MetricCheck> metric_checks;
  bool metric_disagreement = false;
  std::optional<std::vector<WindowResult>> windows;
  std::string rule_applied;

  bool operator==(const CaseVerdict&) const = default;
};

// Per-cohort statistics over the whole log, in profile cohort order. Throws
// HashMismatch when the profiles do not match the log header and
// EvaluationError on an empty log.
std::vector<GroupStats> personalization_rate(const ExposureLog& log, std::span<const UserProfile> profiles);

CaseVerdict evaluate_minors_case(const ExposureLog& log, std::span<const UserProfile> profiles,
                                 const DecisionRuleConfig& rule, DayRange days = {});
CaseVerdict evaluate_toggle_case(const ExposureLog& log, std::span<const UserProfile> profiles,
                                 const DecisionRuleConfig& rule, DayRange days = {});
CaseVerdict evaluate_sensitive_case(const ExposureLog& log, std::span<const UserProfile> profiles,
                                    const DecisionRuleConfig& rule, DayRange days = {});

CaseVerdict evaluate_case(const ExposureLog& log, std::span<const UserProfile> profiles, CaseKind kind,
                          const DecisionRuleConfig& rule, DayRange days = {});

// Non-overlapping windows [1, w], [w + 1, 2w], ...; the last one may be
// shorter. Toggle-case windows that do not span both phases are returned
// with evaluated = false.
std::vector<WindowResult> windowed_analysis(const ExposureLog& log, std::span<const UserProfile> profiles,
                                            int window_days, CaseKind kind, const DecisionRuleConfig& rule);

// Global verdict plus windows when plan.window_days > 0.
CaseVerdict evaluate_plan(const ExposureLog& log, std::span<const UserProfile> profiles, const AuditPlan& plan);

}  // namespace dsaudit

#endif  // DSAUDIT_EVALUATOR_HPP_
