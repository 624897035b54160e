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

#include "dsaudit/scenario.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "doctest.h"
#include "dsaudit/errors.hpp"
#include "support.hpp"

using namespace dsaudit;
using dsaudit::testing::load_plan;

namespace {

const char* kBase =
    "plan_id = t\n"
    "case = minors_profiling\n"
    "duration_days = 20\n"
    "topics = beauty, gaming, fitness\n"
    "[cohort]\nlabel = minors\nsize = 30\nage_range = 14-17\n"
    "[cohort]\nlabel = adults\nsize = 30\nage_range = 18-25\n";

bool has_finding(const std::vector<Finding>& fs, const std::string& invariant) {
  return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) { return f.invariant == invariant; });
}

AuditPlan single_cohort(int size, std::vector<std::string> topics) {
  AuditPlan plan;
  plan.case_selector = CaseKind::control_effectiveness;
  plan.topics = topics;
  CohortSpec c;
  c.label = "users";
  c.size = size;
  c.topic_pool = std::move(topics);
  c.genders = {Gender::female};
  c.locations = {"DE"};
  plan.cohorts.push_back(c);
  return plan;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("shipped minors plan has the reference parameters") {
  const AuditPlan plan = load_plan("scenarios/minors_profiling.plan");
  CHECK(plan.case_selector == CaseKind::minors_profiling);
  REQUIRE(plan.cohorts.size() == 2);
  CHECK(plan.cohorts[0].age_range == AgeRange{14, 17});
  CHECK(plan.cohorts[1].age_range == AgeRange{18, 25});
  CHECK(plan.cohorts[0].size == 30);
  CHECK(plan.cohorts[1].size == 30);
  CHECK(plan.topics == std::vector<std::string>{"beauty", "gaming", "fitness"});
  CHECK(plan.duration_days == 20);
  CHECK(plan.sessions_per_day == 1);
  CHECK(plan.session_budget == 40);
  CHECK(validate_plan(plan).ok());
  CHECK(validate_plan(plan).warnings.empty());
}

TEST_CASE("every shipped plan validates") {
  for (const char* name : {"minors_profiling", "control_effectiveness", "sensitive_targeting", "minors_drift",
                           "metric_dependency"}) {
    CAPTURE(name);
    const AuditPlan plan = load_plan(std::string("scenarios/") + name + ".plan");
    CHECK(validate_plan(plan).ok());
  }
}

TEST_CASE("omitted keys take documented defaults") {
  const AuditPlan plan = parse_plan(kBase);
  CHECK(plan.decision_rule.alpha == 0.05);
  CHECK(plan.decision_rule.test_method == TestMethod::permutation);
  CHECK(plan.decision_rule.sidedness == Sidedness::one_sided_lower);
  CHECK(plan.decision_rule.n_resamples == 10000);
  CHECK(plan.decision_rule.variant == RuleVariant::verbatim);
  CHECK(plan.sessions_per_day == 1);
  CHECK(plan.window_days == 0);
  CHECK_FALSE(plan.seed_specified);
  CHECK(plan.cohorts[0].locations == eu_country_codes());
  CHECK(plan.cohorts[0].topic_pool == plan.topics);
}

TEST_CASE("empty cohort list is a constraint violation") {
  try {
    parse_plan("plan_id = x\ntopics = a\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::constraint);
    CHECK(e.invariant() == "cohorts_non_empty");
  }
}

TEST_CASE("unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(parse_plan(std::string(kBase) + "colour = red\n"), ParseError);
  try {
    parse_plan(std::string("alpah = 0.1\n") + kBase);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::unknown_key);
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(parse_plan(std::string("duration_days = soon\n") + "topics = a\n[cohort]\n"), ParseError);
  CHECK_THROWS_AS(parse_plan("[group]\nlabel = x\n"), ParseError);
}

TEST_CASE("overlapping age ranges violate the minors case") {
  std::string text = kBase;
  text.replace(text.find("18-25"), 5, "16-25");
  const auto rep = validate_plan(parse_plan_unchecked(text));
  REQUIRE_FALSE(rep.ok());
  CHECK(has_finding(rep.violations, "cohort_age_ranges_overlap"));
  CHECK(rep.violations.front().message == "cohort age ranges overlap");
}

TEST_CASE("small cohorts draw an underpowered warning") {
  std::string text = kBase;
  text.replace(text.find("size = 30"), 9, "size = 3");
  const auto rep = validate_plan(parse_plan_unchecked(text));
  CHECK(rep.ok());
  CHECK(has_finding(rep.warnings, "underpowered_cohort"));
  const auto it = std::find_if(rep.warnings.begin(), rep.warnings.end(),
                               [](const Finding& f) { return f.invariant == "underpowered_cohort"; });
  CHECK(it->message.find("underpowered cohort") != std::string::npos);
}

TEST_CASE("unreachable impression floor draws a warning") {
  std::string text = std::string("decision_rule.min_impressions_per_group = 1000000\n") + kBase;
  CHECK(has_finding(validate_plan(parse_plan_unchecked(text)).warnings, "impression_floor_unreachable"));
}

TEST_CASE("case-specific invariants") {
  AuditPlan plan = parse_plan(kBase);
  plan.cohorts[0].age_range = {18, 20};
  plan.cohorts[1].age_range = {21, 30};
  CHECK(has_finding(validate_plan(plan).violations, "minors_cohort_identification"));

  plan = parse_plan(kBase);
  plan.case_selector = CaseKind::sensitive_targeting;
  CHECK(has_finding(validate_plan(plan).violations, "sensitive_cohort_annotation"));
  plan.cohorts[1].sensitive_interest = "health";
  CHECK(validate_plan(plan).ok());

  plan = parse_plan(kBase);
  plan.case_selector = CaseKind::control_effectiveness;
  plan.duration_days = 1;
  CHECK(has_finding(validate_plan(plan).violations, "toggle_requires_two_days"));

  plan = parse_plan(kBase);
  plan.decision_rule.test_method = TestMethod::exact_permutation;
  CHECK(has_finding(validate_plan(plan).violations, "exact_enumeration_bound"));

  plan = parse_plan(kBase);
  plan.cohorts[0].locations = {"US"};
  CHECK(has_finding(validate_plan(plan).violations, "locations_eu"));

  plan = parse_plan(kBase);
  plan.cohorts[0].topic_pool = {"cooking"};
  CHECK(has_finding(validate_plan(plan).violations, "cohort_topics_subset"));

  plan = parse_plan(kBase);
  plan.decision_rule.n_resamples = 10;
  CHECK(has_finding(validate_plan(plan).violations, "n_resamples_minimum"));
}

TEST_CASE("serialize_plan round-trips") {
  for (const char* name : {"minors_profiling", "control_effectiveness", "sensitive_targeting", "minors_drift"}) {
    CAPTURE(name);
    const AuditPlan plan = load_plan(std::string("scenarios/") + name + ".plan");
    const AuditPlan again = parse_plan(serialize_plan(plan));
    CHECK(again == plan);
    CHECK(plan_hash(again) == plan_hash(plan));
  }
}

TEST_CASE("generate_cohorts balances topics, genders and locations") {
  const AuditPlan plan = load_plan("scenarios/minors_profiling.plan");
  const auto profiles = generate_cohorts(plan);
  REQUIRE(profiles.size() == 60);
  std::map<std::string, std::map<std::string, int>> topics;
  std::map<std::string, std::map<Gender, int>> genders;
  std::set<std::string> ids;
  for (const auto& p : profiles) {
    ++topics[p.cohort_label][p.interests.at(0)];
    ++genders[p.cohort_label][p.gender];
    ids.insert(p.user_id);
    const auto& range = p.cohort_label == "minors" ? AgeRange{14, 17} : AgeRange{18, 25};
    CHECK(p.declared_age >= range.low);
    CHECK(p.declared_age <= range.high);
  }
  CHECK(ids.size() == profiles.size());
  for (const auto& [label, counts] : topics)
    for (const auto& [topic, n] : counts) CHECK(n == 10);
  for (const auto& [label, counts] : genders)
    for (const auto& [g, n] : counts) CHECK(n == 15);
  CHECK(generate_cohorts(plan) == profiles);
}

TEST_CASE("locations spread within one across values") {
  const AuditPlan plan = load_plan("scenarios/minors_profiling.plan");
  std::map<std::string, int> counts;
  for (const auto& p : generate_cohorts(plan))
    if (p.cohort_label == "adults") ++counts[p.location];
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(hi->second - lo->second <= 1);
}

TEST_CASE("single-valued cohort differs only in id and age") {
  const auto profiles = generate_cohorts(single_cohort(12, {"gaming"}));
  REQUIRE(profiles.size() == 12);
  for (const auto& p : profiles) {
    CHECK(p.interests == profiles[0].interests);
    CHECK(p.gender == profiles[0].gender);
    CHECK(p.location == profiles[0].location);
  }
}

TEST_CASE("9999 profiles over 3 topics split evenly") {
  std::map<std::string, int> counts;
  for (const auto& p : generate_cohorts(single_cohort(9999, {"beauty", "gaming", "fitness"})))
    ++counts[p.interests.at(0)];
  CHECK(counts == std::map<std::string, int>{{"beauty", 3333}, {"fitness", 3333}, {"gaming", 3333}});
}

TEST_CASE("seed changes the materialization") {
  AuditPlan a = load_plan("scenarios/minors_profiling.plan");
  AuditPlan b = a;
  b.seed = a.seed + 1;
  CHECK(generate_cohorts(a) != generate_cohorts(b));
}

TEST_CASE("schedules cover every day and session") {
  AuditPlan plan = load_plan("scenarios/minors_profiling.plan");
  plan.sessions_per_day = 2;
  const auto profiles = generate_cohorts(plan);
  const auto schedules = build_schedules(plan, profiles);
  REQUIRE(schedules.size() == profiles.size());
  for (const auto& s : schedules) {
    REQUIRE(s.entries.size() == 40);
    CHECK(s.entries.front().day == 1);
    CHECK(s.entries.back().day == 20);
    CHECK(s.entries.back().session_index == 2);
    for (const auto& e : s.entries) {
      CHECK(e.budget >= 20);
      CHECK(e.budget <= 40);
    }
  }
  CHECK(build_schedules(plan, profiles) == schedules);
}

TEST_CASE("budget of one collapses the interval") {
  AuditPlan plan = load_plan("scenarios/minors_profiling.plan");
  plan.session_budget = 1;
  for (const auto& s : build_schedules(plan, generate_cohorts(plan)))
    for (const auto& e : s.entries) CHECK(e.budget == 1);
}

TEST_CASE("mean sampled budget is the interval midpoint") {
  AuditPlan plan = single_cohort(100, {"gaming"});
  plan.duration_days = 1000;
  plan.session_budget = 40;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : build_schedules(plan, generate_cohorts(plan)))
    for (const auto& e : s.entries) {
      sum += e.budget;
      ++n;
    }
  REQUIRE(n == 100000);
  CHECK(sum / static_cast<double>(n) == doctest::Approx(30.0).epsilon(0.5 / 30.0));
}

TEST_CASE("two-phase plans toggle at the midpoint") {
  AuditPlan plan = load_plan("scenarios/control_effectiveness.plan");
  REQUIRE(plan.duration_days == 20);
  CHECK(plan.toggle_day() == 11);
  plan.duration_days = 5;
  CHECK(plan.toggle_day() == 4);
  CHECK(load_plan("scenarios/minors_profiling.plan").toggle_day() == 0);
}

}  // TEST_SUITE
