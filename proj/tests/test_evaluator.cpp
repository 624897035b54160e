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

#include "dsaudit/evaluator.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "doctest.h"
#include "dsaudit/errors.hpp"
#include "dsaudit/executor.hpp"
#include "dsaudit/pipeline.hpp"
#include "support.hpp"

using namespace dsaudit;

namespace {

// Hand-built exposure logs. Every user is interested in "gaming"; matched
// items carry that topic, unmatched ones "beauty".
struct LogBuilder {
  std::vector<UserProfile> profiles;
  ExposureLog log;

  std::size_t user(const std::string& label, int age, std::optional<std::string> sensitive = {}) {
    UserProfile p;
    p.user_id = fmt::format("{}-{}", label, profiles.size());
    p.cohort_label = label;
    p.declared_age = age;
    p.interests = {"gaming"};
    p.sensitive_interest = std::move(sensitive);
    profiles.push_back(p);
    return profiles.size() - 1;
  }

  void add(std::size_t u, int day, SlotKind kind, bool matched, const std::string& item = {},
           std::vector<std::string> tags = {}) {
    Impression r;
    r.seq = log.records.size();
    r.user_id = profiles[u].user_id;
    r.cohort_label = profiles[u].cohort_label;
    r.day = day;
    r.session_index = 1;
    r.slot_index = static_cast<int>(log.records.size()) + 1;
    r.kind = kind;
    r.item_id = item.empty() ? fmt::format("x{}", log.records.size()) : item;
    r.item_topics = {matched ? "gaming" : "beauty"};
    r.sensitive_tags = std::move(tags);
    r.matched_interest = matched;
    r.matched_sensitive = profiles[u].sensitive_interest &&
                          std::find(r.sensitive_tags.begin(), r.sensitive_tags.end(),
                                    *profiles[u].sensitive_interest) != r.sensitive_tags.end();
    log.records.push_back(std::move(r));
  }

  void ads(std::size_t u, int day, int n, int matched) {
    for (int i = 0; i < n; ++i) add(u, day, SlotKind::ad, i < matched);
  }

  const ExposureLog& finish(int duration, int toggle_day = 0, std::uint64_t seed = 1) {
    log.header.profiles_hash = profiles_hash(profiles);
    log.header.duration_days = duration;
    log.header.toggle_day = toggle_day;
    log.header.seed = seed;
    return log;
  }
};

DecisionRuleConfig rule(std::int64_t floor = 50) {
  DecisionRuleConfig r;
  r.min_impressions_per_group = floor;
  r.n_resamples = 5000;
  return r;
}

// Minors with matched-ad counts `minor_hits`, adults with `adult_hits`, out
// of 20 ads per user on each of `days` days.
LogBuilder minors_log(const std::vector<int>& minor_hits, const std::vector<int>& adult_hits, int days = 2) {
  LogBuilder b;
  for (std::size_t i = 0; i < minor_hits.size(); ++i) b.user("minors", 15);
  for (std::size_t i = 0; i < adult_hits.size(); ++i) b.user("adults", 22);
  for (int d = 1; d <= days; ++d) {
    for (std::size_t i = 0; i < minor_hits.size(); ++i) b.ads(i, d, 20, minor_hits[i]);
    for (std::size_t i = 0; i < adult_hits.size(); ++i) b.ads(minor_hits.size() + i, d, 20, adult_hits[i]);
  }
  b.finish(days);
  return b;
}

// Toggle-case user: phase 1 shows 8 matched of 10 items; phase 2 shows
// `phase2_matched` matched of 10. Distinct items: m1-m3 matched, u1-u6 not.
void toggle_user(LogBuilder& b, std::size_t u, int days, int toggle, int phase2_matched) {
  for (int d = 1; d <= days; ++d) {
    const bool phase2 = d >= toggle;
    const int matched = phase2 ? phase2_matched : 8;
    for (int i = 0; i < matched; ++i) b.add(u, d, SlotKind::content, true, fmt::format("m{}", i % 3 + 1));
    for (int i = 0; i < 10 - matched; ++i)
      b.add(u, d, SlotKind::content, false, fmt::format("u{}", phase2 ? i % 6 + 1 : 5 + i % 2));
    b.ads(u, d, 2, 1);
  }
}

LogBuilder toggle_log(const std::vector<int>& phase2_matched, int days = 4, int toggle = 3) {
  LogBuilder b;
  for (std::size_t i = 0; i < phase2_matched.size(); ++i) {
    b.user("users", 20);
    toggle_user(b, i, days, toggle, phase2_matched[i]);
  }
  b.finish(days, toggle);
  return b;
}

LogBuilder sensitive_log(int control_tagged, int sensitive_tagged, int users = 10) {
  LogBuilder b;
  for (int i = 0; i < users; ++i) b.user("control", 22);
  for (int i = 0; i < users; ++i) b.user("health", 22, "health");
  for (int u = 0; u < 2 * users; ++u) {
    const int tagged = u < users ? control_tagged : sensitive_tagged + (u % 3) - 1;
    for (int i = 0; i < 20; ++i)
      b.add(static_cast<std::size_t>(u), 1, SlotKind::ad, false, {},
            i < tagged ? std::vector<std::string>{"health"} : std::vector<std::string>{});
  }
  b.finish(1);
  return b;
}

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("per-user rate is matched over ad impressions") {
  LogBuilder b;
  b.user("adults", 30);
  b.ads(0, 1, 10, 4);
  b.finish(1);
  const auto g = personalization_rate(b.log, b.profiles);
  REQUIRE(g.size() == 1);
  REQUIRE(g[0].per_user_rates.size() == 1);
  CHECK(g[0].per_user_rates[0] == 0.4);
}

TEST_CASE("hand-counted aggregates over three users") {
  LogBuilder b;
  b.user("a", 15);
  b.user("a", 16);
  b.user("b", 30);
  b.ads(0, 1, 5, 2);
  b.ads(1, 1, 4, 4);
  b.ads(2, 2, 6, 3);
  b.add(0, 1, SlotKind::content, true);
  b.add(0, 2, SlotKind::content, false);
  b.add(2, 1, SlotKind::content, true);
  b.finish(2);
  const auto g = personalization_rate(b.log, b.profiles);
  REQUIRE(g.size() == 2);
  CHECK(g[0].cohort_label == "a");
  CHECK(g[0].n_users == 2);
  CHECK(g[0].n_ad_impressions == 9);
  CHECK(g[0].n_matched_ad_impressions == 6);
  CHECK(g[0].per_user_rates == std::vector<double>{0.4, 1.0});
  CHECK(g[0].n_content_impressions == 2);
  CHECK(g[0].content_matched_rate == 0.5);
  CHECK(g[1].n_ad_impressions == 6);
  CHECK(g[1].per_user_rates == std::vector<double>{0.5});
  CHECK(g[1].content_matched_rate == 1.0);
}

TEST_CASE("users without ads are left out of per-user rates") {
  LogBuilder b;
  b.user("a", 20);
  b.user("a", 20);
  b.add(0, 1, SlotKind::content, true);
  b.ads(1, 1, 3, 1);
  b.finish(1);
  const auto g = personalization_rate(b.log, b.profiles);
  CHECK(g[0].n_users == 2);
  CHECK(g[0].per_user_rates.size() == 1);
}

TEST_CASE("a log without ads is inconclusive") {
  LogBuilder b;
  b.user("minors", 15);
  b.user("adults", 20);
  b.add(0, 1, SlotKind::content, true);
  b.add(1, 1, SlotKind::content, true);
  b.finish(1);
  const auto v = evaluate_minors_case(b.log, b.profiles, rule());
  CHECK(v.verdict == Verdict::inconclusive);
  CHECK(v.group_stats[0].n_ad_impressions == 0);
}

TEST_CASE("input checks") {
  auto b = minors_log({2, 2}, {8, 8});
  auto profiles = b.profiles;
  profiles[0].declared_age = 16;
  CHECK_THROWS_AS(evaluate_minors_case(b.log, profiles, rule()), HashMismatch);
  ExposureLog empty = b.log;
  empty.records.clear();
  CHECK_THROWS_AS(evaluate_minors_case(empty, b.profiles, rule()), EvaluationError);

  LogBuilder mixed;
  mixed.user("users", 15);
  mixed.user("users", 30);
  mixed.ads(0, 1, 5, 1);
  mixed.finish(1);
  CHECK_THROWS_AS(evaluate_minors_case(mixed.log, mixed.profiles, rule(1)), EvaluationError);
}

TEST_CASE("minors with base-rate ads vs profiled adults is compliant") {
  const auto b = minors_log(std::vector<int>(10, 0), {12, 14, 15, 13, 16, 12, 14, 15, 13, 16});
  const auto v = evaluate_minors_case(b.log, b.profiles, rule());
  CHECK(v.verdict == Verdict::compliant);
  CHECK(v.test.p_value < 0.001);
  CHECK(v.test.effect_size < 0.0);
  REQUIRE(v.metric_checks.size() == 2);
  CHECK(v.metric_checks[0].metric == "per_user_rate");
  CHECK(v.metric_checks[1].metric == "impression_proportion");
  CHECK(v.metric_checks[1].test.method == TestMethod::two_proportion);
  CHECK_FALSE(v.metric_disagreement);
  CHECK(v.rule_applied.find("not significant -> non_compliant") != std::string::npos);
}

TEST_CASE("indistinguishable rates are non_compliant") {
  const std::vector<int> hits{12, 14, 15, 13, 16, 12, 14, 15, 13, 16};
  const auto b = minors_log(hits, hits);
  const auto v = evaluate_minors_case(b.log, b.profiles, rule());
  CHECK(v.verdict == Verdict::non_compliant);
  CHECK(v.test.p_value > 0.4);
}

TEST_CASE("below the impression floor is inconclusive regardless of p") {
  const auto b = minors_log(std::vector<int>(10, 0), std::vector<int>(10, 15));
  CHECK(evaluate_minors_case(b.log, b.profiles, rule(401)).verdict == Verdict::inconclusive);
  CHECK(evaluate_minors_case(b.log, b.profiles, rule(400)).verdict == Verdict::compliant);
}

TEST_CASE("two-sided rule does not reward minors seeing more profiled ads") {
  const auto b = minors_log(std::vector<int>(10, 18), {2, 3, 4, 2, 3, 4, 2, 3, 4, 2});
  auto r = rule();
  r.sidedness = Sidedness::two_sided;
  const auto v = evaluate_minors_case(b.log, b.profiles, r);
  CHECK(v.test.p_value < 0.001);
  CHECK(v.verdict == Verdict::non_compliant);
}

TEST_CASE("non-inferiority variant needs evidence for a violation") {
  const std::vector<int> hits{12, 14, 15, 13, 16, 12, 14, 15, 13, 16};
  const auto b = minors_log(hits, hits);
  auto r = rule();
  r.variant = RuleVariant::non_inferiority;
  r.margin = 0.1;
  CHECK(evaluate_minors_case(b.log, b.profiles, r).verdict == Verdict::non_compliant);
  r.margin = 0.0;
  CHECK(evaluate_minors_case(b.log, b.profiles, r).verdict == Verdict::inconclusive);
}

TEST_CASE("verdict is invariant to cohort labels and order") {
  const std::vector<int> m{5, 6, 7, 9, 8, 6, 5, 7}, a{7, 8, 9, 6, 10, 8, 9, 7};
  const auto b = minors_log(m, a);
  const auto v = evaluate_minors_case(b.log, b.profiles, rule());

  LogBuilder renamed = b;
  for (auto& p : renamed.profiles) p.cohort_label = p.cohort_label == "minors" ? "teens" : "grownups";
  for (auto& r : renamed.log.records) r.cohort_label = r.cohort_label == "minors" ? "teens" : "grownups";
  renamed.finish(2);
  const auto w = evaluate_minors_case(renamed.log, renamed.profiles, rule());
  CHECK(w.verdict == v.verdict);
  CHECK(w.test == v.test);

  LogBuilder swapped = b;
  std::rotate(swapped.profiles.begin(), swapped.profiles.begin() + static_cast<long>(m.size()), swapped.profiles.end());
  swapped.finish(2);
  const auto s = evaluate_minors_case(swapped.log, swapped.profiles, rule());
  CHECK(s.verdict == v.verdict);
  CHECK(s.test.p_value == v.test.p_value);
  CHECK(s.group_stats[0].cohort_label == "minors");
}

TEST_CASE("per-user test is invariant to scaling every user's impressions") {
  const std::vector<int> m{5, 6, 7, 9, 8, 6, 5, 7}, a{7, 8, 9, 6, 10, 8, 9, 7};
  const auto once = minors_log(m, a, 2);
  const auto twice = minors_log(m, a, 4);
  auto r = rule();
  LogBuilder t = twice;
  t.finish(2);
  for (auto& rec : t.log.records) rec.day = (rec.day + 1) / 2;
  const auto v1 = evaluate_minors_case(once.log, once.profiles, r);
  const auto v2 = evaluate_minors_case(t.log, t.profiles, r);
  CHECK(v2.metric_checks[0].test == v1.metric_checks[0].test);
  CHECK(v2.group_stats[0].n_ad_impressions == 2 * v1.group_stats[0].n_ad_impressions);
  CHECK(v2.metric_checks[1].test.p_value < v1.metric_checks[1].test.p_value);
}

TEST_CASE("the configured method selects the primary test") {
  const auto b = minors_log(std::vector<int>(10, 0), std::vector<int>(10, 15));
  auto r = rule();
  r.test_method = TestMethod::two_proportion;
  const auto v = evaluate_minors_case(b.log, b.profiles, r);
  CHECK(v.test.method == TestMethod::two_proportion);
  CHECK(v.test == v.metric_checks[1].test);
  r.test_method = TestMethod::exact_permutation;
  const auto small = minors_log({0, 1, 0}, {9, 10, 12});
  const auto e = evaluate_minors_case(small.log, small.profiles, r);
  CHECK(e.test.method == TestMethod::exact_permutation);
  CHECK(e.test.p_value == doctest::Approx(0.05));
}

TEST_CASE("toggle case: return to the base rate is compliant") {
  const auto b = toggle_log(std::vector<int>(10, 3));
  const auto v = evaluate_toggle_case(b.log, b.profiles, rule());
  CHECK(v.verdict == Verdict::compliant);
  CHECK(v.annotation.empty());
  REQUIRE(v.plateau_test.has_value());
  CHECK(v.plateau_test->p_value > 0.5);
  REQUIRE(v.group_stats.size() == 2);
  CHECK(v.group_stats[0].cohort_label == "phase_1");
  CHECK(v.group_stats[0].content_matched_rate == doctest::Approx(0.8));
  CHECK(v.group_stats[1].content_matched_rate == doctest::Approx(0.3));
}

TEST_CASE("toggle case: a decrease that plateaus above the base rate is a partial effect") {
  const auto b = toggle_log(std::vector<int>(10, 6));
  const auto v = evaluate_toggle_case(b.log, b.profiles, rule());
  CHECK(v.verdict == Verdict::non_compliant);
  CHECK(v.annotation == "partial effect");
  CHECK(v.test.p_value < 0.05);
  CHECK(v.plateau_test->p_value < 0.05);
}

TEST_CASE("toggle case: no decrease is non_compliant") {
  const auto b = toggle_log(std::vector<int>(10, 8));
  const auto v = evaluate_toggle_case(b.log, b.profiles, rule());
  CHECK(v.verdict == Verdict::non_compliant);
  CHECK(v.annotation.empty());
}

TEST_CASE("toggle case needs a phase marker and the floor") {
  auto b = toggle_log(std::vector<int>(10, 3));
  CHECK(evaluate_toggle_case(b.log, b.profiles, rule(201)).verdict == Verdict::inconclusive);
  b.finish(4, 0);
  CHECK_THROWS_AS(evaluate_toggle_case(b.log, b.profiles, rule()), EvaluationError);
}

TEST_CASE("sensitive case: elevated tagged share is non_compliant") {
  const auto b = sensitive_log(2, 10);
  const auto v = evaluate_sensitive_case(b.log, b.profiles, rule(20));
  CHECK(v.verdict == Verdict::non_compliant);
  CHECK(v.group_stats[0].cohort_label == "control");
  CHECK(v.group_stats[1].cohort_label == "health");
  CHECK(v.group_stats[0].n_sensitive_ad_impressions == 20);
  CHECK(v.test.effect_size < 0.0);
}

TEST_CASE("sensitive case: equal tagged share is compliant") {
  const auto b = sensitive_log(4, 4);
  CHECK(evaluate_sensitive_case(b.log, b.profiles, rule(20)).verdict == Verdict::compliant);
}

TEST_CASE("sensitive case: no tagged ads is inconclusive") {
  const auto b = sensitive_log(0, 1);
  CHECK(evaluate_sensitive_case(b.log, b.profiles, rule(20)).verdict == Verdict::inconclusive);
}

TEST_CASE("windows partition the run") {
  const AuditPlan plan = testing::load_plan("scenarios/minors_profiling.plan");
  const auto run = execute_audit(plan, testing::load_preset("compliant"), 3);
  const auto ws = windowed_analysis(run.log, run.profiles, 6, CaseKind::minors_profiling, plan.decision_rule);
  REQUIRE(ws.size() == 4);
  CHECK(ws[0].days == DayRange{1, 6});
  CHECK(ws[3].days == DayRange{19, 20});
  std::int64_t ads = 0;
  for (const auto& w : ws) {
    CHECK(w.evaluated);
    ads += w.group_stats[0].n_ad_impressions;
  }
  CHECK(ads == run.verdict.group_stats[0].n_ad_impressions);
  CHECK_THROWS_AS(windowed_analysis(run.log, run.profiles, 21, CaseKind::minors_profiling, plan.decision_rule),
                  EvaluationError);
}

TEST_CASE("a window as long as the run equals the global test") {
  const AuditPlan plan = testing::load_plan("scenarios/minors_profiling.plan");
  const auto run = execute_audit(plan, testing::load_preset("noncompliant_minors"), 4);
  const auto ws = windowed_analysis(run.log, run.profiles, 20, CaseKind::minors_profiling, plan.decision_rule);
  REQUIRE(ws.size() == 1);
  CHECK(ws[0].verdict == run.verdict.verdict);
  CHECK(ws[0].test == run.verdict.test);
  CHECK(ws[0].group_stats == run.verdict.group_stats);
}

TEST_CASE("toggle windows must span both phases") {
  const auto b = toggle_log(std::vector<int>(10, 3), 8, 4);
  const auto ws = windowed_analysis(b.log, b.profiles, 2, CaseKind::control_effectiveness, rule(10));
  REQUIRE(ws.size() == 4);
  CHECK_FALSE(ws[0].evaluated);
  CHECK(ws[1].evaluated);
  CHECK(ws[1].days == DayRange{3, 4});
  CHECK_FALSE(ws[2].evaluated);
}

TEST_CASE("drift at day 10 flips the windowed verdicts") {
  AuditPlan plan = testing::load_plan("scenarios/minors_drift.plan");
  const auto run = execute_audit(plan, testing::load_preset("drift_day10"), 2);
  REQUIRE(run.verdict.windows.has_value());
  const auto& ws = *run.verdict.windows;
  REQUIRE(ws.size() == 4);
  CHECK(ws[0].verdict == Verdict::compliant);
  CHECK(ws[2].verdict == Verdict::non_compliant);
  // The first window's minors see base-rate ads; the third window's do not.
  const auto rate = [](const WindowResult& w) {
    return static_cast<double>(w.group_stats[0].n_matched_ad_impressions) / w.group_stats[0].n_ad_impressions;
  };
  CHECK(rate(ws[2]) > rate(ws[0]) + 0.1);
}

TEST_CASE("verdict strings round-trip") {
  for (auto v : {Verdict::compliant, Verdict::non_compliant, Verdict::inconclusive})
    CHECK(verdict_from_string(to_string(v)) == v);
  CHECK_FALSE(verdict_from_string("maybe").has_value());
}

}  // TEST_SUITE
