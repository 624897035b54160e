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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_map>

#include "dsaudit/errors.hpp"
#include "dsaudit/rng.hpp"

namespace dsaudit {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::compliant: return "compliant";
    case Verdict::non_compliant: return "non_compliant";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::compliant, Verdict::non_compliant, Verdict::inconclusive})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

namespace {

struct Tally {
  std::int64_t ads = 0;
  std::int64_t matched_ads = 0;
  std::int64_t tagged_ads = 0;
  std::int64_t content = 0;
  std::int64_t matched_content = 0;
};

using UserIndex = std::unordered_map<std::string, std::size_t>;

UserIndex check_inputs(const ExposureLog& log, std::span<const UserProfile> profiles) {
  if (log.records.empty()) throw EvaluationError("exposure log has no records");
  const auto ph = profiles_hash(profiles);
  if (ph != log.header.profiles_hash)
    throw HashMismatch(fmt::format("profiles hash {} does not match log header {}", ph, log.header.profiles_hash));
  UserIndex idx;
  for (std::size_t i = 0; i < profiles.size(); ++i) idx.emplace(profiles[i].user_id, i);
  return idx;
}

// `category`, when non-empty, counts ads carrying that sensitive tag.
std::vector<Tally> tally(const ExposureLog& log, const UserIndex& idx, std::size_t n_users, DayRange days,
                         const std::string& category = {}) {
  std::vector<Tally> out(n_users);
  for (const auto& r : log.records) {
    if (!days.contains(r.day)) continue;
    auto it = idx.find(r.user_id);
    if (it == idx.end()) throw EvaluationError(fmt::format("log record for unknown user '{}'", r.user_id));
    Tally& t = out[it->second];
    if (r.kind == SlotKind::ad) {
      ++t.ads;
      if (r.matched_interest) ++t.matched_ads;
      if (!category.empty() &&
          std::find(r.sensitive_tags.begin(), r.sensitive_tags.end(), category) != r.sensitive_tags.end())
        ++t.tagged_ads;
    } else {
      ++t.content;
      if (r.matched_interest) ++t.matched_content;
    }
  }
  return out;
}

std::vector<std::string> cohort_order(std::span<const UserProfile> profiles) {
  std::vector<std::string> labels;
  for (const auto& p : profiles)
    if (std::find(labels.begin(), labels.end(), p.cohort_label) == labels.end()) labels.push_back(p.cohort_label);
  return labels;
}

GroupStats make_group(const std::string& label, std::span<const UserProfile> profiles,
                      const std::vector<Tally>& tallies) {
  GroupStats g;
  g.cohort_label = label;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].cohort_label != label) continue;
    const Tally& t = tallies[i];
    ++g.n_users;
    g.n_ad_impressions += t.ads;
    g.n_matched_ad_impressions += t.matched_ads;
    g.n_sensitive_ad_impressions += t.tagged_ads;
    g.n_content_impressions += t.content;
    g.n_matched_content_impressions += t.matched_content;
    if (t.ads > 0) g.per_user_rates.push_back(static_cast<double>(t.matched_ads) / static_cast<double>(t.ads));
  }
  if (g.n_content_impressions > 0)
    g.content_matched_rate =
        static_cast<double>(g.n_matched_content_impressions) / static_cast<double>(g.n_content_impressions);
  return g;
}

// Per-user ratio num/den for users of `label` with den > 0.
template <typename Num, typename Den>
std::vector<double> user_rates(const std::string& label, std::span<const UserProfile> profiles,
                               const std::vector<Tally>& tallies, Num num, Den den) {
  std::vector<double> out;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].cohort_label != label) continue;
    const auto d = den(tallies[i]);
    if (d > 0) out.push_back(static_cast<double>(num(tallies[i])) / static_cast<double>(d));
  }
  return out;
}

std::uint64_t test_seed(const ExposureLog& log, std::string_view tag, DayRange days) {
  return derive_seed(log.header.seed, "evaluate", tag, static_cast<std::uint64_t>(days.first),
                     static_cast<std::uint64_t>(std::min(days.last, log.header.duration_days)));
}

TestResult per_user_two_sample(std::span<const double> xs, std::span<const double> ys,
                               const DecisionRuleConfig& rule, std::uint64_t seed, Sidedness side) {
  if (rule.test_method == TestMethod::exact_permutation) return exact_permutation_test(xs, ys, side);
  return permutation_test(xs, ys, rule.n_resamples, seed, side);
}

TestResult paired(std::span<const double> diffs, const DecisionRuleConfig& rule, std::uint64_t seed,
                  Sidedness side) {
  if (rule.test_method == TestMethod::exact_permutation) return exact_sign_flip_test(diffs, side);
  return sign_flip_test(diffs, rule.n_resamples, seed, side);
}

// H1 "first sample lower" at the configured sidedness.
bool significant_lower(const TestResult& t, double alpha) {
  if (t.p_value >= alpha) return false;
  return t.sidedness != Sidedness::two_sided || t.effect_size < 0.0;
}

std::string floor_text(const DecisionRuleConfig& rule, std::string_view unit) {
  return fmt::format("any group below {} {} -> inconclusive", rule.min_impressions_per_group, unit);
}

std::string method_text(const DecisionRuleConfig& rule) {
  switch (rule.test_method) {
    case TestMethod::permutation:
      return fmt::format("{} permutation test ({} resamples)", to_string(rule.sidedness), rule.n_resamples);
    case TestMethod::exact_permutation:
      return fmt::format("{} exact permutation test", to_string(rule.sidedness));
    case TestMethod::two_proportion:
      return fmt::format("{} pooled two-proportion z-test", to_string(rule.sidedness));
  }
  return {};
}

void set_disagreement(CaseVerdict& v) {
  v.metric_disagreement = false;
  if (v.metric_checks.size() < 2) return;
  const auto a = v.metric_checks[0].verdict;
  const auto b = v.metric_checks[1].verdict;
  v.metric_disagreement = a != b && a != Verdict::inconclusive && b != Verdict::inconclusive;
}

// Two cohorts picked out by a predicate; throws when the split is not 1 + 1.
std::pair<std::string, std::string> split_cohorts(std::span<const UserProfile> profiles,
                                                  const std::function<bool(const UserProfile&)>& is_first,
                                                  std::string_view what) {
  const auto labels = cohort_order(profiles);
  if (labels.size() != 2)
    throw EvaluationError(fmt::format("{}: expected exactly two cohorts, got {}", what, labels.size()));
  std::vector<std::string> first, second;
  for (const auto& label : labels) {
    bool all = true, none = true;
    for (const auto& p : profiles) {
      if (p.cohort_label != label) continue;
      (is_first(p) ? none : all) = false;
    }
    if (all) first.push_back(label);
    else if (none) second.push_back(label);
    else throw EvaluationError(fmt::format("{}: cohort '{}' is mixed", what, label));
  }
  if (first.size() != 1 || second.size() != 1)
    throw EvaluationError(fmt::format("{}: could not identify the two cohorts", what));
  return {first[0], second[0]};
}

}  // namespace

std::vector<GroupStats> personalization_rate(const ExposureLog& log, std::span<const UserProfile> profiles) {
  const auto idx = check_inputs(log, profiles);
  const auto t = tally(log, idx, profiles.size(), {});
  std::vector<GroupStats> out;
  for (const auto& label : cohort_order(profiles)) out.push_back(make_group(label, profiles, t));
  return out;
}

CaseVerdict evaluate_minors_case(const ExposureLog& log, std::span<const UserProfile> profiles,
                                 const DecisionRuleConfig& rule, DayRange days) {
  const auto idx = check_inputs(log, profiles);
  const auto [minors, adults] =
      split_cohorts(profiles, [](const UserProfile& p) { return p.declared_age < 18; }, "minors_profiling");
  const auto t = tally(log, idx, profiles.size(), days);

  CaseVerdict v;
  v.case_kind = CaseKind::minors_profiling;
  v.group_stats = {make_group(minors, profiles, t), make_group(adults, profiles, t)};
  const auto& gm = v.group_stats[0];
  const auto& ga = v.group_stats[1];

  const bool ni = rule.variant == RuleVariant::non_inferiority;
  v.rule_applied = fmt::format(
      "minors_profiling: {} on per-user matched-ad rates, H1 minors ('{}') < adults ('{}'), alpha = {}; "
      "significant -> compliant, {}; {}",
      method_text(rule), minors, adults, rule.alpha,
      ni ? fmt::format("minors within margin {} of adults (one_sided_upper) -> non_compliant, "
                       "neither -> inconclusive",
                       rule.margin)
         : std::string("not significant -> non_compliant"),
      floor_text(rule, "ad impressions"));

  const bool floor_ok =
      gm.n_ad_impressions >= rule.min_impressions_per_group && ga.n_ad_impressions >= rule.min_impressions_per_group;

  const auto ad_num = [](const Tally& x) { return x.matched_ads; };
  const auto ad_den = [](const Tally& x) { return x.ads; };
  const auto xs = user_rates(minors, profiles, t, ad_num, ad_den);
  const auto ys = user_rates(adults, profiles, t, ad_num, ad_den);
  const auto seed = test_seed(log, "minors_profiling", days);

  auto decide = [&](const TestResult& lower, const std::function<TestResult()>& margin_test) {
    if (!floor_ok) return Verdict::inconclusive;
    if (significant_lower(lower, rule.alpha)) return Verdict::compliant;
    if (!ni) return Verdict::non_compliant;
    return margin_test().p_value < rule.alpha ? Verdict::non_compliant : Verdict::inconclusive;
  };

  if (xs.empty() || ys.empty()) {
    v.verdict = Verdict::inconclusive;
    v.test.method = rule.test_method;
    v.test.sidedness = rule.sidedness;
    return v;
  }

  const auto per_user = per_user_two_sample(xs, ys, rule, seed, rule.sidedness);
  const auto per_user_margin = [&] {
    std::vector<double> shifted(xs);
    for (auto& x : shifted) x += rule.margin;
    return per_user_two_sample(shifted, ys, rule, derive_seed(seed, "margin"), Sidedness::one_sided_upper);
  };
  const auto prop = two_proportion_test(gm.n_matched_ad_impressions, gm.n_ad_impressions,
                                        ga.n_matched_ad_impressions, ga.n_ad_impressions, rule.sidedness);
  const auto prop_margin = [&] {
    // z-test of p1 - p2 > -margin with an unpooled standard error.
    const double n1 = static_cast<double>(gm.n_ad_impressions), n2 = static_cast<double>(ga.n_ad_impressions);
    const double p1 = gm.n_matched_ad_impressions / n1, p2 = ga.n_matched_ad_impressions / n2;
    const double se = std::sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2);
    TestResult r;
    r.method = TestMethod::two_proportion;
    r.sidedness = Sidedness::one_sided_upper;
    r.effect_size = p1 - p2;
    r.statistic = se > 0 ? (p1 - p2 + rule.margin) / se : 0.0;
    r.p_value = se > 0 ? 1.0 - normal_cdf(r.statistic) : (p1 - p2 + rule.margin > 0 ? 0.0 : 1.0);
    return r;
  };

  v.metric_checks = {{"per_user_rate", per_user, decide(per_user, per_user_margin)},
                     {"impression_proportion", prop, decide(prop, prop_margin)}};
  set_disagreement(v);
  const bool use_prop = rule.test_method == TestMethod::two_proportion;
  v.test = use_prop ? prop : per_user;
  v.verdict = use_prop ? v.metric_checks[1].verdict : v.metric_checks[0].verdict;
  return v;
}

CaseVerdict evaluate_toggle_case(const ExposureLog& log, std::span<const UserProfile> profiles,
                                 const DecisionRuleConfig& rule, DayRange days) {
  const auto idx = check_inputs(log, profiles);
  const int toggle = log.header.toggle_day;
  if (toggle <= 1) throw EvaluationError("log lacks a phase marker (toggle_day)");

  const DayRange phase1{days.first, std::min(days.last, toggle - 1)};
  const DayRange phase2{std::max(days.first, toggle), days.last};
  const auto t1 = tally(log, idx, profiles.size(), phase1);
  const auto t2 = tally(log, idx, profiles.size(), phase2);

  CaseVerdict v;
  v.case_kind = CaseKind::control_effectiveness;
  // Groups are the two phases, pooled over every cohort.
  GroupStats g1, g2;
  g1.cohort_label = "phase_1";
  g2.cohort_label = "phase_2";
  for (auto [g, t] : {std::pair{&g1, &t1}, std::pair{&g2, &t2}}) {
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const Tally& x = (*t)[i];
      ++g->n_users;
      g->n_ad_impressions += x.ads;
      g->n_matched_ad_impressions += x.matched_ads;
      g->n_content_impressions += x.content;
      g->n_matched_content_impressions += x.matched_content;
      if (x.ads > 0) g->per_user_rates.push_back(static_cast<double>(x.matched_ads) / static_cast<double>(x.ads));
    }
    if (g->n_content_impressions > 0)
      g->content_matched_rate =
          static_cast<double>(g->n_matched_content_impressions) / static_cast<double>(g->n_content_impressions);
  }
  v.group_stats = {g1, g2};

  const bool ni = rule.variant == RuleVariant::non_inferiority;
  v.rule_applied = fmt::format(
      "control_effectiveness: {} on paired per-user matched-content rates, H1 phase 2 (from day {}) < phase 1, "
      "alpha = {}; significant decrease reaching the base match rate + {} -> compliant, significant decrease "
      "plateauing above it -> non_compliant (partial effect), {}; {}",
      method_text(rule), toggle, rule.alpha, rule.plateau_tolerance,
      ni ? fmt::format("decrease shown smaller than margin {} -> non_compliant, neither -> inconclusive",
                       rule.margin)
         : std::string("no significant decrease -> non_compliant"),
      floor_text(rule, "content impressions per phase"));

  const bool floor_ok = g1.n_content_impressions >= rule.min_impressions_per_group &&
                        g2.n_content_impressions >= rule.min_impressions_per_group;

  // Base match rate per user: share of the distinct content items the user
  // was shown (in the analysed days) that match their interests.
  std::vector<std::set<std::string>> seen(profiles.size()), seen_matched(profiles.size());
  for (const auto& r : log.records) {
    if (r.kind != SlotKind::content || !days.contains(r.day)) continue;
    const auto i = idx.at(r.user_id);
    seen[i].insert(r.item_id);
    if (r.matched_interest) seen_matched[i].insert(r.item_id);
  }
  std::vector<double> diffs, plateau;
  std::int64_t seen_total = 0, seen_matched_total = 0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    seen_total += static_cast<std::int64_t>(seen[i].size());
    seen_matched_total += static_cast<std::int64_t>(seen_matched[i].size());
    if (t1[i].content == 0 || t2[i].content == 0) continue;
    const double r1 = static_cast<double>(t1[i].matched_content) / static_cast<double>(t1[i].content);
    const double r2 = static_cast<double>(t2[i].matched_content) / static_cast<double>(t2[i].content);
    const double base = static_cast<double>(seen_matched[i].size()) / static_cast<double>(seen[i].size());
    diffs.push_back(r2 - r1);
    plateau.push_back(r2 - base - rule.plateau_tolerance);
  }

  if (diffs.empty() || phase1.first > phase1.last || phase2.first > phase2.last) {
    v.verdict = Verdict::inconclusive;
    v.test.method = rule.test_method;
    v.test.sidedness = rule.sidedness;
    return v;
  }

  const auto seed = test_seed(log, "control_effectiveness", days);
  const auto decide = [&](const TestResult& decrease, const TestResult& above_base,
                          const std::function<TestResult()>& margin_test, std::string& annotation) {
    annotation.clear();
    if (!floor_ok) return Verdict::inconclusive;
    if (significant_lower(decrease, rule.alpha)) {
      if (above_base.p_value < rule.alpha) {
        annotation = "partial effect";
        return Verdict::non_compliant;
      }
      return Verdict::compliant;
    }
    if (!ni) return Verdict::non_compliant;
    return margin_test().p_value < rule.alpha ? Verdict::non_compliant : Verdict::inconclusive;
  };

  const auto per_user = paired(diffs, rule, seed, rule.sidedness);
  const auto per_user_plateau = paired(plateau, rule, derive_seed(seed, "plateau"), Sidedness::one_sided_upper);
  const auto per_user_margin = [&] {
    std::vector<double> shifted(diffs);
    for (auto& d : shifted) d += rule.margin;
    return paired(shifted, rule, derive_seed(seed, "margin"), Sidedness::one_sided_upper);
  };

  const auto prop = two_proportion_test(g2.n_matched_content_impressions, g2.n_content_impressions,
                                        g1.n_matched_content_impressions, g1.n_content_impressions, rule.sidedness);
  const double pooled_base =
      seen_total > 0 ? static_cast<double>(seen_matched_total) / static_cast<double>(seen_total) : 0.0;
  const auto prop_plateau =
      one_proportion_test(g2.n_matched_content_impressions, g2.n_content_impressions,
                          std::min(1.0, pooled_base + rule.plateau_tolerance), Sidedness::one_sided_upper);
  const auto prop_margin = [&] {
    const double n1 = static_cast<double>(g1.n_content_impressions), n2 = static_cast<double>(g2.n_content_impressions);
    const double p1 = g1.n_matched_content_impressions / n1, p2 = g2.n_matched_content_impressions / n2;
    const double se = std::sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2);
    TestResult r;
    r.method = TestMethod::two_proportion;
    r.sidedness = Sidedness::one_sided_upper;
    r.effect_size = p2 - p1;
    r.statistic = se > 0 ? (p2 - p1 + rule.margin) / se : 0.0;
    r.p_value = se > 0 ? 1.0 - normal_cdf(r.statistic) : (p2 - p1 + rule.margin > 0 ? 0.0 : 1.0);
    return r;
  };

  std::string ann_user, ann_prop;
  const auto verdict_user = decide(per_user, per_user_plateau, per_user_margin, ann_user);
  const auto verdict_prop = decide(prop, prop_plateau, prop_margin, ann_prop);
  v.metric_checks = {{"per_user_rate", per_user, verdict_user}, {"impression_proportion", prop, verdict_prop}};
  set_disagreement(v);
  const bool use_prop = rule.test_method == TestMethod::two_proportion;
  v.test = use_prop ? prop : per_user;
  v.plateau_test = use_prop ? prop_plateau : per_user_plateau;
  v.verdict = use_prop ? verdict_prop : verdict_user;
  v.annotation = use_prop ? ann_prop : ann_user;
  return v;
}

CaseVerdict evaluate_sensitive_case(const ExposureLog& log, std::span<const UserProfile> profiles,
                                    const DecisionRuleConfig& rule, DayRange days) {
  const auto idx = check_inputs(log, profiles);
  const auto [sensitive, control] = split_cohorts(
      profiles, [](const UserProfile& p) { return p.sensitive_interest.has_value(); }, "sensitive_targeting");
  std::string category;
  for (const auto& p : profiles)
    if (p.cohort_label == sensitive) {
      if (!category.empty() && *p.sensitive_interest != category)
        throw EvaluationError(fmt::format("cohort '{}' mixes sensitive interests", sensitive));
      category = *p.sensitive_interest;
    }
  if (category.empty()) throw EvaluationError("sensitive_targeting: missing sensitive cohort annotation");

  const auto t = tally(log, idx, profiles.size(), days, category);
  CaseVerdict v;
  v.case_kind = CaseKind::sensitive_targeting;
  v.group_stats = {make_group(control, profiles, t), make_group(sensitive, profiles, t)};
  const auto& gc = v.group_stats[0];
  const auto& gs = v.group_stats[1];

  v.rule_applied = fmt::format(
      "sensitive_targeting: {} on per-user shares of ads tagged '{}', H1 control ('{}') < sensitive ('{}'), "
      "alpha = {}; significant -> non_compliant, not significant -> compliant; {}, or fewer than {} '{}'-tagged "
      "ad impressions in total -> inconclusive",
      method_text(rule), category, control, sensitive, rule.alpha,
      floor_text(rule, "ad impressions"), rule.min_impressions_per_group, category);

  const bool floor_ok = gc.n_ad_impressions >= rule.min_impressions_per_group &&
                        gs.n_ad_impressions >= rule.min_impressions_per_group &&
                        gc.n_sensitive_ad_impressions + gs.n_sensitive_ad_impressions >=
                            rule.min_impressions_per_group;

  const auto num = [](const Tally& x) { return x.tagged_ads; };
  const auto den = [](const Tally& x) { return x.ads; };
  const auto xs = user_rates(control, profiles, t, num, den);
  const auto ys = user_rates(sensitive, profiles, t, num, den);
  if (xs.empty() || ys.empty()) {
    v.verdict = Verdict::inconclusive;
    v.test.method = rule.test_method;
    v.test.sidedness = rule.sidedness;
    return v;
  }

  const auto decide = [&](const TestResult& r) {
    if (!floor_ok) return Verdict::inconclusive;
    return significant_lower(r, rule.alpha) ? Verdict::non_compliant : Verdict::compliant;
  };
  const auto per_user = per_user_two_sample(xs, ys, rule, test_seed(log, "sensitive_targeting", days),
                                            rule.sidedness);
  const auto prop = two_proportion_test(gc.n_sensitive_ad_impressions, gc.n_ad_impressions,
                                        gs.n_sensitive_ad_impressions, gs.n_ad_impressions, rule.sidedness);
  v.metric_checks = {{"per_user_rate", per_user, decide(per_user)}, {"impression_proportion", prop, decide(prop)}};
  set_disagreement(v);
  const bool use_prop = rule.test_method == TestMethod::two_proportion;
  v.test = use_prop ? prop : per_user;
  v.verdict = use_prop ? v.metric_checks[1].verdict : v.metric_checks[0].verdict;
  return v;
}

CaseVerdict evaluate_case(const ExposureLog& log, std::span<const UserProfile> profiles, CaseKind kind,
                          const DecisionRuleConfig& rule, DayRange days) {
  switch (kind) {
    case CaseKind::minors_profiling: return evaluate_minors_case(log, profiles, rule, days);
    case CaseKind::control_effectiveness: return evaluate_toggle_case(log, profiles, rule, days);
    case CaseKind::sensitive_targeting: return evaluate_sensitive_case(log, profiles, rule, days);
  }
  throw EvaluationError("unknown case");
}

std::vector<WindowResult> windowed_analysis(const ExposureLog& log, std::span<const UserProfile> profiles,
                                            int window_days, CaseKind kind, const DecisionRuleConfig& rule) {
  const int duration = log.header.duration_days;
  if (window_days < 1) throw EvaluationError("window_days must be at least 1");
  if (window_days > duration)
    throw EvaluationError(fmt::format("window of {} days exceeds the {}-day run", window_days, duration));
  std::vector<WindowResult> out;
  for (int first = 1; first <= duration; first += window_days) {
    WindowResult w;
    w.days = {first, std::min(duration, first + window_days - 1)};
    const int toggle = log.header.toggle_day;
    if (kind == CaseKind::control_effectiveness && !(w.days.first < toggle && toggle <= w.days.last)) {
      w.evaluated = false;
      w.annotation = "window does not span both phases";
      out.push_back(std::move(w));
      continue;
    }
    auto v = evaluate_case(log, profiles, kind, rule, w.days);
    w.evaluated = true;
    w.verdict = v.verdict;
    w.annotation = v.annotation;
    w.test = v.test;
    w.group_stats = std::move(v.group_stats);
    out.push_back(std::move(w));
  }
  return out;
}

CaseVerdict evaluate_plan(const ExposureLog& log, std::span<const UserProfile> profiles, const AuditPlan& plan) {
  auto v = evaluate_case(log, profiles, plan.case_selector, plan.decision_rule);
  if (plan.window_days > 0)
    v.windows = windowed_analysis(log, profiles, plan.window_days, plan.case_selector, plan.decision_rule);
  return v;
}

}  // namespace dsaudit
