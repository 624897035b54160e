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

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <set>

#include "dsaudit/digest.hpp"
#include "dsaudit/errors.hpp"
#include "dsaudit/kvtext.hpp"
#include "dsaudit/rng.hpp"

namespace dsaudit {

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::female: return "female";
    case Gender::male: return "male";
    case Gender::unspecified: return "unspecified";
  }
  return "?";
}

std::string_view to_string(CaseKind c) {
  switch (c) {
    case CaseKind::minors_profiling: return "minors_profiling";
    case CaseKind::control_effectiveness: return "control_effectiveness";
    case CaseKind::sensitive_targeting: return "sensitive_targeting";
  }
  return "?";
}

std::string_view to_string(RuleVariant v) {
  return v == RuleVariant::verbatim ? "verbatim" : "non_inferiority";
}

std::optional<Gender> gender_from_string(std::string_view s) {
  for (auto g : {Gender::female, Gender::male, Gender::unspecified})
    if (to_string(g) == s) return g;
  return std::nullopt;
}

std::optional<CaseKind> case_from_string(std::string_view s) {
  for (auto c : {CaseKind::minors_profiling, CaseKind::control_effectiveness, CaseKind::sensitive_targeting})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

const std::vector<std::string>& eu_country_codes() {
  static const std::vector<std::string> codes = {
      "AT", "BE", "BG", "HR", "CY", "CZ", "DK", "EE", "FI", "FR", "DE", "GR", "HU", "IE",
      "IT", "LV", "LT", "LU", "MT", "NL", "PL", "PT", "RO", "SK", "SI", "ES", "SE"};
  return codes;
}

bool is_eu_country(std::string_view code) {
  const auto& codes = eu_country_codes();
  return std::find(codes.begin(), codes.end(), code) != codes.end();
}

int AuditPlan::toggle_day() const {
  if (case_selector != CaseKind::control_effectiveness) return 0;
  return (duration_days + 1) / 2 + 1;
}

bool AuditPlan::operator==(const AuditPlan& o) const {
  return plan_id == o.plan_id && cohorts == o.cohorts && duration_days == o.duration_days &&
         sessions_per_day == o.sessions_per_day && session_budget == o.session_budget &&
         bootstrap_interactions == o.bootstrap_interactions && topics == o.topics && seed == o.seed &&
         case_selector == o.case_selector && decision_rule == o.decision_rule &&
         window_days == o.window_days;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using kvtext::BlockReader;
using kvtext::Entry;

template <typename Enum, typename Lookup>
Enum take_enum(BlockReader& r, std::string_view key, Enum fallback, Lookup lookup, std::string_view choices) {
  const Entry* e = r.take(key);
  if (!e) return fallback;
  if (auto v = lookup(e->value)) return *v;
  kvtext::fail_value(*e, fmt::format("one of {{{}}}", choices));
}

AgeRange parse_age_range(const Entry& e) {
  const std::string& s = e.value;
  const auto dash = s.find('-', 1);
  if (dash == std::string::npos) kvtext::fail_value(e, "age range 'low-high'");
  AgeRange r{};
  auto parse_part = [&](std::string_view part, int& out) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty())
      kvtext::fail_value(e, "age range 'low-high'");
  };
  parse_part(std::string_view(s).substr(0, dash), r.low);
  parse_part(std::string_view(s).substr(dash + 1), r.high);
  return r;
}

int take_int32(BlockReader& r, std::string_view key, int fallback) {
  const Entry* e = r.take(key);
  if (!e) return fallback;
  const std::int64_t v = kvtext::to_int(*e);
  if (v < INT32_MIN || v > INT32_MAX) kvtext::fail_value(*e, "32-bit integer");
  return static_cast<int>(v);
}

CohortSpec parse_cohort(const kvtext::Block& block, std::size_t index) {
  BlockReader r(block);
  CohortSpec c;
  c.label = r.get_string("label", fmt::format("cohort{}", index + 1));
  c.size = take_int32(r, "size", c.size);
  if (const Entry* e = r.take("age_range")) c.age_range = parse_age_range(*e);
  if (const Entry* e = r.take("genders")) {
    for (const auto& g : kvtext::split_list(e->value)) {
      auto parsed = gender_from_string(g);
      if (!parsed) kvtext::fail_value(*e, "genders from {female, male, unspecified}");
      c.genders.push_back(*parsed);
    }
  } else {
    c.genders = {Gender::female, Gender::male};
  }
  c.locations = r.get_list("locations", eu_country_codes());
  c.topic_pool = r.get_list("topics", {});
  if (const Entry* e = r.take("sensitive_interest")) {
    if (e->value.empty()) kvtext::fail_value(*e, "sensitive category name");
    c.sensitive_interest = e->value;
  }
  c.engage_probability = r.get_real("engage_probability", c.engage_probability);
  r.finish();
  return c;
}

}  // namespace

AuditPlan parse_plan_unchecked(std::string_view text) {
  const kvtext::Document doc = kvtext::parse(text);
  AuditPlan plan;
  BlockReader r(doc.top);
  plan.plan_id = r.get_string("plan_id", plan.plan_id);
  if (r.has("seed")) {
    plan.seed = r.get_uint64("seed", 0);
    plan.seed_specified = true;
  }
  plan.case_selector = take_enum(r, "case", plan.case_selector, case_from_string,
                                 "minors_profiling, control_effectiveness, sensitive_targeting");
  plan.duration_days = take_int32(r, "duration_days", plan.duration_days);
  plan.sessions_per_day = take_int32(r, "sessions_per_day", plan.sessions_per_day);
  plan.session_budget = take_int32(r, "session_budget", plan.session_budget);
  plan.bootstrap_interactions = take_int32(r, "bootstrap_interactions", plan.bootstrap_interactions);
  plan.window_days = take_int32(r, "window_days", plan.window_days);
  const bool topics_given = r.has("topics");
  plan.topics = r.get_list("topics", {});

  DecisionRuleConfig& d = plan.decision_rule;
  d.test_method = take_enum(r, "decision_rule.test_method", d.test_method, test_method_from_string,
                            "permutation, exact_permutation, two_proportion");
  d.alpha = r.get_real("decision_rule.alpha", d.alpha);
  d.sidedness = take_enum(r, "decision_rule.sidedness", d.sidedness, sidedness_from_string,
                          "one_sided_lower, two_sided");
  d.n_resamples = r.get_int("decision_rule.n_resamples", d.n_resamples);
  d.min_impressions_per_group = r.get_int("decision_rule.min_impressions_per_group", d.min_impressions_per_group);
  d.variant = take_enum(
      r, "decision_rule.variant", d.variant,
      [](std::string_view s) -> std::optional<RuleVariant> {
        if (s == "verbatim") return RuleVariant::verbatim;
        if (s == "non_inferiority") return RuleVariant::non_inferiority;
        return std::nullopt;
      },
      "verbatim, non_inferiority");
  d.margin = r.get_real("decision_rule.margin", d.margin);
  d.plateau_tolerance = r.get_real("decision_rule.plateau_tolerance", d.plateau_tolerance);
  r.finish();

  for (const auto& block : doc.blocks) {
    if (block.name != "cohort")
      throw ParseError(ParseError::Kind::unknown_key, block.line, 1,
                       fmt::format("block [{}] (expected [cohort])", block.name));
    plan.cohorts.push_back(parse_cohort(block, plan.cohorts.size()));
  }

  // Topic defaults flow both ways: cohorts inherit the plan list, and a plan
  // without a list takes the union of its cohorts' pools.
  if (!topics_given) {
    for (const auto& c : plan.cohorts)
      for (const auto& t : c.topic_pool)
        if (std::find(plan.topics.begin(), plan.topics.end(), t) == plan.topics.end()) plan.topics.push_back(t);
  }
  for (auto& c : plan.cohorts)
    if (c.topic_pool.empty()) c.topic_pool = plan.topics;
  return plan;
}

AuditPlan parse_plan(std::string_view text) {
  AuditPlan plan = parse_plan_unchecked(text);
  const ValidationReport report = validate_plan(plan);
  if (!report.ok()) {
    const Finding& first = report.violations.front();
    throw ParseError(ParseError::Kind::constraint, 0, 0, first.message, first.invariant);
  }
  return plan;
}

std::string serialize_plan(const AuditPlan& plan) {
  using kvtext::format_real;
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("plan_id", plan.plan_id);
  if (plan.seed_specified) line("seed", std::to_string(plan.seed));
  line("case", std::string(to_string(plan.case_selector)));
  line("duration_days", std::to_string(plan.duration_days));
  line("sessions_per_day", std::to_string(plan.sessions_per_day));
  line("session_budget", std::to_string(plan.session_budget));
  line("bootstrap_interactions", std::to_string(plan.bootstrap_interactions));
  line("window_days", std::to_string(plan.window_days));
  line("topics", kvtext::join_list(plan.topics));
  const auto& d = plan.decision_rule;
  line("decision_rule.test_method", std::string(to_string(d.test_method)));
  line("decision_rule.alpha", format_real(d.alpha));
  line("decision_rule.sidedness", std::string(to_string(d.sidedness)));
  line("decision_rule.n_resamples", std::to_string(d.n_resamples));
  line("decision_rule.min_impressions_per_group", std::to_string(d.min_impressions_per_group));
  line("decision_rule.variant", std::string(to_string(d.variant)));
  line("decision_rule.margin", format_real(d.margin));
  line("decision_rule.plateau_tolerance", format_real(d.plateau_tolerance));
  for (const auto& c : plan.cohorts) {
    out += "\n[cohort]\n";
    line("label", c.label);
    line("size", std::to_string(c.size));
    line("age_range", fmt::format("{}-{}", c.age_range.low, c.age_range.high));
    std::vector<std::string> genders;
    for (auto g : c.genders) genders.emplace_back(to_string(g));
    line("genders", kvtext::join_list(genders));
    line("locations", kvtext::join_list(c.locations));
    line("topics", kvtext::join_list(c.topic_pool));
    if (c.sensitive_interest) line("sensitive_interest", *c.sensitive_interest);
    line("engage_probability", format_real(c.engage_probability));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_plan(const AuditPlan& plan) {
  ValidationReport rep;
  auto violation = [&](std::string inv, std::string msg) { rep.violations.push_back({std::move(inv), std::move(msg)}); };
  auto warning = [&](std::string inv, std::string msg) { rep.warnings.push_back({std::move(inv), std::move(msg)}); };

  if (plan.cohorts.empty()) violation("cohorts_non_empty", "plan declares no cohorts");
  if (plan.duration_days < 1) violation("duration_days_positive", "duration_days must be >= 1");
  if (plan.sessions_per_day < 1) violation("sessions_per_day_positive", "sessions_per_day must be >= 1");
  if (plan.session_budget < 1) violation("session_budget_positive", "session_budget must be >= 1");
  if (plan.bootstrap_interactions < 0)
    violation("bootstrap_non_negative", "bootstrap_interactions must be >= 0");
  if (plan.window_days < 0 || (plan.duration_days >= 1 && plan.window_days > plan.duration_days))
    violation("window_days_within_duration", "window_days must be 0 (off) or between 1 and duration_days");
  if (plan.topics.empty()) violation("plan_topics_non_empty", "plan lists no topics");

  std::set<std::string> labels;
  for (const auto& c : plan.cohorts) {
    const std::string who = fmt::format("cohort '{}'", c.label);
    if (!labels.insert(c.label).second) violation("cohort_labels_unique", who + " is declared twice");
    if (c.size < 1) violation("cohort_size_positive", who + ": size must be >= 1");
    if (c.age_range.low > c.age_range.high) violation("age_range_ordered", who + ": age_range low > high");
    if (c.age_range.low < 0) violation("age_range_non_negative", who + ": negative age");
    if (c.genders.empty()) violation("genders_non_empty", who + ": no genders");
    if (c.locations.empty()) violation("locations_non_empty", who + ": no locations");
    for (const auto& loc : c.locations)
      if (!is_eu_country(loc)) violation("locations_eu", fmt::format("{}: '{}' is not an EU member code", who, loc));
    if (c.topic_pool.empty()) violation("cohort_topic_pool_non_empty", who + ": empty topic pool");
    for (const auto& t : c.topic_pool)
      if (std::find(plan.topics.begin(), plan.topics.end(), t) == plan.topics.end())
        violation("cohort_topics_subset", fmt::format("{}: topic '{}' is not in the plan topics", who, t));
    if (!(c.engage_probability >= 0.0 && c.engage_probability <= 1.0))
      violation("engage_probability_range", who + ": engage_probability outside [0, 1]");
    if (c.size >= 1 && c.size < kUnderpoweredCohortSize)
      warning("underpowered_cohort", fmt::format("underpowered cohort: {} has {} users (< {})", who, c.size,
                                                 kUnderpoweredCohortSize));
    if (c.sensitive_interest && plan.case_selector != CaseKind::sensitive_targeting)
      warning("sensitive_interest_unused", who + ": sensitive_interest is only used by sensitive_targeting");
  }

  const auto& d = plan.decision_rule;
  if (!(d.alpha > 0.0 && d.alpha < 1.0)) violation("alpha_range", "decision_rule.alpha must lie in (0, 1)");
  if (d.test_method == TestMethod::permutation && d.n_resamples < 1000)
    violation("n_resamples_minimum", "permutation tests need n_resamples >= 1000");
  if (d.n_resamples < 1) violation("n_resamples_positive", "n_resamples must be >= 1");
  if (d.min_impressions_per_group < 1)
    violation("min_impressions_positive", "min_impressions_per_group must be >= 1");
  if (d.sidedness == Sidedness::one_sided_upper)
    violation("sidedness_supported", "decision_rule.sidedness must be one_sided_lower or two_sided");
  if (!(d.margin >= 0.0)) violation("margin_non_negative", "decision_rule.margin must be >= 0");
  if (!(d.plateau_tolerance >= 0.0))
    violation("plateau_tolerance_non_negative", "decision_rule.plateau_tolerance must be >= 0");

  switch (plan.case_selector) {
    case CaseKind::minors_profiling: {
      if (plan.cohorts.size() != 2) {
        violation("minors_two_cohorts", "minors_profiling needs exactly two cohorts");
        break;
      }
      const auto& a = plan.cohorts[0].age_range;
      const auto& b = plan.cohorts[1].age_range;
      if (a.overlaps(b)) {
        violation("cohort_age_ranges_overlap", "cohort age ranges overlap");
      } else {
        const bool a_minor = a.high < 18, b_minor = b.high < 18;
        const bool a_adult = a.low >= 18, b_adult = b.low >= 18;
        if (!((a_minor && b_adult) || (b_minor && a_adult)))
          violation("minors_cohort_identification",
                    "one cohort must be entirely under 18 and the other entirely 18 or older");
      }
      break;
    }
    case CaseKind::sensitive_targeting: {
      if (plan.cohorts.size() != 2) {
        violation("sensitive_two_cohorts", "sensitive_targeting needs exactly two cohorts");
        break;
      }
      const int annotated = static_cast<int>(std::count_if(plan.cohorts.begin(), plan.cohorts.end(),
                                                           [](const CohortSpec& c) { return c.sensitive_interest.has_value(); }));
      if (annotated != 1)
        violation("sensitive_cohort_annotation", "exactly one cohort must declare sensitive_interest");
      break;
    }
    case CaseKind::control_effectiveness:
      if (plan.duration_days < 2)
        violation("toggle_requires_two_days", "control_effectiveness needs duration_days >= 2");
      break;
  }

  if (d.test_method == TestMethod::exact_permutation) {
    long total = 0;
    for (const auto& c : plan.cohorts) total += c.size;
    if (total > static_cast<long>(kExactEnumerationLimit))
      violation("exact_enumeration_bound",
                fmt::format("exact_permutation supports at most {} users in total, plan has {}",
                            kExactEnumerationLimit, total));
  }

  // Nominal feed: 10 slots, one in five an ad. Each session issues at most
  // session_budget feed requests.
  if (plan.duration_days >= 1 && plan.sessions_per_day >= 1 && plan.session_budget >= 1) {
    for (const auto& c : plan.cohorts) {
      if (c.size < 1) continue;
      const double max_ads = 2.0 * c.size * plan.duration_days * plan.sessions_per_day * plan.session_budget;
      if (max_ads < static_cast<double>(d.min_impressions_per_group))
        warning("impression_floor_unreachable",
                fmt::format("cohort '{}' can observe at most ~{:.0f} ads, below the floor of {}", c.label,
                            max_ads, d.min_impressions_per_group));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Materialization

namespace {

// Exactly balanced: value j appears floor(n/v) or ceil(n/v) times, in a
// seeded order so attributes are not correlated with each other.
template <typename T>
std::vector<T> balanced_assignment(const std::vector<T>& values, int n, std::uint64_t seed) {
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(values[static_cast<std::size_t>(i) % values.size()]);
  Rng rng(seed);
  rng.shuffle(std::span<T>(out));
  return out;
}

}  // namespace

std::vector<UserProfile> generate_cohorts(const AuditPlan& plan) {
  std::vector<UserProfile> profiles;
  for (const auto& c : plan.cohorts) {
    if (c.size < 1 || c.topic_pool.empty() || c.genders.empty() || c.locations.empty()) continue;
    const auto topics = balanced_assignment(c.topic_pool, c.size, derive_seed(plan.seed, "cohort", c.label, "topics"));
    const auto genders = balanced_assignment(c.genders, c.size, derive_seed(plan.seed, "cohort", c.label, "genders"));
    const auto locations =
        balanced_assignment(c.locations, c.size, derive_seed(plan.seed, "cohort", c.label, "locations"));
    for (int i = 0; i < c.size; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      UserProfile p;
      const auto tag = static_cast<std::uint32_t>(derive_seed(plan.seed, "user", c.label, static_cast<std::uint64_t>(i)));
      p.user_id = fmt::format("{}-{:04d}-{:08x}", c.label, i, tag);
      p.cohort_label = c.label;
      Rng age_rng(derive_seed(plan.seed, "age", p.user_id));
      p.declared_age = static_cast<int>(age_rng.uniform_int(c.age_range.low, c.age_range.high));
      p.gender = genders[idx];
      p.location = locations[idx];
      p.interests = {topics[idx]};
      p.engage_probability = c.engage_probability;
      p.sensitive_interest = c.sensitive_interest;
      profiles.push_back(std::move(p));
    }
  }
  return profiles;
}

std::vector<SessionSchedule> build_schedules(const AuditPlan& plan, std::span<const UserProfile> profiles) {
  std::vector<SessionSchedule> out;
  out.reserve(profiles.size());
  const int max_budget = std::max(1, plan.session_budget);
  const int min_budget = (max_budget + 1) / 2;
  for (const auto& p : profiles) {
    SessionSchedule s;
    s.user_id = p.user_id;
    Rng rng(derive_seed(plan.seed, "schedule", p.user_id));
    for (int day = 1; day <= plan.duration_days; ++day)
      for (int session = 1; session <= plan.sessions_per_day; ++session)
        s.entries.push_back({day, session, static_cast<int>(rng.uniform_int(min_budget, max_budget))});
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hashing

nlohmann::json plan_to_json(const AuditPlan& plan) {
  using nlohmann::json;
  json cohorts = json::array();
  for (const auto& c : plan.cohorts) {
    json genders = json::array();
    for (auto g : c.genders) genders.push_back(std::string(to_string(g)));
    cohorts.push_back({
        {"label", c.label},
        {"size", c.size},
        {"age_range", {c.age_range.low, c.age_range.high}},
        {"genders", genders},
        {"locations", c.locations},
        {"topics", c.topic_pool},
        {"sensitive_interest", c.sensitive_interest ? json(*c.sensitive_interest) : json(nullptr)},
        {"engage_probability", c.engage_probability},
    });
  }
  const auto& d = plan.decision_rule;
  return {
      {"plan_id", plan.plan_id},
      {"seed", plan.seed},
      {"case", std::string(to_string(plan.case_selector))},
      {"duration_days", plan.duration_days},
      {"sessions_per_day", plan.sessions_per_day},
      {"session_budget", plan.session_budget},
      {"bootstrap_interactions", plan.bootstrap_interactions},
      {"window_days", plan.window_days},
      {"topics", plan.topics},
      {"cohorts", cohorts},
      {"decision_rule",
       {
           {"test_method", std::string(to_string(d.test_method))},
           {"alpha", d.alpha},
           {"sidedness", std::string(to_string(d.sidedness))},
           {"n_resamples", d.n_resamples},
           {"min_impressions_per_group", d.min_impressions_per_group},
           {"variant", std::string(to_string(d.variant))},
           {"margin", d.margin},
           {"plateau_tolerance", d.plateau_tolerance},
       }},
  };
}

nlohmann::json profile_to_json(const UserProfile& p) {
  using nlohmann::json;
  return {
      {"user_id", p.user_id},
      {"cohort_label", p.cohort_label},
      {"declared_age", p.declared_age},
      {"gender", std::string(to_string(p.gender))},
      {"location", p.location},
      {"interests", p.interests},
      {"engage_probability", p.engage_probability},
      {"sensitive_interest", p.sensitive_interest ? json(*p.sensitive_interest) : json(nullptr)},
  };
}

std::string plan_hash(const AuditPlan& plan) { return canonical_hash(plan_to_json(plan)); }

std::string profiles_hash(std::span<const UserProfile> profiles) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : profiles) arr.push_back(profile_to_json(p));
  return canonical_hash(arr);
}

}  // namespace dsaudit
