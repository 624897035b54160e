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

#include "dsaudit/reporter.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

#include "dsaudit/digest.hpp"
#include "dsaudit/errors.hpp"

namespace dsaudit {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kReportFormat = "dsaudit-report/1";

std::string num(double v) { return fmt::format("{}", round_sig(v)); }

double mean(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

ordered_json test_to_json(const TestResult& t) {
  ordered_json j;
  j["method"] = std::string(to_string(t.method));
  j["sidedness"] = std::string(to_string(t.sidedness));
  j["statistic"] = round_sig(t.statistic);
  j["p_value"] = round_sig(t.p_value);
  j["effect_size"] = round_sig(t.effect_size);
  j["n_resamples_used"] = t.n_resamples_used;
  return j;
}

TestResult test_from_json(const nlohmann::json& j) {
  TestResult t;
  const auto m = test_method_from_string(j.at("method").get<std::string>());
  const auto s = sidedness_from_string(j.at("sidedness").get<std::string>());
  if (!m || !s) throw Error("report: unknown test method or sidedness");
  t.method = *m;
  t.sidedness = *s;
  t.statistic = j.at("statistic").get<double>();
  t.p_value = j.at("p_value").get<double>();
  t.effect_size = j.at("effect_size").get<double>();
  t.n_resamples_used = j.at("n_resamples_used").get<std::int64_t>();
  return t;
}

ordered_json group_to_json(const GroupStats& g) {
  ordered_json j;
  j["cohort_label"] = g.cohort_label;
  j["n_users"] = g.n_users;
  j["n_ad_impressions"] = g.n_ad_impressions;
  j["n_matched_ad_impressions"] = g.n_matched_ad_impressions;
  j["n_sensitive_ad_impressions"] = g.n_sensitive_ad_impressions;
  j["n_content_impressions"] = g.n_content_impressions;
  j["n_matched_content_impressions"] = g.n_matched_content_impressions;
  j["content_matched_rate"] = round_sig(g.content_matched_rate);
  j["mean_per_user_rate"] = round_sig(mean(g.per_user_rates));
  ordered_json rates = ordered_json::array();
  for (double r : g.per_user_rates) rates.push_back(round_sig(r));
  j["per_user_rates"] = std::move(rates);
  return j;
}

GroupStats group_from_json(const nlohmann::json& j) {
  GroupStats g;
  g.cohort_label = j.at("cohort_label").get<std::string>();
  g.n_users = j.at("n_users").get<int>();
  g.n_ad_impressions = j.at("n_ad_impressions").get<std::int64_t>();
  g.n_matched_ad_impressions = j.at("n_matched_ad_impressions").get<std::int64_t>();
  g.n_sensitive_ad_impressions = j.at("n_sensitive_ad_impressions").get<std::int64_t>();
  g.n_content_impressions = j.at("n_content_impressions").get<std::int64_t>();
  g.n_matched_content_impressions = j.at("n_matched_content_impressions").get<std::int64_t>();
  g.content_matched_rate = j.at("content_matched_rate").get<double>();
  g.per_user_rates = j.at("per_user_rates").get<std::vector<double>>();
  return g;
}

Verdict verdict_of(const nlohmann::json& j) {
  const auto v = verdict_from_string(j.get<std::string>());
  if (!v) throw Error(fmt::format("report: unknown verdict {}", j.dump()));
  return *v;
}

ordered_json verdict_to_json(const CaseVerdict& v) {
  ordered_json j;
  j["case"] = std::string(to_string(v.case_kind));
  j["verdict"] = std::string(to_string(v.verdict));
  j["annotation"] = v.annotation;
  j["rule_applied"] = v.rule_applied;
  j["remediation"] = remediation_text(v.case_kind, v.verdict, v.annotation);
  j["test"] = test_to_json(v.test);
  j["plateau_test"] = v.plateau_test ? test_to_json(*v.plateau_test) : ordered_json(nullptr);
  ordered_json checks = ordered_json::array();
  for (const auto& m : v.metric_checks) {
    ordered_json c;
    c["metric"] = m.metric;
    c["verdict"] = std::string(to_string(m.verdict));
    c["test"] = test_to_json(m.test);
    checks.push_back(std::move(c));
  }
  j["metric_checks"] = std::move(checks);
  j["metric_disagreement"] = v.metric_disagreement;
  ordered_json groups = ordered_json::array();
  for (const auto& g : v.group_stats) groups.push_back(group_to_json(g));
  j["group_stats"] = std::move(groups);
  if (v.windows) {
    ordered_json windows = ordered_json::array();
    for (const auto& w : *v.windows) {
      ordered_json wj;
      wj["first_day"] = w.days.first;
      wj["last_day"] = w.days.last;
      wj["evaluated"] = w.evaluated;
      wj["verdict"] = std::string(to_string(w.verdict));
      wj["annotation"] = w.annotation;
      wj["test"] = test_to_json(w.test);
      ordered_json wg = ordered_json::array();
      for (const auto& g : w.group_stats) wg.push_back(group_to_json(g));
      wj["group_stats"] = std::move(wg);
      windows.push_back(std::move(wj));
    }
    j["windows"] = std::move(windows);
  } else {
    j["windows"] = nullptr;
  }
  return j;
}

CaseVerdict verdict_from_json(const nlohmann::json& j) {
  CaseVerdict v;
  const auto kind = case_from_string(j.at("case").get<std::string>());
  if (!kind) throw Error(fmt::format("report: unknown case {}", j.at("case").dump()));
  v.case_kind = *kind;
  v.verdict = verdict_of(j.at("verdict"));
  v.annotation = j.at("annotation").get<std::string>();
  v.rule_applied = j.at("rule_applied").get<std::string>();
  v.test = test_from_json(j.at("test"));
  if (!j.at("plateau_test").is_null()) v.plateau_test = test_from_json(j.at("plateau_test"));
  for (const auto& c : j.at("metric_checks"))
    v.metric_checks.push_back({c.at("metric").get<std::string>(), test_from_json(c.at("test")),
                               verdict_of(c.at("verdict"))});
  v.metric_disagreement = j.at("metric_disagreement").get<bool>();
  for (const auto& g : j.at("group_stats")) v.group_stats.push_back(group_from_json(g));
  if (!j.at("windows").is_null()) {
    v.windows.emplace();
    for (const auto& wj : j.at("windows")) {
      WindowResult w;
      w.days = {wj.at("first_day").get<int>(), wj.at("last_day").get<int>()};
      w.evaluated = wj.at("evaluated").get<bool>();
      w.verdict = verdict_of(wj.at("verdict"));
      w.annotation = wj.at("annotation").get<std::string>();
      w.test = test_from_json(wj.at("test"));
      for (const auto& g : wj.at("group_stats")) w.group_stats.push_back(group_from_json(g));
      v.windows->push_back(std::move(w));
    }
  }
  return v;
}

std::string summary_line(const CaseVerdict& v) {
  std::string s = fmt::format("{}: {}", to_string(v.case_kind), to_string(v.verdict));
  if (!v.annotation.empty()) s += fmt::format(" ({})", v.annotation);
  s += fmt::format(", p = {}, effect size = {}", num(v.test.p_value), num(v.test.effect_size));
  if (v.metric_disagreement) s += "; per-user and impression-level metrics disagree";
  return s;
}

std::string window_summary(const CaseVerdict& v) {
  if (!v.windows || v.windows->empty()) return {};
  std::vector<std::string> flips;
  const WindowResult* prev = nullptr;
  for (const auto& w : *v.windows) {
    if (!w.evaluated) continue;
    if (prev && prev->verdict != w.verdict)
      flips.push_back(fmt::format("{} on days {}-{} to {} on days {}-{}", to_string(prev->verdict), prev->days.first,
                                  prev->days.last, to_string(w.verdict), w.days.first, w.days.last));
    prev = &w;
  }
  if (flips.empty())
    return fmt::format("{}: verdict stable across {} windows", to_string(v.case_kind), v.windows->size());
  std::string s = fmt::format("{}: verdict changes across windows: ", to_string(v.case_kind));
  for (std::size_t i = 0; i < flips.size(); ++i) s += (i ? "; " : "") + flips[i];
  return s;
}

std::string render_markdown(const AuditReport& r) {
  const auto& m = r.metadata;
  std::string out = fmt::format("# Audit report: {}\n\n", m.plan_id);
  out += "| Field | Value |\n|---|---|\n";
  out += fmt::format("| Report id | `{}` |\n", r.report_id);
  out += fmt::format("| Run id | `{}` |\n", m.run_id);
  out += fmt::format("| Plan hash | `{}` |\n", m.plan_hash);
  out += fmt::format("| Platform | `{}` |\n", m.platform_hash);
  out += fmt::format("| Profiles hash | `{}` |\n", m.profiles_hash);
  out += fmt::format("| Seed | {} |\n", m.seed);
  out += fmt::format("| Duration (days) | {} |\n", m.duration_days);
  out += fmt::format("| Tool version | {} |\n", m.tool_version);
  out += fmt::format("| Generated at | {} |\n\n", m.generated_at);

  out += "## Summary\n\n";
  for (const auto& s : r.summary) out += fmt::format("- {}\n", s);

  out += "\n## Verdicts\n\n";
  out += "| Case | Verdict | Annotation | Method | Sidedness | Statistic | p-value | Effect size | Resamples |\n";
  out += "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& v : r.verdicts)
    out += fmt::format("| {} | **{}** | {} | {} | {} | {} | {} | {} | {} |\n", to_string(v.case_kind),
                       to_string(v.verdict), v.annotation.empty() ? "-" : v.annotation, to_string(v.test.method),
                       to_string(v.test.sidedness), num(v.test.statistic), num(v.test.p_value),
                       num(v.test.effect_size), v.test.n_resamples_used);

  for (const auto& v : r.verdicts) {
    out += fmt::format("\n## {}\n\n", to_string(v.case_kind));
    out += fmt::format("Decision rule: {}\n\n", v.rule_applied);
    if (v.plateau_test)
      out += fmt::format("Plateau test ({}, {}): statistic {}, p-value {}, effect size {}\n\n",
                         to_string(v.plateau_test->method), to_string(v.plateau_test->sidedness),
                         num(v.plateau_test->statistic), num(v.plateau_test->p_value),
                         num(v.plateau_test->effect_size));

    out += "### Group statistics\n\n";
    out += "| Group | Users | Ad impressions | Matched ads | Sensitive-tagged ads | Content impressions | "
           "Content match rate | Mean per-user rate |\n";
    out += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& g : v.group_stats)
      out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n", g.cohort_label, g.n_users,
                         g.n_ad_impressions, g.n_matched_ad_impressions, g.n_sensitive_ad_impressions,
                         g.n_content_impressions, num(g.content_matched_rate), num(mean(g.per_user_rates)));

    out += "\n### Metric dependency\n\n";
    out += "| Metric | Method | p-value | Effect size | Verdict |\n|---|---|---|---|---|\n";
    for (const auto& c : v.metric_checks)
      out += fmt::format("| {} | {} | {} | {} | {} |\n", c.metric, to_string(c.test.method), num(c.test.p_value),
                         num(c.test.effect_size), to_string(c.verdict));
    out += v.metric_disagreement ? "\n**Metric disagreement:** the verdict depends on the chosen metric.\n"
                                 : "\nBoth metrics agree.\n";

    if (v.windows) {
      out += "\n### Per-window trend\n\n";
      out += "| Days | Verdict | p-value | Effect size | Note |\n|---|---|---|---|---|\n";
      for (const auto& w : *v.windows) {
        if (!w.evaluated) {
          out += fmt::format("| {}-{} | not evaluated | - | - | {} |\n", w.days.first, w.days.last, w.annotation);
          continue;
        }
        out += fmt::format("| {}-{} | {} | {} | {} | {} |\n", w.days.first, w.days.last, to_string(w.verdict),
                           num(w.test.p_value), num(w.test.effect_size), w.annotation.empty() ? "-" : w.annotation);
      }
    }

    out += fmt::format("\n### Remediation\n\n{}\n", remediation_text(v.case_kind, v.verdict, v.annotation));
  }
  return out;
}

}  // namespace

double round_sig(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value == 0.0 ? 0.0 : value;
  return std::stod(fmt::format("{:.{}g}", value, digits));
}

std::string remediation_text(CaseKind kind, Verdict verdict, std::string_view annotation) {
  if (verdict == Verdict::inconclusive)
    return "Not enough exposure data to decide. Increase cohort size, duration or session budget and repeat the "
           "audit before drawing conclusions.";
  if (verdict == Verdict::compliant) return "No remedial measure indicated. Repeat the audit after platform changes.";
  switch (kind) {
    case CaseKind::minors_profiling:
      return "Art. 28(2) DSA: stop presenting advertisements based on profiling to recipients known with reasonable "
             "certainty to be minors. Exclude minor accounts from profile-based ad selection and repeat the audit.";
    case CaseKind::control_effectiveness:
      if (annotation == "partial effect")
        return "Art. 27(3) and Art. 38 DSA: the non-profiling option only weakens profiling. Remove the remaining "
               "profile-based ranking signals for users who select it and repeat the audit.";
      return "Art. 27(3) and Art. 38 DSA: the non-profiling option has no measurable effect. Make the option switch "
             "recommendations to a ranking that does not use the user's profile and repeat the audit.";
    case CaseKind::sensitive_targeting:
      return "Art. 26(3) DSA: stop presenting advertisements based on profiling that uses special categories of "
             "personal data. Remove sensitive-category signals from ad selection and repeat the audit.";
  }
  return {};
}

nlohmann::ordered_json report_to_json(const AuditReport& r) {
  ordered_json j;
  j["format"] = kReportFormat;
  j["report_id"] = r.report_id;
  j["plan_id"] = r.metadata.plan_id;
  j["plan_hash"] = r.metadata.plan_hash;
  j["platform_hash"] = r.metadata.platform_hash;
  j["profiles_hash"] = r.metadata.profiles_hash;
  j["run_id"] = r.metadata.run_id;
  j["seed"] = r.metadata.seed;
  j["tool_version"] = r.metadata.tool_version;
  j["duration_days"] = r.metadata.duration_days;
  j["summary"] = r.summary;
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(verdict_to_json(v));
  j["verdicts"] = std::move(verdicts);
  j["generated_at"] = r.metadata.generated_at;
  return j;
}

AuditReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kReportFormat) throw Error("unsupported report format");
    AuditReport r;
    r.report_id = j.at("report_id").get<std::string>();
    auto& m = r.metadata;
    m.plan_id = j.at("plan_id").get<std::string>();
    m.plan_hash = j.at("plan_hash").get<std::string>();
    m.platform_hash = j.at("platform_hash").get<std::string>();
    m.profiles_hash = j.at("profiles_hash").get<std::string>();
    m.run_id = j.at("run_id").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.duration_days = j.at("duration_days").get<int>();
    m.generated_at = j.at("generated_at").get<std::string>();
    r.summary = j.at("summary").get<std::vector<std::string>>();
    for (const auto& v : j.at("verdicts")) r.verdicts.push_back(verdict_from_json(v));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("malformed report: {}", e.what()));
  }
}

ReportMetadata report_metadata(const std::string& plan_id, const ExposureLogHeader& h) {
  ReportMetadata m;
  m.plan_id = plan_id;
  m.plan_hash = h.plan_hash;
  m.platform_hash = h.platform_hash;
  m.profiles_hash = h.profiles_hash;
  m.run_id = h.run_id;
  m.seed = h.seed;
  m.tool_version = h.tool_version;
  m.duration_days = h.duration_days;
  return m;
}

AuditReport build_report(std::vector<CaseVerdict> verdicts, ReportMetadata metadata) {
  if (verdicts.empty()) throw Error("a report needs at least one verdict");
  AuditReport r;
  r.metadata = std::move(metadata);
  r.verdicts = std::move(verdicts);
  for (const auto& v : r.verdicts) {
    r.summary.push_back(summary_line(v));
    if (auto w = window_summary(v); !w.empty()) r.summary.push_back(std::move(w));
  }
  auto j = report_to_json(r);
  j.erase("report_id");
  j.erase("generated_at");
  r.report_id = canonical_hash(nlohmann::json::parse(j.dump())).substr(0, 16);
  return r;
}

std::string render_report(const AuditReport& report, ReportFormat format) {
  if (format == ReportFormat::structured) return report_to_json(report).dump(2) + "\n";
  return render_markdown(report);
}

std::string deterministic_region(std::string_view structured) {
  auto j = ordered_json::parse(structured);
  j.erase("generated_at");
  return j.dump(2);
}

int ReportComparison::differences() const {
  int n = 0;
  for (const auto& r : rows) n += r.verdict_differs();
  return n;
}

bool ReportComparison::any_metric_disagreement() const {
  for (const auto& r : rows)
    if (r.metric_disagreement_a || r.metric_disagreement_b) return true;
  return false;
}

ReportComparison compare_reports(const AuditReport& a, const AuditReport& b) {
  if (a.verdicts.size() != b.verdicts.size())
    throw Error("reports cover different cases and cannot be compared");
  ReportComparison cmp;
  cmp.platform_a = a.metadata.platform_hash;
  cmp.platform_b = b.metadata.platform_hash;
  for (const auto& va : a.verdicts) {
    const CaseVerdict* vb = nullptr;
    for (const auto& candidate : b.verdicts)
      if (candidate.case_kind == va.case_kind) vb = &candidate;
    if (!vb)
      throw Error(fmt::format("case {} is missing from the second report; reports cannot be compared",
                              to_string(va.case_kind)));
    ComparisonRow row;
    row.case_kind = va.case_kind;
    row.verdict_a = va.verdict;
    row.verdict_b = vb->verdict;
    row.effect_a = round_sig(va.test.effect_size);
    row.effect_b = round_sig(vb->test.effect_size);
    row.p_a = round_sig(va.test.p_value);
    row.p_b = round_sig(vb->test.p_value);
    row.metric_disagreement_a = va.metric_disagreement;
    row.metric_disagreement_b = vb->metric_disagreement;
    cmp.rows.push_back(row);
  }
  return cmp;
}

std::string render_comparison(const ReportComparison& cmp) {
  std::string out = "# Cross-platform comparison\n\n";
  out += fmt::format("- A: `{}`\n- B: `{}`\n\n", cmp.platform_a, cmp.platform_b);
  out += "| Case | Verdict A | Verdict B | Effect A | Effect B | p A | p B | Verdict differs | Metric disagreement |\n";
  out += "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : cmp.rows) {
    std::string flag = "-";
    if (r.metric_disagreement_a && r.metric_disagreement_b) flag = "A, B";
    else if (r.metric_disagreement_a) flag = "A";
    else if (r.metric_disagreement_b) flag = "B";
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} | {} |\n", to_string(r.case_kind),
                       to_string(r.verdict_a), to_string(r.verdict_b), num(r.effect_a), num(r.effect_b), num(r.p_a),
                       num(r.p_b), r.verdict_differs() ? "yes" : "no", flag);
  }
  out += fmt::format("\n{} verdict difference(s).\n", cmp.differences());
  if (cmp.any_metric_disagreement())
    out += "METRIC DISAGREEMENT: per-user and impression-level tests reach different verdicts for at least one "
           "case.\n";
  return out;
}

}  // namespace dsaudit
