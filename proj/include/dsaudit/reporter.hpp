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

// Audit reports. The structured form is indented JSON with a fixed key order;
// `generated_at` is its last top-level key and the only field that may differ
// between reports of identical runs. Reals are rounded to 6 significant
// digits in both forms, so every number in the Markdown form also occurs in
// the JSON form. The JSON writer may spell a value with more digits.

#ifndef DSAUDIT_REPORTER_HPP_
#define DSAUDIT_REPORTER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dsaudit/evaluator.hpp"
#include "dsaudit/explog.hpp"
#include "json.hpp"

namespace dsaudit {

struct ReportMetadata {
  std::string plan_id;
  std::string plan_hash;
  std::string platform_hash;  // or adapter identity for non-simulated runs
  std::string profiles_hash;
  std::string run_id;
  std::uint64_t seed = 0;
  std::string tool_version;
  int duration_days = 0;
  std::string generated_at;  // wall clock, excluded from comparisons

  bool operator==(const ReportMetadata&) const = default;
};

// Metadata bound to a log header; generated_at is left empty.
ReportMetadata report_metadata(const std::string& plan_id, const ExposureLogHeader& header);

struct AuditReport {
  std::string report_id;
  ReportMetadata metadata;
  std::vector<CaseVerdict> verdicts;
  std::vector<std::string> summary;
};

enum class ReportFormat { structured, human_readable };

// Throws Error when `verdicts` is empty.
AuditReport build_report(std::vector<CaseVerdict> verdicts, ReportMetadata metadata);
std::string render_report(const AuditReport& report, ReportFormat format);

nlohmann::ordered_json report_to_json(const AuditReport& report);
AuditReport report_from_json(const nlohmann::json& doc);
// Structured text with generated_at removed.
std::string deterministic_region(std::string_view structured);

std::string remediation_text(CaseKind kind, Verdict verdict, std::string_view annotation = {});

// Rounds to `digits` significant digits.
double round_sig(double value, int digits = 6);

struct ComparisonRow {
  CaseKind case_kind = CaseKind::minors_profiling;
  Verdict verdict_a = Verdict::inconclusive;
  Verdict verdict_b = Verdict::inconclusive;
  double effect_a = 0.0;
  double effect_b = 0.0;
  double p_a = 1.0;
  double p_b = 1.0;
  bool metric_disagreement_a = false;
  bool metric_disagreement_b = false;
  bool verdict_differs() const { return verdict_a != verdict_b; }
};

struct ReportComparison {
  std::string platform_a;
  std::string platform_b;
  std::vector<ComparisonRow> rows;

  int differences() const;
  bool any_metric_disagreement() const;
};

// Throws Error when the reports do not cover the same cases.
ReportComparison compare_reports(const AuditReport& a, const AuditReport& b);
std::string render_comparison(const ReportComparison& cmp);

}  // namespace dsaudit

#endif  // DSAUDIT_REPORTER_HPP_
