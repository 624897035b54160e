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

#include "dsaudit/power.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dsaudit/errors.hpp"
#include "dsaudit/kvtext.hpp"
#include "dsaudit/pipeline.hpp"
#include "dsaudit/rng.hpp"

namespace dsaudit {

namespace {

double rate(int k, int n) { return n > 0 ? static_cast<double>(k) / n : 0.0; }
double se(int k, int n) {
  if (n <= 0) return 0.0;
  const double p = rate(k, n);
  return std::sqrt(p * (1.0 - p) / n);
}

std::vector<int> int_list(const kvtext::Entry* e, std::string_view what) {
  std::vector<int> out;
  if (!e) return out;
  for (const auto& item : kvtext::split_list(e->value)) {
    kvtext::Entry tmp = *e;
    tmp.value = item;
    const auto v = kvtext::to_int(tmp);
    if (v < 1) kvtext::fail_value(*e, fmt::format("{} values must be positive", what));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

double PowerCell::power() const { return rate(violating_flagged, runs); }
double PowerCell::power_se() const { return se(violating_flagged, runs); }
double PowerCell::false_positive_rate() const { return rate(compliant_flagged, runs); }
double PowerCell::false_positive_se() const { return se(compliant_flagged, runs); }

SweepGrid parse_sweep_grid(std::string_view text) {
  const auto doc = kvtext::parse(text);
  if (!doc.blocks.empty())
    throw ParseError(ParseError::Kind::unknown_key, doc.blocks.front().line, 1,
                     fmt::format("unexpected block [{}] in grid file", doc.blocks.front().name));
  kvtext::BlockReader r(doc.top);
  SweepGrid g;
  if (const auto* e = r.take("w_match")) {
    for (const auto& item : kvtext::split_list(e->value)) {
      kvtext::Entry tmp = *e;
      tmp.value = item;
      const double w = kvtext::to_real(tmp);
      if (!(w >= 0.0)) kvtext::fail_value(*e, "w_match values must be non-negative");
      g.w_match.push_back(w);
    }
  }
  g.cohort_size = int_list(r.take("cohort_size"), "cohort_size");
  g.duration_days = int_list(r.take("duration_days"), "duration_days");
  g.violating_platform = r.get_string("violating", "");
  g.compliant_platform = r.get_string("compliant", "");
  r.finish();
  if (g.w_match.empty())
    throw ParseError(ParseError::Kind::constraint, 1, 1, "grid needs at least one w_match value", "w_match_non_empty");
  if (g.violating_platform.empty() || g.compliant_platform.empty())
    throw ParseError(ParseError::Kind::constraint, 1, 1, "grid needs both 'violating' and 'compliant' platforms",
                     "grid_platforms_present");
  return g;
}

PowerCurve power_sweep(const AuditPlan& plan, const PlatformConfig& violating, const PlatformConfig& compliant,
                       const SweepGrid& grid, int runs_per_cell, std::uint64_t seed, int threads) {
  if (runs_per_cell < 1) throw Error("runs_per_cell must be positive");
  if (grid.w_match.empty()) throw Error("grid has no w_match values");

  struct Cell {
    AuditPlan plan;
    PlatformConfig violating;
    PlatformConfig compliant;
  };
  PowerCurve curve;
  std::vector<Cell> cells;
  const std::vector<int> sizes = grid.cohort_size.empty() ? std::vector<int>{0} : grid.cohort_size;
  const std::vector<int> durations = grid.duration_days.empty() ? std::vector<int>{0} : grid.duration_days;
  for (double w : grid.w_match) {
    for (int size : sizes) {
      for (int duration : durations) {
        Cell c{plan, violating, compliant};
        if (size > 0)
          for (auto& cohort : c.plan.cohorts) cohort.size = size;
        if (duration > 0) c.plan.duration_days = duration;
        c.plan.window_days = 0;
        c.violating.profiling_weight = w;
        c.compliant.profiling_weight = w;
        const auto report = validate_plan(c.plan);
        if (!report.ok())
          throw Error(fmt::format("grid cell w_match={} cohort_size={} duration_days={}: {}", w, size, duration,
                                  report.violations.front().message));
        PowerCell pc;
        pc.w_match = w;
        pc.cohort_size = c.plan.cohorts.empty() ? 0 : c.plan.cohorts.front().size;
        pc.duration_days = c.plan.duration_days;
        pc.runs = runs_per_cell;
        curve.cells.push_back(pc);
        cells.push_back(std::move(c));
      }
    }
  }

  const std::size_t n_jobs = cells.size() * static_cast<std::size_t>(runs_per_cell);
  std::vector<Verdict> on_violating(n_jobs), on_compliant(n_jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const auto& c = cells[job / static_cast<std::size_t>(runs_per_cell)];
      const auto run_seed = derive_seed(seed, "sweep", static_cast<std::uint64_t>(job % runs_per_cell));
      try {
        on_violating[job] = execute_audit(c.plan, c.violating, run_seed).verdict.verdict;
        on_compliant[job] = execute_audit(c.plan, c.compliant, run_seed).verdict.verdict;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n_jobs;
      }
    }
  };
  int n_threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n_threads), n_jobs));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t job = 0; job < n_jobs; ++job) {
    auto& pc = curve.cells[job / static_cast<std::size_t>(runs_per_cell)];
    pc.violating_flagged += on_violating[job] == Verdict::non_compliant;
    pc.compliant_flagged += on_compliant[job] == Verdict::non_compliant;
    pc.violating_inconclusive += on_violating[job] == Verdict::inconclusive;
    pc.compliant_inconclusive += on_compliant[job] == Verdict::inconclusive;
  }
  return curve;
}

std::string power_curve_csv(const PowerCurve& curve) {
  std::string out =
      "w_match,cohort_size,duration_days,runs,power,power_se,false_positive_rate,false_positive_se,"
      "discrimination,violating_inconclusive,compliant_inconclusive\n";
  for (const auto& c : curve.cells)
    out += fmt::format("{},{},{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{},{}\n", kvtext::format_real(c.w_match),
                       c.cohort_size, c.duration_days, c.runs, c.power(), c.power_se(), c.false_positive_rate(),
                       c.false_positive_se(), c.discrimination(), c.violating_inconclusive,
                       c.compliant_inconclusive);
  return out;
}

std::string power_curve_plot(const PowerCurve& curve) {
  constexpr int kWidth = 40;
  auto bar = [](double p, char fill) {
    const int n = static_cast<int>(std::lround(std::clamp(p, 0.0, 1.0) * kWidth));
    return std::string(static_cast<std::size_t>(n), fill) + std::string(static_cast<std::size_t>(kWidth - n), ' ');
  };
  std::string out = fmt::format("{:>28}  {:<{}}  {}\n", "cell", "0" + std::string(kWidth - 2, ' ') + "1", kWidth,
                                "value");
  for (const auto& c : curve.cells) {
    const auto label = fmt::format("w={} n={} D={}", kvtext::format_real(c.w_match), c.cohort_size, c.duration_days);
    out += fmt::format("{:>28}  |{}|  power {:.3f} +/- {:.3f}\n", label, bar(c.power(), '#'), c.power(),
                       c.power_se());
    out += fmt::format("{:>28}  |{}|  fpr   {:.3f} +/- {:.3f}\n", "", bar(c.false_positive_rate(), '.'),
                       c.false_positive_rate(), c.false_positive_se());
  }
  return out;
}

}  // namespace dsaudit
