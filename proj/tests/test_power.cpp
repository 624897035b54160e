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

#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"
#include "dsaudit/errors.hpp"
#include "support.hpp"

using namespace dsaudit;

namespace {

SweepGrid grid(std::vector<double> w, std::vector<int> sizes, std::vector<int> days) {
  SweepGrid g;
  g.w_match = std::move(w);
  g.cohort_size = std::move(sizes);
  g.duration_days = std::move(days);
  g.violating_platform = "v";
  g.compliant_platform = "c";
  return g;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_SUITE("power") {

TEST_CASE("grid files parse") {
  const auto g = parse_sweep_grid(testing::read_text(testing::source_path("grids/sensitive_w_match.grid")));
  CHECK(g.w_match == std::vector<double>{0, 1, 2, 3});
  CHECK(g.cohort_size == std::vector<int>{30});
  CHECK(g.duration_days == std::vector<int>{20});
  CHECK(g.violating_platform == "../presets/sensitive_targeting.platform");
  CHECK(g.compliant_platform == "../presets/compliant.platform");
  CHECK_THROWS_AS(parse_sweep_grid("violating = a\ncompliant = b\n"), ParseError);
  CHECK_THROWS_AS(parse_sweep_grid("w_match = 1\ncompliant = b\n"), ParseError);
  CHECK_THROWS_AS(parse_sweep_grid("w_match = -1\nviolating = a\ncompliant = b\n"), ParseError);
  CHECK_THROWS_AS(parse_sweep_grid("w_match = 1\ncohort_size = 0\nviolating = a\ncompliant = b\n"), ParseError);
  CHECK_THROWS_AS(parse_sweep_grid("w_match = 1\nviolating = a\ncompliant = b\nruns = 3\n"), ParseError);
}

TEST_CASE("one cell, one run gives a one-row table") {
  const AuditPlan plan = testing::load_plan("scenarios/minors_profiling.plan");
  const auto curve = power_sweep(plan, testing::load_preset("noncompliant_minors"), testing::load_preset("compliant"),
                                 grid({3.0}, {10}, {5}), 1, 1, 1);
  REQUIRE(curve.cells.size() == 1);
  const auto& c = curve.cells[0];
  CHECK(c.runs == 1);
  CHECK(c.cohort_size == 10);
  CHECK(c.duration_days == 5);
  CHECK(c.w_match == 3.0);
  const auto csv = power_curve_csv(curve);
  CHECK(count_lines(csv) == 2);
  CHECK(csv.rfind("w_match,cohort_size,duration_days,runs,power", 0) == 0);
  CHECK(count_lines(power_curve_plot(curve)) == 3);
}

TEST_CASE("without profiling the two platforms behave alike") {
  // Sensitive targeting scales with the profiling weight, so at w = 0 the
  // violating platform serves exactly what the compliant one does.
  const AuditPlan plan = testing::load_plan("scenarios/sensitive_targeting.plan");
  const auto curve = power_sweep(plan, testing::load_preset("sensitive_targeting"), testing::load_preset("compliant"),
                                 grid({0.0}, {10}, {6}), 6, 5, 2);
  REQUIRE(curve.cells.size() == 1);
  CHECK(curve.cells[0].power() == curve.cells[0].false_positive_rate());
  CHECK(curve.cells[0].discrimination() == 0.0);
}

TEST_CASE("results do not depend on the thread count") {
  const AuditPlan plan = testing::load_plan("scenarios/minors_profiling.plan");
  const auto g = grid({0.0, 3.0}, {4, 6}, {3});
  const auto v = testing::load_preset("noncompliant_minors");
  const auto c = testing::load_preset("compliant");
  const auto one = power_sweep(plan, v, c, g, 3, 9, 1);
  const auto four = power_sweep(plan, v, c, g, 3, 9, 4);
  CHECK(power_curve_csv(one) == power_curve_csv(four));
  REQUIRE(one.cells.size() == 4);
  CHECK(one.cells[1].w_match == 0.0);
  CHECK(one.cells[1].cohort_size == 6);
  CHECK(one.cells[2].w_match == 3.0);
}

TEST_CASE("invalid cells are rejected before running") {
  const AuditPlan plan = testing::load_plan("scenarios/control_effectiveness.plan");
  const auto p = testing::load_preset("compliant");
  CHECK_THROWS_AS(power_sweep(plan, p, p, grid({1.0}, {}, {1}), 1, 1, 1), Error);
  CHECK_THROWS_AS(power_sweep(plan, p, p, grid({1.0}, {}, {}), 0, 1, 1), Error);
}

TEST_CASE("standard errors follow the binomial formula") {
  PowerCell c;
  c.runs = 50;
  c.violating_flagged = 40;
  c.compliant_flagged = 5;
  CHECK(c.power() == 0.8);
  CHECK(c.power_se() == doctest::Approx(std::sqrt(0.8 * 0.2 / 50)));
  CHECK(c.false_positive_rate() == 0.1);
  CHECK(c.discrimination() == doctest::Approx(0.7));
}

}  // TEST_SUITE
