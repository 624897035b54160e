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

// Two-sample tests used by the case evaluators.
//
// The statistic is always mean(xs) - mean(ys) (or mean(diffs) for the paired
// sign-flip variants). Sidedness refers to that statistic:
//   one_sided_lower  H1: statistic < 0
//   one_sided_upper  H1: statistic > 0
//   two_sided        H1: statistic != 0

#ifndef DSAUDIT_STATS_HPP_
#define DSAUDIT_STATS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace dsaudit {

enum class TestMethod { permutation, exact_permutation, two_proportion };
enum class Sidedness { one_sided_lower, one_sided_upper, two_sided };

std::string_view to_string(TestMethod m);
std::string_view to_string(Sidedness s);
std::optional<TestMethod> test_method_from_string(std::string_view s);
std::optional<Sidedness> sidedness_from_string(std::string_view s);

struct TestResult {
  TestMethod method = TestMethod::permutation;
  double statistic = 0.0;
  double p_value = 1.0;
  double effect_size = 0.0;
  std::int64_t n_resamples_used = 0;
  Sidedness sidedness = Sidedness::two_sided;

  bool operator==(const TestResult&) const = default;
};

// Largest combined sample the exact tests will enumerate.
inline constexpr std::size_t kExactEnumerationLimit = 20;

// Monte Carlo permutation test with add-one smoothing: p = (r + 1) / (R + 1),
// r counting resamples at least as extreme as the observed statistic.
TestResult permutation_test(std::span<const double> xs, std::span<const double> ys,
                            std::int64_t n_resamples, std::uint64_t seed, Sidedness sidedness);

// Exact p over all C(n, |xs|) label assignments, identity included.
TestResult exact_permutation_test(std::span<const double> xs, std::span<const double> ys,
                                  Sidedness sidedness);

// Paired variants: randomize the sign of each within-unit difference.
TestResult sign_flip_test(std::span<const double> diffs, std::int64_t n_resamples,
                          std::uint64_t seed, Sidedness sidedness);
TestResult exact_sign_flip_test(std::span<const double> diffs, Sidedness sidedness);

// Pooled two-proportion z test, normal approximation. statistic = z,
// effect_size = k1/n1 - k2/n2.
TestResult two_proportion_test(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2,
                               Sidedness sidedness);

// One-sample z test of k/n against p0.
TestResult one_proportion_test(std::int64_t k, std::int64_t n, double p0, Sidedness sidedness);

double normal_cdf(double z);

}  // namespace dsaudit

#endif  // DSAUDIT_STATS_HPP_
