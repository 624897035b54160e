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

#include "dsaudit/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dsaudit/errors.hpp"
#include "dsaudit/rng.hpp"

namespace dsaudit {

std::string_view to_string(TestMethod m) {
  switch (m) {
    case TestMethod::permutation: return "permutation";
    case TestMethod::exact_permutation: return "exact_permutation";
    case TestMethod::two_proportion: return "two_proportion";
  }
  return "?";
}

std::string_view to_string(Sidedness s) {
  switch (s) {
    case Sidedness::one_sided_lower: return "one_sided_lower";
    case Sidedness::one_sided_upper: return "one_sided_upper";
    case Sidedness::two_sided: return "two_sided";
  }
  return "?";
}

std::optional<TestMethod> test_method_from_string(std::string_view s) {
  for (auto m : {TestMethod::permutation, TestMethod::exact_permutation, TestMethod::two_proportion})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

std::optional<Sidedness> sidedness_from_string(std::string_view s) {
  for (auto v : {Sidedness::one_sided_lower, Sidedness::one_sided_upper, Sidedness::two_sided})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Comparisons against the observed statistic use a tolerance relative to the
// data scale, so that ties survive rounding and rescaling the data by a
// positive constant cannot change which resamples count as extreme.
double tie_tolerance(std::span<const double> a, std::span<const double> b = {}) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  for (double v : b) m = std::max(m, std::abs(v));
  return 1e-9 * m;
}

class ExtremeCounter {
 public:
  ExtremeCounter(double observed, double tol, Sidedness side)
      : observed_(observed), tol_(tol), side_(side) {}

  void add(double t) {
    switch (side_) {
      case Sidedness::one_sided_lower: count_ += t <= observed_ + tol_; break;
      case Sidedness::one_sided_upper: count_ += t >= observed_ - tol_; break;
      case Sidedness::two_sided: count_ += std::abs(t) >= std::abs(observed_) - tol_; break;
    }
  }
  std::int64_t count() const { return count_; }

 private:
  double observed_;
  double tol_;
  Sidedness side_;
  std::int64_t count_ = 0;
};

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void require_non_empty(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw StatsError("permutation test needs two non-empty samples");
}

}  // namespace

TestResult permutation_test(std::span<const double> xs, std::span<const double> ys,
                            std::int64_t n_resamples, std::uint64_t seed, Sidedness sidedness) {
  require_non_empty(xs, ys);
  if (n_resamples < 1) throw StatsError("n_resamples must be positive");
  const std::size_t nx = xs.size();
  const std::size_t n = nx + ys.size();
  std::vector<double> pooled(xs.begin(), xs.end());
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  const double total = std::accumulate(pooled.begin(), pooled.end(), 0.0);
  const double inv_x = 1.0 / static_cast<double>(nx);
  const double inv_y = 1.0 / static_cast<double>(ys.size());
  auto stat_of_sum = [&](double sum_x) { return sum_x * inv_x - (total - sum_x) * inv_y; };

  const double observed = mean(xs) - mean(ys);
  ExtremeCounter counter(observed, tie_tolerance(xs, ys), sidedness);
  Rng rng(seed);
  for (std::int64_t r = 0; r < n_resamples; ++r) {
    double sum_x = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                              static_cast<std::int64_t>(n - 1)));
      std::swap(pooled[i], pooled[j]);
      sum_x += pooled[i];
    }
    counter.add(stat_of_sum(sum_x));
  }
  TestResult out;
  out.method = TestMethod::permutation;
  out.statistic = observed;
  out.effect_size = observed;
  out.p_value = static_cast<double>(counter.count() + 1) / static_cast<double>(n_resamples + 1);
  out.n_resamples_used = n_resamples;
  out.sidedness = sidedness;
  return out;
}

TestResult exact_permutation_test(std::span<const double> xs, std::span<const double> ys,
                                  Sidedness sidedness) {
  require_non_empty(xs, ys);
  const std::size_t nx = xs.size();
  const std::size_t n = nx + ys.size();
  if (n > kExactEnumerationLimit)
    throw StatsError(fmt::format("exact permutation test limited to {} observations, got {}",
                                 kExactEnumerationLimit, n));
  std::vector<double> pooled(xs.begin(), xs.end());
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  const double total = std::accumulate(pooled.begin(), pooled.end(), 0.0);
  const double inv_x = 1.0 / static_cast<double>(nx);
  const double inv_y = 1.0 / static_cast<double>(ys.size());

  const double observed = mean(xs) - mean(ys);
  ExtremeCounter counter(observed, tie_tolerance(xs, ys), sidedness);
  std::int64_t assignments = 0;

  // Depth-first over index combinations, carrying the partial sum.
  auto recurse = [&](auto&& self, std::size_t start, std::size_t chosen, double sum) -> void {
    if (chosen == nx) {
      counter.add(sum * inv_x - (total - sum) * inv_y);
      ++assignments;
      return;
    }
    for (std::size_t i = start; i + (nx - chosen) <= n; ++i)
      self(self, i + 1, chosen + 1, sum + pooled[i]);
  };
  recurse(recurse, 0, 0, 0.0);

  TestResult out;
  out.method = TestMethod::exact_permutation;
  out.statistic = observed;
  out.effect_size = observed;
  out.p_value = static_cast<double>(counter.count()) / static_cast<double>(assignments);
  out.n_resamples_used = assignments;
  out.sidedness = sidedness;
  return out;
}

TestResult sign_flip_test(std::span<const double> diffs, std::int64_t n_resamples,
                          std::uint64_t seed, Sidedness sidedness) {
  if (diffs.empty()) throw StatsError("sign-flip test needs at least one paired difference");
  if (n_resamples < 1) throw StatsError("n_resamples must be positive");
  const double observed = mean(diffs);
  const double inv_n = 1.0 / static_cast<double>(diffs.size());
  ExtremeCounter counter(observed, tie_tolerance(diffs), sidedness);
  Rng rng(seed);
  for (std::int64_t r = 0; r < n_resamples; ++r) {
    double sum = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      if (i % 64 == 0) bits = rng.next();
      sum += (bits & 1) ? diffs[i] : -diffs[i];
      bits >>= 1;
    }
    counter.add(sum * inv_n);
  }
  TestResult out;
  out.method = TestMethod::permutation;
  out.statistic = observed;
  out.effect_size = observed;
  out.p_value = static_cast<double>(counter.count() + 1) / static_cast<double>(n_resamples + 1);
  out.n_resamples_used = n_resamples;
  out.sidedness = sidedness;
  return out;
}

TestResult exact_sign_flip_test(std::span<const double> diffs, Sidedness sidedness) {
  if (diffs.empty()) throw StatsError("sign-flip test needs at least one paired difference");
  if (diffs.size() > kExactEnumerationLimit)
    throw StatsError(fmt::format("exact sign-flip test limited to {} pairs, got {}",
                                 kExactEnumerationLimit, diffs.size()));
  const double observed = mean(diffs);
  const double inv_n = 1.0 / static_cast<double>(diffs.size());
  ExtremeCounter counter(observed, tie_tolerance(diffs), sidedness);
  const std::uint64_t masks = std::uint64_t{1} << diffs.size();
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i) sum += ((mask >> i) & 1) ? -diffs[i] : diffs[i];
    counter.add(sum * inv_n);
  }
  TestResult out;
  out.method = TestMethod::exact_permutation;
  out.statistic = observed;
  out.effect_size = observed;
  out.p_value = static_cast<double>(counter.count()) / static_cast<double>(masks);
  out.n_resamples_used = static_cast<std::int64_t>(masks);
  out.sidedness = sidedness;
  return out;
}

namespace {

double z_p_value(double z, Sidedness sidedness) {
  switch (sidedness) {
    case Sidedness::one_sided_lower: return normal_cdf(z);
    case Sidedness::one_sided_upper: return normal_cdf(-z);
    case Sidedness::two_sided: return std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
  }
  return 1.0;
}

void check_count(std::int64_t k, std::int64_t n) {
  if (n <= 0) throw StatsError("proportion test needs a positive denominator");
  if (k < 0 || k > n) throw StatsError(fmt::format("count {} outside [0, {}]", k, n));
}

}  // namespace

TestResult two_proportion_test(std::int64_t k1, std::int64_t n1, std::int64_t k2, std::int64_t n2,
                               Sidedness sidedness) {
  check_count(k1, n1);
  check_count(k2, n2);
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  const double z = se > 0.0 ? (p1 - p2) / se : 0.0;
  TestResult out;
  out.method = TestMethod::two_proportion;
  out.statistic = z;
  out.effect_size = p1 - p2;
  out.p_value = z_p_value(z, sidedness);
  out.sidedness = sidedness;
  return out;
}

TestResult one_proportion_test(std::int64_t k, std::int64_t n, double p0, Sidedness sidedness) {
  check_count(k, n);
  const double p = static_cast<double>(k) / static_cast<double>(n);
  const double se = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
  double z = 0.0;
  if (se > 0.0) {
    z = (p - p0) / se;
  } else if (p != p0) {
    z = p > p0 ? INFINITY : -INFINITY;
  }
  TestResult out;
  out.method = TestMethod::two_proportion;
  out.statistic = z;
  out.effect_size = p - p0;
  out.p_value = z_p_value(z, sidedness);
  out.sidedness = sidedness;
  return out;
}

}  // namespace dsaudit
