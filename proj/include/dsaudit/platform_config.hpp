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

#ifndef DSAUDIT_PLATFORM_CONFIG_HPP_
#define DSAUDIT_PLATFORM_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dsaudit {

// How the simulator treats users who selected the non-profiling option.
struct NonprofilingHonor {
  enum class Mode { full, partial, none };
  Mode mode = Mode::full;
  double rho = 0.0;  // partial: profiling weight multiplier, in (0, 1)

  // Multiplier applied to the profiling weight for opted-out users.
  double weight_factor() const {
    switch (mode) {
      case Mode::full: return 0.0;
      case Mode::partial: return rho;
      case Mode::none: return 1.0;
    }
    return 1.0;
  }
  std::string to_string() const;
  bool operator==(const NonprofilingHonor&) const = default;
};

struct ConfigMutation {
  std::string field;
  std::string value;

  bool operator==(const ConfigMutation&) const = default;
};

struct DriftEvent {
  int day = 1;
  std::vector<ConfigMutation> mutations;  // applied in listed order

  bool operator==(const DriftEvent&) const = default;
};

struct PlatformConfig {
  int catalog_size = 300;
  int ad_inventory_size = 60;
  std::vector<std::string> taxonomy = {"beauty", "gaming", "fitness"};
  std::vector<std::string> sensitive_categories = {"health", "religion"};
  double content_sensitive_fraction = 0.2;
  double ad_sensitive_fraction = 0.2;
  double ad_slot_rate = 0.2;
  double interest_learning_rate = 0.2;
  double profiling_weight = 3.0;
  double base_score = 1.0;
  bool minor_ad_profiling = false;
  NonprofilingHonor honor_nonprofiling_option;
  bool sensitive_targeting_enabled = false;
  bool age_inference_enabled = false;
  std::string minor_skewed_topic = "gaming";
  int feed_size = 10;
  std::uint64_t seed = 0;
  std::vector<DriftEvent> drift_events;

  bool operator==(const PlatformConfig&) const = default;
};

// Age inference: a user counts as a minor once more than this share of their
// last kAgeInferenceWindow watches carried the minor-skewed topic.
inline constexpr int kAgeInferenceWindow = 50;
inline constexpr double kAgeInferenceShare = 0.6;

PlatformConfig parse_platform_config(std::string_view text);
std::string serialize_platform_config(const PlatformConfig& config);

// Empty when every invariant holds. Drift days are checked against
// `duration_days` when it is positive.
std::vector<std::string> check_platform_config(const PlatformConfig& config, int duration_days = 0);

// Fields a drift event may change.
bool is_drift_mutable(std::string_view field);
// Throws ParseError when the field is unknown, immutable or the value is malformed.
void apply_mutation(PlatformConfig& config, const ConfigMutation& mutation);

nlohmann::json platform_config_to_json(const PlatformConfig& config);
std::string platform_config_hash(const PlatformConfig& config);

}  // namespace dsaudit

#endif  // DSAUDIT_PLATFORM_CONFIG_HPP_
