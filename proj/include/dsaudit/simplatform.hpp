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

// A deterministic simulated platform with known ground truth.
//
// Users carry an interest vector over the taxonomy and a sensitive vector over
// the sensitive categories; both follow an exponential moving average of the
// watched items' (normalized) indicators:
//
//   v <- (1 - lambda) * v + lambda * onehot(item) / |onehot(item)|
//
// Every watch updates both vectors, so a watch of an untagged item decays the
// sensitive vector. Feed slots are content or ad (ad with probability
// ad_slot_rate); each is softmax-sampled from
//
//   score(item) = base + w_topic * (v . topics(item)) + w_sens * (s . tags(item))
//
// where w_sens is non-zero only for ads with sensitive targeting enabled, and
// the weights collapse to zero (or are scaled) for shielded minors and for
// users who opted out of profiling. Every user has an independent generator
// stream derived from (config seed, user id), so a user's feed sequence does
// not depend on what other users do.

#ifndef DSAUDIT_SIMPLATFORM_HPP_
#define DSAUDIT_SIMPLATFORM_HPP_

#include <deque>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsaudit/adapter.hpp"
#include "dsaudit/platform_config.hpp"
#include "dsaudit/rng.hpp"

namespace dsaudit {

struct CatalogItem {
  std::string item_id;
  std::vector<int> topics;  // indices into the taxonomy
  std::vector<int> tags;    // indices into sensitive_categories
};

struct PlatformUserState {
  std::string user_id;
  int declared_age = 0;
  bool inferred_minor = false;
  std::map<std::string, double> interest_vector;
  std::map<std::string, double> sensitive_vector;
  bool nonprofiling_selected = false;
  std::int64_t interaction_count = 0;
};

class SimPlatform final : public PlatformAdapter {
 public:
  // Throws Error listing every violated config invariant.
  explicit SimPlatform(PlatformConfig config);

  AdapterCapabilities capabilities() const override;
  std::string identity() const override;
  std::string register_user(const DeclaredProfile& profile) override;
  std::vector<ItemView> search(std::string_view user_id, std::string_view topic) override;
  void watch(std::string_view user_id, std::string_view item_id) override;
  std::vector<FeedSlot> next_feed(std::string_view user_id, int k) override;
  void set_recommender_option(std::string_view user_id, bool nonprofiling) override;
  int advance_day() override;

  int day() const { return day_; }
  // The configuration as of the current day, drift applied.
  const PlatformConfig& config() const { return config_; }
  const std::vector<CatalogItem>& catalog() const { return content_; }
  const std::vector<CatalogItem>& ad_inventory() const { return ads_; }
  ItemView view(const CatalogItem& item) const;

  PlatformUserState user_state(std::string_view user_id) const;
  // Probability of each content item (kind = content) or ad (kind = ad) for
  // the user's next slot of that kind, in catalog order.
  std::vector<double> slot_distribution(std::string_view user_id, SlotKind kind) const;

 private:
  struct User {
    PlatformUserState meta;
    std::vector<double> interests;
    std::vector<double> sensitive;
    std::deque<bool> recent_skewed;  // last kAgeInferenceWindow watches
    Rng rng;
  };

  struct Weights {
    double topic = 0.0;
    double sensitive = 0.0;
  };

  User& user(std::string_view user_id);
  const User& user(std::string_view user_id) const;
  bool is_minor(const User& u) const;
  void refresh_inferred_minor(User& u) const;
  Weights weights(const User& u, SlotKind kind) const;
  void fill_cdf(const User& u, SlotKind kind, std::vector<double>& cdf) const;
  std::size_t sample(const std::vector<double>& cdf, double u01) const;

  PlatformConfig initial_config_;
  PlatformConfig config_;
  std::string identity_;
  int day_ = 1;
  std::vector<CatalogItem> content_;
  std::vector<CatalogItem> ads_;
  std::vector<ItemView> content_views_;
  std::vector<ItemView> ad_views_;
  std::unordered_map<std::string, std::pair<SlotKind, std::size_t>> item_index_;
  std::unordered_map<std::string, std::size_t> user_index_;
  std::vector<User> users_;
  int skewed_topic_ = 0;
};

std::unique_ptr<SimPlatform> create_platform(const PlatformConfig& config);

}  // namespace dsaudit

#endif  // DSAUDIT_SIMPLATFORM_HPP_
