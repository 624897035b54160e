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

#include "dsaudit/simplatform.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsaudit/errors.hpp"

namespace dsaudit {

std::string_view to_string(SlotKind k) { return k == SlotKind::content ? "content" : "ad"; }

namespace {

int id_width(int n) {
  int digits = 1;
  for (int v = std::max(n - 1, 0); v >= 10; v /= 10) ++digits;
  return std::max(4, digits);
}

// Topics round-robin over the taxonomy; a seeded subset of each topic's items
// carries one sensitive tag, categories assigned round-robin.
std::vector<CatalogItem> build_items(char prefix, int n, int n_topics, int n_categories, double tagged_fraction,
                                     std::uint64_t seed) {
  std::vector<CatalogItem> items(static_cast<std::size_t>(n));
  const int width = id_width(n);
  for (int i = 0; i < n; ++i) {
    auto& item = items[static_cast<std::size_t>(i)];
    item.item_id = fmt::format("{}{:0{}d}", prefix, i, width);
    item.topics = {i % n_topics};
  }
  if (n_categories == 0) return items;
  const long n_tagged = std::lround(tagged_fraction * n);
  int category = 0;
  for (int t = 0; t < n_topics; ++t) {
    std::vector<int> members;
    for (int i = t; i < n; i += n_topics) members.push_back(i);
    const long quota = n_tagged / n_topics + (t < n_tagged % n_topics ? 1 : 0);
    Rng rng(derive_seed(seed, std::string_view(&prefix, 1), "tags", static_cast<std::uint64_t>(t)));
    rng.shuffle(std::span<int>(members));
    const auto take = std::min<std::size_t>(members.size(), static_cast<std::size_t>(quota));
    for (std::size_t j = 0; j < take; ++j) {
      items[static_cast<std::size_t>(members[j])].tags = {category};
      category = (category + 1) % n_categories;
    }
  }
  return items;
}

}  // namespace

SimPlatform::SimPlatform(PlatformConfig config) : initial_config_(std::move(config)) {
  const auto problems = check_platform_config(initial_config_);
  if (!problems.empty()) {
    std::string msg = "invalid platform config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(msg);
  }
  config_ = initial_config_;
  identity_ = platform_config_hash(initial_config_);
  const int n_topics = static_cast<int>(config_.taxonomy.size());
  const int n_categories = static_cast<int>(config_.sensitive_categories.size());
  content_ = build_items('c', config_.catalog_size, n_topics, n_categories, config_.content_sensitive_fraction,
                         config_.seed);
  ads_ = build_items('a', config_.ad_inventory_size, n_topics, n_categories, config_.ad_sensitive_fraction,
                     config_.seed);
  for (std::size_t i = 0; i < content_.size(); ++i) {
    content_views_.push_back(view(content_[i]));
    item_index_.emplace(content_[i].item_id, std::pair{SlotKind::content, i});
  }
  for (std::size_t i = 0; i < ads_.size(); ++i) {
    ad_views_.push_back(view(ads_[i]));
    item_index_.emplace(ads_[i].item_id, std::pair{SlotKind::ad, i});
  }
  for (const auto& ev : config_.drift_events)
    if (ev.day == 1)
      for (const auto& m : ev.mutations) apply_mutation(config_, m);
  skewed_topic_ = static_cast<int>(
      std::find(config_.taxonomy.begin(), config_.taxonomy.end(), config_.minor_skewed_topic) -
      config_.taxonomy.begin());
}

std::unique_ptr<SimPlatform> create_platform(const PlatformConfig& config) {
  return std::make_unique<SimPlatform>(config);
}

AdapterCapabilities SimPlatform::capabilities() const {
  return {.supports_deterministic_replay = true, .supports_day_advance = true, .feed_size = config_.feed_size};
}

std::string SimPlatform::identity() const { return identity_; }

ItemView SimPlatform::view(const CatalogItem& item) const {
  ItemView v;
  v.item_id = item.item_id;
  for (int t : item.topics) v.topics.push_back(config_.taxonomy[static_cast<std::size_t>(t)]);
  for (int s : item.tags) v.sensitive_tags.push_back(config_.sensitive_categories[static_cast<std::size_t>(s)]);
  return v;
}

SimPlatform::User& SimPlatform::user(std::string_view user_id) {
  auto it = user_index_.find(std::string(user_id));
  if (it == user_index_.end()) throw Error(fmt::format("unknown user '{}'", user_id));
  return users_[it->second];
}

const SimPlatform::User& SimPlatform::user(std::string_view user_id) const {
  auto it = user_index_.find(std::string(user_id));
  if (it == user_index_.end()) throw Error(fmt::format("unknown user '{}'", user_id));
  return users_[it->second];
}

bool SimPlatform::is_minor(const User& u) const { return u.meta.inferred_minor; }

void SimPlatform::refresh_inferred_minor(User& u) const {
  bool minor = u.meta.declared_age < 18;
  if (!minor && config_.age_inference_enabled) {
    const auto skewed = std::count(u.recent_skewed.begin(), u.recent_skewed.end(), true);
    minor = static_cast<double>(skewed) / kAgeInferenceWindow > kAgeInferenceShare;
  }
  u.meta.inferred_minor = minor;
}

std::string SimPlatform::register_user(const DeclaredProfile& profile) {
  if (user_index_.contains(profile.user_id))
    throw Error(fmt::format("user '{}' is already registered", profile.user_id));
  User u{.meta = {},
         .interests = std::vector<double>(config_.taxonomy.size(), 0.0),
         .sensitive = std::vector<double>(config_.sensitive_categories.size(), 0.0),
         .recent_skewed = {},
         .rng = Rng(derive_seed(config_.seed, "feed", profile.user_id))};
  u.meta.user_id = profile.user_id;
  u.meta.declared_age = profile.declared_age;
  refresh_inferred_minor(u);
  user_index_.emplace(profile.user_id, users_.size());
  users_.push_back(std::move(u));
  return profile.user_id;
}

std::vector<ItemView> SimPlatform::search(std::string_view user_id, std::string_view topic) {
  (void)user(user_id);
  auto it = std::find(config_.taxonomy.begin(), config_.taxonomy.end(), topic);
  if (it == config_.taxonomy.end()) throw Error(fmt::format("unknown topic '{}'", topic));
  const int t = static_cast<int>(it - config_.taxonomy.begin());
  // Relevance 1/|topics|: single-topic items first. content_ is in item_id
  // order, so a stable sort leaves ties in ascending item_id.
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < content_.size(); ++i)
    if (std::find(content_[i].topics.begin(), content_[i].topics.end(), t) != content_[i].topics.end())
      hits.push_back(i);
  std::stable_sort(hits.begin(), hits.end(),
                   [&](std::size_t a, std::size_t b) { return content_[a].topics.size() < content_[b].topics.size(); });
  if (hits.size() > static_cast<std::size_t>(config_.feed_size)) hits.resize(static_cast<std::size_t>(config_.feed_size));
  std::vector<ItemView> out;
  out.reserve(hits.size());
  for (auto i : hits) out.push_back(content_views_[i]);
  return out;
}

void SimPlatform::watch(std::string_view user_id, std::string_view item_id) {
  User& u = user(user_id);
  auto it = item_index_.find(std::string(item_id));
  if (it == item_index_.end()) throw Error(fmt::format("unknown item '{}'", item_id));
  const CatalogItem& item = it->second.first == SlotKind::content ? content_[it->second.second] : ads_[it->second.second];
  const double lambda = config_.interest_learning_rate;
  for (auto& x : u.interests) x *= 1.0 - lambda;
  for (int t : item.topics) u.interests[static_cast<std::size_t>(t)] += lambda / static_cast<double>(item.topics.size());
  for (auto& x : u.sensitive) x *= 1.0 - lambda;
  for (int s : item.tags) u.sensitive[static_cast<std::size_t>(s)] += lambda / static_cast<double>(item.tags.size());
  ++u.meta.interaction_count;
  const bool skewed = std::find(item.topics.begin(), item.topics.end(), skewed_topic_) != item.topics.end();
  u.recent_skewed.push_back(skewed);
  if (u.recent_skewed.size() > static_cast<std::size_t>(kAgeInferenceWindow)) u.recent_skewed.pop_front();
  refresh_inferred_minor(u);
}

SimPlatform::Weights SimPlatform::weights(const User& u, SlotKind kind) const {
  double w = config_.profiling_weight;
  if (u.meta.nonprofiling_selected) w *= config_.honor_nonprofiling_option.weight_factor();
  if (kind == SlotKind::content) return {w, 0.0};
  if (!config_.minor_ad_profiling && is_minor(u)) w = 0.0;
  return {w, config_.sensitive_targeting_enabled ? w : 0.0};
}

void SimPlatform::fill_cdf(const User& u, SlotKind kind, std::vector<double>& cdf) const {
  const auto& items = kind == SlotKind::content ? content_ : ads_;
  const Weights w = weights(u, kind);
  cdf.resize(items.size());
  double max_score = -INFINITY;
  for (std::size_t i = 0; i < items.size(); ++i) {
    double score = config_.base_score;
    if (w.topic != 0.0)
      for (int t : items[i].topics) score += w.topic * u.interests[static_cast<std::size_t>(t)];
    if (w.sensitive != 0.0)
      for (int s : items[i].tags) score += w.sensitive * u.sensitive[static_cast<std::size_t>(s)];
    cdf[i] = score;
    max_score = std::max(max_score, score);
  }
  double acc = 0.0;
  for (auto& c : cdf) {
    acc += std::exp(c - max_score);
    c = acc;
  }
}

std::size_t SimPlatform::sample(const std::vector<double>& cdf, double u01) const {
  const double target = u01 * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<FeedSlot> SimPlatform::next_feed(std::string_view user_id, int k) {
  User& u = user(user_id);
  std::vector<double> content_cdf, ad_cdf;
  std::vector<FeedSlot> feed;
  feed.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int slot = 0; slot < k; ++slot) {
    const bool is_ad = u.rng.uniform01() < config_.ad_slot_rate;
    const double draw = u.rng.uniform01();
    if (is_ad) {
      if (ad_cdf.empty()) fill_cdf(u, SlotKind::ad, ad_cdf);
      feed.push_back({SlotKind::ad, ad_views_[sample(ad_cdf, draw)]});
    } else {
      if (content_cdf.empty()) fill_cdf(u, SlotKind::content, content_cdf);
      feed.push_back({SlotKind::content, content_views_[sample(content_cdf, draw)]});
    }
  }
  return feed;
}

void SimPlatform::set_recommender_option(std::string_view user_id, bool nonprofiling) {
  user(user_id).meta.nonprofiling_selected = nonprofiling;
}

int SimPlatform::advance_day() {
  ++day_;
  for (const auto& ev : initial_config_.drift_events)
    if (ev.day == day_)
      for (const auto& m : ev.mutations) apply_mutation(config_, m);
  skewed_topic_ = static_cast<int>(
      std::find(config_.taxonomy.begin(), config_.taxonomy.end(), config_.minor_skewed_topic) -
      config_.taxonomy.begin());
  for (auto& u : users_) refresh_inferred_minor(u);
  return day_;
}

PlatformUserState SimPlatform::user_state(std::string_view user_id) const {
  const User& u = user(user_id);
  PlatformUserState s = u.meta;
  for (std::size_t i = 0; i < u.interests.size(); ++i) s.interest_vector[config_.taxonomy[i]] = u.interests[i];
  for (std::size_t i = 0; i < u.sensitive.size(); ++i)
    s.sensitive_vector[config_.sensitive_categories[i]] = u.sensitive[i];
  return s;
}

std::vector<double> SimPlatform::slot_distribution(std::string_view user_id, SlotKind kind) const {
  std::vector<double> cdf;
  fill_cdf(user(user_id), kind, cdf);
  std::vector<double> p(cdf.size());
  const double total = cdf.back();
  double prev = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    p[i] = (cdf[i] - prev) / total;
    prev = cdf[i];
  }
  return p;
}

}  // namespace dsaudit
