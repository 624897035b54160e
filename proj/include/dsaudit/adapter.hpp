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

// The contract between the bot executor and an audited platform. The
// in-process simulator implements it; drivers for real platforms live out of
// tree and implement the same interface.

#ifndef DSAUDIT_ADAPTER_HPP_
#define DSAUDIT_ADAPTER_HPP_

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dsaudit/scenario.hpp"

namespace dsaudit {

enum class SlotKind { content, ad };

std::string_view to_string(SlotKind k);

struct AdapterCapabilities {
  bool supports_deterministic_replay = false;
  bool supports_day_advance = false;
  int feed_size = 10;
};

// What the platform is told about a user at sign-up.
struct DeclaredProfile {
  std::string user_id;
  int declared_age = 0;
  Gender gender = Gender::unspecified;
  std::string location;
};

struct ItemView {
  std::string item_id;
  std::vector<std::string> topics;
  std::vector<std::string> sensitive_tags;
};

struct FeedSlot {
  SlotKind kind = SlotKind::content;
  ItemView item;
};

class PlatformAdapter {
 public:
  virtual ~PlatformAdapter() = default;

  virtual AdapterCapabilities capabilities() const = 0;
  // Stable identity bound into log headers: a config hash for simulators, a
  // driver name/version string for real platforms.
  virtual std::string identity() const = 0;

  // Returns the platform-side user id.
  virtual std::string register_user(const DeclaredProfile& profile) = 0;
  virtual std::vector<ItemView> search(std::string_view user_id, std::string_view topic) = 0;
  virtual void watch(std::string_view user_id, std::string_view item_id) = 0;
  virtual std::vector<FeedSlot> next_feed(std::string_view user_id, int k) = 0;
  virtual void set_recommender_option(std::string_view user_id, bool nonprofiling) = 0;
  // Returns the new logical day.
  virtual int advance_day() = 0;
};

using AdapterFactory = std::function<std::unique_ptr<PlatformAdapter>()>;

}  // namespace dsaudit

#endif  // DSAUDIT_ADAPTER_HPP_
