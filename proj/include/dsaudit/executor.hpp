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

// Bot driver. run_audit walks the schedule in a fixed order (all users
// registered, then bootstrapped, then day by day, session by session,
// round-robin over users) and records every feed slot the adapter returns.
//
// Interaction policy: a bot watches a content item only when it "wants" it,
// with probability engage_probability. An item is wanted when its topics
// intersect the bot's interests and, for bots with a sensitive interest, it
// also carries that sensitive tag. Ads are logged and never clicked. A
// session ends after `budget` watches or `budget` feed requests, whichever
// comes first.

#ifndef DSAUDIT_EXECUTOR_HPP_
#define DSAUDIT_EXECUTOR_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsaudit/adapter.hpp"
#include "dsaudit/explog.hpp"
#include "dsaudit/rng.hpp"
#include "dsaudit/scenario.hpp"

namespace dsaudit {

struct BotState {
  UserProfile profile;
  std::string platform_user_id;
  Rng rng;
  std::int64_t watches = 0;
  std::int64_t feeds = 0;

  BotState(UserProfile p, std::string platform_id, std::uint64_t run_seed);
};

bool wants_item(const UserProfile& profile, const ItemView& item);
bool matches_interest(const UserProfile& profile, const ItemView& item);
bool matches_sensitive(const UserProfile& profile, const ItemView& item);

// The plan with its seed replaced by the run seed.
AuditPlan effective_plan(const AuditPlan& plan, std::uint64_t seed);
// Profiles as run_audit generates them for this seed.
std::vector<UserProfile> audit_profiles(const AuditPlan& plan, std::uint64_t seed);

std::string make_run_id(const std::string& plan_hash, const std::string& platform_hash, std::uint64_t seed);

// Records carry run_id and seq left empty; run_audit fills them in.
std::vector<Impression> run_session(PlatformAdapter& adapter, BotState& bot, const ScheduleEntry& entry);

// Throws CapabilityError when the adapter cannot serve the plan and
// AdapterError (with user/day/session context) when an adapter call fails.
// When `stream` is set, each line is written as soon as it is produced.
ExposureLog run_audit(const AuditPlan& plan, PlatformAdapter& adapter, std::uint64_t seed,
                      std::ostream* stream = nullptr);

struct ReplayResult {
  bool identical = false;
  std::optional<std::uint64_t> first_divergent_seq;
  std::string detail;
};

// Re-executes the run described by the log header against a fresh adapter.
// Throws HashMismatch when the plan or adapter identity differs from the
// header.
ReplayResult replay_verify(const ExposureLog& log, const AuditPlan& plan, const AdapterFactory& factory);

}  // namespace dsaudit

#endif  // DSAUDIT_EXECUTOR_HPP_
