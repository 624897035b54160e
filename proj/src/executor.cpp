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

#include "dsaudit/executor.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>

#include "dsaudit/errors.hpp"

namespace dsaudit {

namespace {

bool contains(const std::vector<std::string>& values, const std::string& v) {
  return std::find(values.begin(), values.end(), v) != values.end();
}

template <typename F>
auto call_adapter(std::string_view context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const AdapterError&) {
    throw;
  } catch (const std::exception& e) {
    throw AdapterError(fmt::format("{}: {}", context, e.what()));
  }
}

std::string session_context(const BotState& bot, const ScheduleEntry& entry) {
  return fmt::format("user {} day {} session {}", bot.profile.user_id, entry.day, entry.session_index);
}

}  // namespace

BotState::BotState(UserProfile p, std::string platform_id, std::uint64_t run_seed)
    : profile(std::move(p)),
      platform_user_id(std::move(platform_id)),
      rng(derive_seed(run_seed, "bot", profile.user_id)) {}

bool matches_interest(const UserProfile& profile, const ItemView& item) {
  return std::any_of(item.topics.begin(), item.topics.end(),
                     [&](const std::string& t) { return contains(profile.interests, t); });
}

bool matches_sensitive(const UserProfile& profile, const ItemView& item) {
  return profile.sensitive_interest && contains(item.sensitive_tags, *profile.sensitive_interest);
}

bool wants_item(const UserProfile& profile, const ItemView& item) {
  if (!matches_interest(profile, item)) return false;
  return !profile.sensitive_interest || matches_sensitive(profile, item);
}

AuditPlan effective_plan(const AuditPlan& plan, std::uint64_t seed) {
  AuditPlan p = plan;
  p.seed = seed;
  p.seed_specified = true;
  return p;
}

std::vector<UserProfile> audit_profiles(const AuditPlan& plan, std::uint64_t seed) {
  return generate_cohorts(effective_plan(plan, seed));
}

std::string make_run_id(const std::string& plan_hash, const std::string& platform_hash, std::uint64_t seed) {
  return fmt::format("{:016x}", derive_seed(seed, "run", plan_hash, platform_hash));
}

std::vector<Impression> run_session(PlatformAdapter& adapter, BotState& bot, const ScheduleEntry& entry) {
  const int k = adapter.capabilities().feed_size;
  const std::string ctx = session_context(bot, entry);
  std::vector<Impression> out;
  int watches = 0;
  int feeds = 0;
  int slot_index = 0;
  while (watches < entry.budget && feeds < entry.budget) {
    const auto feed = call_adapter(ctx, [&] { return adapter.next_feed(bot.platform_user_id, k); });
    ++feeds;
    ++bot.feeds;
    for (const auto& slot : feed) {
      Impression r;
      r.user_id = bot.profile.user_id;
      r.cohort_label = bot.profile.cohort_label;
      r.day = entry.day;
      r.session_index = entry.session_index;
      r.slot_index = ++slot_index;
      r.kind = slot.kind;
      r.item_id = slot.item.item_id;
      r.item_topics = slot.item.topics;
      r.sensitive_tags = slot.item.sensitive_tags;
      r.matched_interest = matches_interest(bot.profile, slot.item);
      r.matched_sensitive = matches_sensitive(bot.profile, slot.item);
      if (slot.kind == SlotKind::content && watches < entry.budget && wants_item(bot.profile, slot.item) &&
          bot.rng.bernoulli(bot.profile.engage_probability)) {
        call_adapter(ctx, [&] { adapter.watch(bot.platform_user_id, slot.item.item_id); });
        r.watched = true;
        ++watches;
        ++bot.watches;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

ExposureLog run_audit(const AuditPlan& plan, PlatformAdapter& adapter, std::uint64_t seed, std::ostream* stream) {
  const auto caps = adapter.capabilities();
  if (plan.duration_days > 1 && !caps.supports_day_advance)
    throw CapabilityError("plan spans several days but the adapter cannot advance days");
  if (caps.feed_size <= 0) throw CapabilityError("adapter reports a non-positive feed size");

  const AuditPlan eff = effective_plan(plan, seed);
  const auto profiles = generate_cohorts(eff);
  const auto schedules = build_schedules(eff, profiles);

  ExposureLog log;
  auto& h = log.header;
  h.plan_hash = plan_hash(plan);
  h.platform_hash = adapter.identity();
  h.profiles_hash = profiles_hash(profiles);
  h.seed = seed;
  h.run_id = make_run_id(h.plan_hash, h.platform_hash, seed);
  h.case_selector = std::string(to_string(plan.case_selector));
  h.duration_days = plan.duration_days;
  h.toggle_day = plan.toggle_day();
  if (stream) *stream << header_to_line(h) << '\n';

  std::vector<BotState> bots;
  bots.reserve(profiles.size());
  for (const auto& p : profiles) {
    DeclaredProfile d{p.user_id, p.declared_age, p.gender, p.location};
    auto id = call_adapter(fmt::format("registering user {}", p.user_id), [&] { return adapter.register_user(d); });
    bots.emplace_back(p, std::move(id), seed);
  }

  for (auto& bot : bots) {
    const auto& interests = bot.profile.interests;
    const auto n = static_cast<int>(interests.size());
    const std::string ctx = fmt::format("bootstrapping user {}", bot.profile.user_id);
    for (int i = 0; i < plan.bootstrap_interactions; ++i) {
      const auto& topic = interests[static_cast<std::size_t>(i % n)];
      const auto results = call_adapter(ctx, [&] { return adapter.search(bot.platform_user_id, topic); });
      if (results.empty()) continue;
      std::vector<const ItemView*> wanted;
      for (const auto& item : results)
        if (wants_item(bot.profile, item)) wanted.push_back(&item);
      if (wanted.empty())
        for (const auto& item : results) wanted.push_back(&item);
      const auto& pick = *wanted[static_cast<std::size_t>(i / n) % wanted.size()];
      call_adapter(ctx, [&] { adapter.watch(bot.platform_user_id, pick.item_id); });
    }
  }

  // schedules[u].entries is sorted by (day, session); walk them in lockstep.
  std::vector<std::size_t> cursor(bots.size(), 0);
  std::uint64_t seq = 0;
  const int toggle_day = plan.toggle_day();
  for (int day = 1; day <= plan.duration_days; ++day) {
    if (day > 1) call_adapter(fmt::format("advancing to day {}", day), [&] { return adapter.advance_day(); });
    if (day == toggle_day)
      for (auto& bot : bots)
        call_adapter(fmt::format("user {} day {} toggle", bot.profile.user_id, day),
                     [&] { adapter.set_recommender_option(bot.platform_user_id, true); });
    for (int session = 1; session <= plan.sessions_per_day; ++session) {
      for (std::size_t u = 0; u < bots.size(); ++u) {
        const auto& entries = schedules[u].entries;
        while (cursor[u] < entries.size() && entries[cursor[u]].day == day &&
               entries[cursor[u]].session_index == session) {
          for (auto& r : run_session(adapter, bots[u], entries[cursor[u]])) {
            r.run_id = h.run_id;
            r.seq = seq++;
            if (stream) *stream << impression_to_line(r) << '\n';
            log.records.push_back(std::move(r));
          }
          ++cursor[u];
        }
      }
    }
  }
  return log;
}

ReplayResult replay_verify(const ExposureLog& log, const AuditPlan& plan, const AdapterFactory& factory) {
  const std::string ph = plan_hash(plan);
  if (ph != log.header.plan_hash)
    throw HashMismatch(fmt::format("plan hash {} does not match log header {}", ph, log.header.plan_hash));
  auto adapter = factory();
  if (!adapter->capabilities().supports_deterministic_replay)
    throw CapabilityError("adapter does not support deterministic replay");
  if (adapter->identity() != log.header.platform_hash)
    throw HashMismatch(fmt::format("platform identity {} does not match log header {}", adapter->identity(),
                                   log.header.platform_hash));

  const ExposureLog fresh = run_audit(plan, *adapter, log.header.seed);
  ReplayResult res;
  if (!(fresh.header == log.header)) {
    res.detail = fmt::format("header differs: expected {}, got {}", header_to_line(fresh.header),
                             header_to_line(log.header));
    return res;
  }
  const std::size_t n = std::min(fresh.records.size(), log.records.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(fresh.records[i] == log.records[i])) {
      res.first_divergent_seq = fresh.records[i].seq;
      res.detail = fmt::format("record {} differs", fresh.records[i].seq);
      return res;
    }
  }
  if (fresh.records.size() != log.records.size()) {
    res.first_divergent_seq = n;
    res.detail = fmt::format("log has {} records, replay produced {}", log.records.size(), fresh.records.size());
    return res;
  }
  res.identical = true;
  return res;
}

}  // namespace dsaudit
