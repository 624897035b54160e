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

#include "dsaudit/platform_config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "dsaudit/digest.hpp"
#include "dsaudit/errors.hpp"
#include "dsaudit/kvtext.hpp"

namespace dsaudit {

std::string NonprofilingHonor::to_string() const {
  switch (mode) {
    case Mode::full: return "full";
    case Mode::none: return "none";
    case Mode::partial: return fmt::format("partial({})", kvtext::format_real(rho));
  }
  return "?";
}

namespace {

using kvtext::Entry;
using Setter = std::function<void(PlatformConfig&, const Entry&)>;

int to_int32(const Entry& e) {
  const auto v = kvtext::to_int(e);
  if (v < INT32_MIN || v > INT32_MAX) kvtext::fail_value(e, "32-bit integer");
  return static_cast<int>(v);
}

NonprofilingHonor to_honor(const Entry& e) {
  NonprofilingHonor h;
  const std::string& s = e.value;
  if (s == "full") return h;
  if (s == "none") {
    h.mode = NonprofilingHonor::Mode::none;
    return h;
  }
  constexpr std::string_view prefix = "partial(";
  if (s.size() > prefix.size() + 1 && s.compare(0, prefix.size(), prefix) == 0 && s.back() == ')') {
    const std::string_view inner(s.data() + prefix.size(), s.size() - prefix.size() - 1);
    double rho = 0.0;
    auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), rho);
    if (ec == std::errc{} && ptr == inner.data() + inner.size()) {
      h.mode = NonprofilingHonor::Mode::partial;
      h.rho = rho;
      return h;
    }
  }
  kvtext::fail_value(e, "full, none or partial(<rho>)");
}

struct FieldSpec {
  Setter set;
  bool drift_mutable;
};

const std::map<std::string, FieldSpec, std::less<>>& field_table() {
  static const std::map<std::string, FieldSpec, std::less<>> table = {
      {"catalog_size", {[](PlatformConfig& c, const Entry& e) { c.catalog_size = to_int32(e); }, false}},
      {"ad_inventory_size", {[](PlatformConfig& c, const Entry& e) { c.ad_inventory_size = to_int32(e); }, false}},
      {"taxonomy", {[](PlatformConfig& c, const Entry& e) { c.taxonomy = kvtext::split_list(e.value); }, false}},
      {"sensitive_categories",
       {[](PlatformConfig& c, const Entry& e) { c.sensitive_categories = kvtext::split_list(e.value); }, false}},
      {"content_sensitive_fraction",
       {[](PlatformConfig& c, const Entry& e) { c.content_sensitive_fraction = kvtext::to_real(e); }, false}},
      {"ad_sensitive_fraction",
       {[](PlatformConfig& c, const Entry& e) { c.ad_sensitive_fraction = kvtext::to_real(e); }, false}},
      {"ad_slot_rate", {[](PlatformConfig& c, const Entry& e) { c.ad_slot_rate = kvtext::to_real(e); }, true}},
      {"interest_learning_rate",
       {[](PlatformConfig& c, const Entry& e) { c.interest_learning_rate = kvtext::to_real(e); }, true}},
      {"profiling_weight", {[](PlatformConfig& c, const Entry& e) { c.profiling_weight = kvtext::to_real(e); }, true}},
      {"base_score", {[](PlatformConfig& c, const Entry& e) { c.base_score = kvtext::to_real(e); }, true}},
      {"minor_ad_profiling", {[](PlatformConfig& c, const Entry& e) { c.minor_ad_profiling = kvtext::to_bool(e); }, true}},
      {"honor_nonprofiling_option",
       {[](PlatformConfig& c, const Entry& e) { c.honor_nonprofiling_option = to_honor(e); }, true}},
      {"sensitive_targeting_enabled",
       {[](PlatformConfig& c, const Entry& e) { c.sensitive_targeting_enabled = kvtext::to_bool(e); }, true}},
      {"age_inference_enabled",
       {[](PlatformConfig& c, const Entry& e) { c.age_inference_enabled = kvtext::to_bool(e); }, true}},
      {"minor_skewed_topic", {[](PlatformConfig& c, const Entry& e) { c.minor_skewed_topic = e.value; }, true}},
      {"feed_size", {[](PlatformConfig& c, const Entry& e) { c.feed_size = to_int32(e); }, false}},
      {"seed", {[](PlatformConfig& c, const Entry& e) { c.seed = kvtext::to_uint64(e); }, false}},
  };
  return table;
}

[[noreturn]] void unknown(const Entry& e, std::string_view where) {
  throw ParseError(ParseError::Kind::unknown_key, e.line, e.key_column, fmt::format("'{}'{}", e.key, where));
}

}  // namespace

bool is_drift_mutable(std::string_view field) {
  const auto& t = field_table();
  auto it = t.find(field);
  return it != t.end() && it->second.drift_mutable;
}

void apply_mutation(PlatformConfig& config, const ConfigMutation& mutation) {
  const auto& t = field_table();
  auto it = t.find(mutation.field);
  Entry e{mutation.field, mutation.value, 0, 0, 0};
  if (it == t.end()) unknown(e, " (not a platform config field)");
  if (!it->second.drift_mutable) unknown(e, " (not changeable by a drift event)");
  it->second.set(config, e);
}

PlatformConfig parse_platform_config(std::string_view text) {
  const kvtext::Document doc = kvtext::parse(text);
  PlatformConfig config;
  const auto& table = field_table();
  for (const Entry& e : doc.top.entries) {
    auto it = table.find(e.key);
    if (it == table.end()) unknown(e, "");
    it->second.set(config, e);
  }
  for (const auto& block : doc.blocks) {
    if (block.name != "drift")
      throw ParseError(ParseError::Kind::unknown_key, block.line, 1,
                       fmt::format("block [{}] (expected [drift])", block.name));
    DriftEvent event;
    bool has_day = false;
    for (const Entry& e : block.entries) {
      if (e.key == "day") {
        event.day = to_int32(e);
        has_day = true;
        continue;
      }
      auto it = table.find(e.key);
      if (it == table.end()) unknown(e, " in [drift] block");
      if (!it->second.drift_mutable) unknown(e, " (not changeable by a drift event)");
      PlatformConfig scratch = config;
      it->second.set(scratch, e);  // surfaces malformed values at parse time
      event.mutations.push_back({e.key, e.value});
    }
    if (!has_day)
      throw ParseError(ParseError::Kind::syntax, block.line, 1, "[drift] block needs a 'day' key");
    config.drift_events.push_back(std::move(event));
  }
  return config;
}

std::string serialize_platform_config(const PlatformConfig& c) {
  using kvtext::format_real;
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  line("catalog_size", std::to_string(c.catalog_size));
  line("ad_inventory_size", std::to_string(c.ad_inventory_size));
  line("taxonomy", kvtext::join_list(c.taxonomy));
  line("sensitive_categories", kvtext::join_list(c.sensitive_categories));
  line("content_sensitive_fraction", format_real(c.content_sensitive_fraction));
  line("ad_sensitive_fraction", format_real(c.ad_sensitive_fraction));
  line("ad_slot_rate", format_real(c.ad_slot_rate));
  line("interest_learning_rate", format_real(c.interest_learning_rate));
  line("profiling_weight", format_real(c.profiling_weight));
  line("base_score", format_real(c.base_score));
  line("minor_ad_profiling", c.minor_ad_profiling ? "true" : "false");
  line("honor_nonprofiling_option", c.honor_nonprofiling_option.to_string());
  line("sensitive_targeting_enabled", c.sensitive_targeting_enabled ? "true" : "false");
  line("age_inference_enabled", c.age_inference_enabled ? "true" : "false");
  line("minor_skewed_topic", c.minor_skewed_topic);
  line("feed_size", std::to_string(c.feed_size));
  line("seed", std::to_string(c.seed));
  for (const auto& ev : c.drift_events) {
    out += "\n[drift]\n";
    line("day", std::to_string(ev.day));
    for (const auto& m : ev.mutations) line(m.field, m.value);
  }
  return out;
}

std::vector<std::string> check_platform_config(const PlatformConfig& c, int duration_days) {
  std::vector<std::string> v;
  if (c.catalog_size < 1) v.push_back("catalog_size must be >= 1");
  if (c.ad_inventory_size < 1) v.push_back("ad_inventory_size must be >= 1");
  if (c.taxonomy.size() < 3) v.push_back("taxonomy needs at least 3 topics");
  if (std::set<std::string>(c.taxonomy.begin(), c.taxonomy.end()).size() != c.taxonomy.size())
    v.push_back("taxonomy has duplicate topics");
  if (std::set<std::string>(c.sensitive_categories.begin(), c.sensitive_categories.end()).size() !=
      c.sensitive_categories.size())
    v.push_back("sensitive_categories has duplicates");
  for (const auto& s : c.sensitive_categories)
    if (std::find(c.taxonomy.begin(), c.taxonomy.end(), s) != c.taxonomy.end())
      v.push_back(fmt::format("'{}' is both a taxonomy topic and a sensitive category", s));
  if (c.catalog_size < static_cast<int>(c.taxonomy.size()))
    v.push_back("catalog_size must cover every taxonomy topic");
  if (c.ad_inventory_size < static_cast<int>(c.taxonomy.size()))
    v.push_back("ad_inventory_size must cover every taxonomy topic");
  auto fraction_ok = [](double f) { return f >= 0.0 && f <= 1.0; };
  if (!fraction_ok(c.content_sensitive_fraction)) v.push_back("content_sensitive_fraction outside [0, 1]");
  if (!fraction_ok(c.ad_sensitive_fraction)) v.push_back("ad_sensitive_fraction outside [0, 1]");
  if (c.sensitive_categories.empty() && (c.content_sensitive_fraction > 0 || c.ad_sensitive_fraction > 0))
    v.push_back("sensitive fractions need at least one sensitive category");
  if (!(c.ad_slot_rate > 0.0 && c.ad_slot_rate < 1.0)) v.push_back("ad_slot_rate must lie in (0, 1)");
  if (!(c.interest_learning_rate > 0.0 && c.interest_learning_rate <= 1.0))
    v.push_back("interest_learning_rate must lie in (0, 1]");
  if (!(c.profiling_weight >= 0.0)) v.push_back("profiling_weight must be >= 0");
  if (c.honor_nonprofiling_option.mode == NonprofilingHonor::Mode::partial &&
      !(c.honor_nonprofiling_option.rho > 0.0 && c.honor_nonprofiling_option.rho < 1.0))
    v.push_back("partial honor factor must lie in (0, 1)");
  if (std::find(c.taxonomy.begin(), c.taxonomy.end(), c.minor_skewed_topic) == c.taxonomy.end())
    v.push_back(fmt::format("minor_skewed_topic '{}' is not in the taxonomy", c.minor_skewed_topic));
  if (c.feed_size < 1) v.push_back("feed_size must be >= 1");
  for (const auto& ev : c.drift_events) {
    if (ev.day < 1) v.push_back(fmt::format("drift event day {} is before day 1", ev.day));
    if (duration_days > 0 && ev.day > duration_days)
      v.push_back(fmt::format("drift event day {} is after the last audit day {}", ev.day, duration_days));
    PlatformConfig scratch = c;
    for (const auto& m : ev.mutations) {
      try {
        apply_mutation(scratch, m);
      } catch (const ParseError& e) {
        v.push_back(fmt::format("drift event day {}: {}", ev.day, e.what()));
      }
    }
    scratch.drift_events.clear();
    for (auto& inner : check_platform_config(scratch))
      v.push_back(fmt::format("after drift event day {}: {}", ev.day, inner));
  }
  return v;
}

nlohmann::json platform_config_to_json(const PlatformConfig& c) {
  using nlohmann::json;
  json drift = json::array();
  for (const auto& ev : c.drift_events) {
    json muts = json::array();
    for (const auto& m : ev.mutations) muts.push_back({{"field", m.field}, {"value", m.value}});
    drift.push_back({{"day", ev.day}, {"mutations", muts}});
  }
  return {
      {"catalog_size", c.catalog_size},
      {"ad_inventory_size", c.ad_inventory_size},
      {"taxonomy", c.taxonomy},
      {"sensitive_categories", c.sensitive_categories},
      {"content_sensitive_fraction", c.content_sensitive_fraction},
      {"ad_sensitive_fraction", c.ad_sensitive_fraction},
      {"ad_slot_rate", c.ad_slot_rate},
      {"interest_learning_rate", c.interest_learning_rate},
      {"profiling_weight", c.profiling_weight},
      {"base_score", c.base_score},
      {"minor_ad_profiling", c.minor_ad_profiling},
      {"honor_nonprofiling_option", c.honor_nonprofiling_option.to_string()},
      {"sensitive_targeting_enabled", c.sensitive_targeting_enabled},
      {"age_inference_enabled", c.age_inference_enabled},
      {"minor_skewed_topic", c.minor_skewed_topic},
      {"feed_size", c.feed_size},
      {"seed", c.seed},
      {"drift_events", drift},
  };
}

std::string platform_config_hash(const PlatformConfig& config) {
  return canonical_hash(platform_config_to_json(config));
}

}  // namespace dsaudit
