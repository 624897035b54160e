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

#include "dsaudit/explog.hpp"

#include <fmt/format.h>

#include <istream>
#include <ostream>

#include "dsaudit/errors.hpp"
#include "json.hpp"

namespace dsaudit {

using ordered_json = nlohmann::ordered_json;

std::string header_to_line(const ExposureLogHeader& h) {
  ordered_json j;
  j["format"] = h.format;
  j["run_id"] = h.run_id;
  j["plan_hash"] = h.plan_hash;
  j["platform_hash"] = h.platform_hash;
  j["profiles_hash"] = h.profiles_hash;
  j["seed"] = h.seed;
  j["tool_version"] = h.tool_version;
  j["case"] = h.case_selector;
  j["duration_days"] = h.duration_days;
  j["toggle_day"] = h.toggle_day;
  return j.dump();
}

std::string impression_to_line(const Impression& r) {
  ordered_json j;
  j["seq"] = r.seq;
  j["run_id"] = r.run_id;
  j["user_id"] = r.user_id;
  j["cohort_label"] = r.cohort_label;
  j["day"] = r.day;
  j["session_index"] = r.session_index;
  j["slot_index"] = r.slot_index;
  j["kind"] = std::string(to_string(r.kind));
  j["item_id"] = r.item_id;
  j["item_topics"] = r.item_topics;
  j["sensitive_tags"] = r.sensitive_tags;
  j["matched_interest"] = r.matched_interest;
  j["matched_sensitive"] = r.matched_sensitive;
  j["watched"] = r.watched;
  j["timestamp_logical"] = {r.day, r.session_index, r.slot_index};
  return j.dump();
}

ExposureLogHeader header_from_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  ExposureLogHeader h;
  h.format = j.at("format").get<std::string>();
  if (h.format != kExplogFormat) throw Error(fmt::format("unsupported log format '{}'", h.format));
  h.run_id = j.at("run_id").get<std::string>();
  h.plan_hash = j.at("plan_hash").get<std::string>();
  h.platform_hash = j.at("platform_hash").get<std::string>();
  h.profiles_hash = j.at("profiles_hash").get<std::string>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.tool_version = j.at("tool_version").get<std::string>();
  h.case_selector = j.at("case").get<std::string>();
  h.duration_days = j.at("duration_days").get<int>();
  h.toggle_day = j.at("toggle_day").get<int>();
  return h;
}

Impression impression_from_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  Impression r;
  r.seq = j.at("seq").get<std::uint64_t>();
  r.run_id = j.at("run_id").get<std::string>();
  r.user_id = j.at("user_id").get<std::string>();
  r.cohort_label = j.at("cohort_label").get<std::string>();
  r.day = j.at("day").get<int>();
  r.session_index = j.at("session_index").get<int>();
  r.slot_index = j.at("slot_index").get<int>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "content") {
    r.kind = SlotKind::content;
  } else if (kind == "ad") {
    r.kind = SlotKind::ad;
  } else {
    throw Error(fmt::format("unknown impression kind '{}'", kind));
  }
  r.item_id = j.at("item_id").get<std::string>();
  r.item_topics = j.at("item_topics").get<std::vector<std::string>>();
  r.sensitive_tags = j.at("sensitive_tags").get<std::vector<std::string>>();
  r.matched_interest = j.at("matched_interest").get<bool>();
  r.matched_sensitive = j.at("matched_sensitive").get<bool>();
  r.watched = j.at("watched").get<bool>();
  const auto ts = j.at("timestamp_logical").get<std::vector<int>>();
  if (ts != std::vector<int>{r.day, r.session_index, r.slot_index})
    throw Error("timestamp_logical disagrees with day/session_index/slot_index");
  return r;
}

void write_explog(std::ostream& out, const ExposureLog& log) {
  out << header_to_line(log.header) << '\n';
  for (const auto& r : log.records) out << impression_to_line(r) << '\n';
}

ExposureLog read_explog(std::istream& in) {
  ExposureLog log;
  std::string line;
  std::size_t line_no = 0;
  try {
    if (!std::getline(in, line)) throw Error("empty log file");
    ++line_no;
    log.header = header_from_line(line);
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      log.records.push_back(impression_from_line(line));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("explog line {}: {}", line_no, e.what()));
  } catch (const Error& e) {
    throw Error(fmt::format("explog line {}: {}", line_no, e.what()));
  }
  return log;
}

}  // namespace dsaudit
