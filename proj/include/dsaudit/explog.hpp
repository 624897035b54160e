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

// Exposure logs. On disk (.explog) a log is line-delimited JSON: line 1 is
// the header object, every following line one impression record. Keys are
// written in a fixed order and no wall-clock data is stored, so identical
// runs produce identical bytes.

#ifndef DSAUDIT_EXPLOG_HPP_
#define DSAUDIT_EXPLOG_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsaudit/adapter.hpp"

namespace dsaudit {

inline constexpr const char* kExplogFormat = "explog/1";
inline constexpr const char* kToolVersion = "0.3.0";

struct ExposureLogHeader {
  std::string format = kExplogFormat;
  std::string run_id;
  std::string plan_hash;
  std::string platform_hash;
  std::string profiles_hash;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string case_selector;
  int duration_days = 0;
  int toggle_day = 0;  // first day of phase 2; 0 for single-phase runs

  bool operator==(const ExposureLogHeader&) const = default;
};

struct Impression {
  std::uint64_t seq = 0;  // global sequence number within the run
  std::string run_id;
  std::string user_id;
  std::string cohort_label;
  int day = 0;
  int session_index = 0;
  int slot_index = 0;  // 1-based, running across the feeds of one session
  SlotKind kind = SlotKind::content;
  std::string item_id;
  std::vector<std::string> item_topics;
  std::vector<std::string> sensitive_tags;
  bool matched_interest = false;
  bool matched_sensitive = false;
  bool watched = false;

  bool operator==(const Impression&) const = default;
};

struct ExposureLog {
  ExposureLogHeader header;
  std::vector<Impression> records;
};

std::string header_to_line(const ExposureLogHeader& header);
std::string impression_to_line(const Impression& record);
ExposureLogHeader header_from_line(const std::string& line);
Impression impression_from_line(const std::string& line);

void write_explog(std::ostream& out, const ExposureLog& log);
// Throws Error with the offending line number on malformed input.
ExposureLog read_explog(std::istream& in);

}  // namespace dsaudit

#endif  // DSAUDIT_EXPLOG_HPP_
