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

#ifndef DSAUDIT_TESTS_SUPPORT_HPP_
#define DSAUDIT_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dsaudit/platform_config.hpp"
#include "dsaudit/scenario.hpp"

namespace dsaudit::testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(DSAUDIT_SOURCE_DIR) / rel;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AuditPlan load_plan(const std::string& rel) { return parse_plan(read_text(source_path(rel))); }

inline PlatformConfig load_preset(const std::string& name) {
  return parse_platform_config(read_text(source_path("presets/" + name + ".platform")));
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dsaudit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dsaudit::testing

#endif  // DSAUDIT_TESTS_SUPPORT_HPP_
